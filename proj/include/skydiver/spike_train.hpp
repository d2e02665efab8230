#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "skydiver/error.hpp"

namespace skydiver {

struct FrameShape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const { return channels * height * width; }
    std::size_t index( std::size_t c, std::size_t y, std::size_t x ) const { return ( c * height + y ) * width + x; }

    friend bool operator==( const FrameShape&, const FrameShape& ) = default;
};

/// Binary spike tensor over time, stored unpacked as one byte per slot in
/// (t, c, y, x) order.
class SpikeTrain {
  public:
    SpikeTrain() = default;
    SpikeTrain( std::size_t timesteps, FrameShape shape )
        : m_timesteps( timesteps ), m_shape( shape ), m_bits( timesteps * shape.size(), 0 ) {}

    /// Adopts `bits`; rejects wrong lengths and any value other than 0/1.
    static SpikeTrain from_bits( std::size_t timesteps, FrameShape shape, std::vector< std::uint8_t > bits ) {
        if ( bits.size() != timesteps * shape.size() )
            throw ConfigError( "spike train data length " + std::to_string( bits.size() ) + " does not match shape " +
                               std::to_string( timesteps * shape.size() ) );
        for ( auto b : bits )
            if ( b > 1 ) throw ConfigError( "spike train is not binary" );
        SpikeTrain train;
        train.m_timesteps = timesteps;
        train.m_shape = shape;
        train.m_bits = std::move( bits );
        return train;
    }

    std::size_t timesteps() const { return m_timesteps; }
    const FrameShape& shape() const { return m_shape; }
    std::size_t frame_size() const { return m_shape.size(); }

    std::span< const std::uint8_t > frame( std::size_t t ) const {
        return std::span< const std::uint8_t >( m_bits ).subspan( t * frame_size(), frame_size() );
    }
    std::span< std::uint8_t > frame( std::size_t t ) {
        return std::span< std::uint8_t >( m_bits ).subspan( t * frame_size(), frame_size() );
    }

    std::uint8_t at( std::size_t t, std::size_t c, std::size_t y, std::size_t x ) const {
        return m_bits[ t * frame_size() + m_shape.index( c, y, x ) ];
    }
    void set( std::size_t t, std::size_t c, std::size_t y, std::size_t x, bool spike ) {
        m_bits[ t * frame_size() + m_shape.index( c, y, x ) ] = spike ? 1 : 0;
    }

    const std::vector< std::uint8_t >& bits() const { return m_bits; }

    std::size_t spike_count() const { return std::accumulate( m_bits.begin(), m_bits.end(), std::size_t{ 0 } ); }

    /// Fraction of neuron-timestep slots holding a spike.
    double spikerate() const {
        return m_bits.empty() ? 0.0 : static_cast< double >( spike_count() ) / static_cast< double >( m_bits.size() );
    }

    friend bool operator==( const SpikeTrain&, const SpikeTrain& ) = default;

  private:
    std::size_t m_timesteps = 0;
    FrameShape m_shape;
    std::vector< std::uint8_t > m_bits;
};

/// Analog image, pixels in (c, y, x) order, nominally in [0, 1].
struct Image {
    FrameShape shape;
    std::vector< float > pixels;

    Image() = default;
    explicit Image( FrameShape s, float fill = 0.0f ) : shape( s ), pixels( s.size(), fill ) {}

    float at( std::size_t c, std::size_t y, std::size_t x ) const { return pixels[ shape.index( c, y, x ) ]; }
    float& at( std::size_t c, std::size_t y, std::size_t x ) { return pixels[ shape.index( c, y, x ) ]; }
};

} // namespace skydiver
