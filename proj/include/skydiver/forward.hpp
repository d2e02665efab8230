#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skydiver/conv.hpp"
#include "skydiver/error.hpp"
#include "skydiver/lif.hpp"
#include "skydiver/network.hpp"
#include "skydiver/spike_train.hpp"

namespace skydiver {

/// Membrane potentials of one layer, shaped M x E x E.
struct NeuronState {
    std::vector< float > vmem;

    static NeuronState zeros( const LayerSpec& layer ) { return { std::vector< float >( layer.output_size(), 0.0f ) }; }

    friend bool operator==( const NeuronState&, const NeuronState& ) = default;
};

struct LayerStep {
    std::vector< std::uint8_t > out_frame;
    NeuronState state;
};

namespace detail {

// One timestep of one layer. `dv` is scratch of size M*E*E.
inline void layer_step_into( const LayerSpec& layer, std::span< const std::uint8_t > frame, std::span< float > vmem,
                             std::span< std::uint8_t > out, std::span< float > dv ) {
    conv_dv_into( frame, layer, dv );
    const std::size_t plane = layer.output_side() * layer.output_side();
    for ( std::size_t n = 0; n < layer.out_channels; ++n ) {
        const float bias = layer.bias[ n ];
        for ( std::size_t p = n * plane; p < ( n + 1 ) * plane; ++p ) {
            const auto r = lif_step( vmem[ p ], dv[ p ] + bias, layer.v_th );
            vmem[ p ] = r.vmem;
            out[ p ] = r.spiked ? 1 : 0;
        }
    }
}

} // namespace detail

/// One timestep: conv_dv, bias added as a constant current, then lif_step on
/// every neuron.
inline LayerStep layer_forward( const LayerSpec& layer, std::span< const std::uint8_t > frame, NeuronState state ) {
    if ( state.vmem.size() != layer.output_size() )
        throw ConfigError( "neuron state has " + std::to_string( state.vmem.size() ) + " entries, layer needs " +
                           std::to_string( layer.output_size() ) );
    LayerStep step;
    step.out_frame.assign( layer.output_size(), 0 );
    std::vector< float > dv( layer.output_size() );
    detail::layer_step_into( layer, frame, state.vmem, step.out_frame, dv );
    step.state = std::move( state );
    return step;
}

/// Spike counts per (timestep, channel).
struct ChannelCounts {
    std::size_t timesteps = 0;
    std::size_t channels = 0;
    std::vector< std::uint32_t > data;

    ChannelCounts() = default;
    ChannelCounts( std::size_t t, std::size_t c ) : timesteps( t ), channels( c ), data( t * c, 0 ) {}

    std::uint32_t at( std::size_t t, std::size_t c ) const { return data[ t * channels + c ]; }
    std::uint32_t& at( std::size_t t, std::size_t c ) { return data[ t * channels + c ]; }

    std::uint64_t channel_total( std::size_t c ) const {
        std::uint64_t s = 0;
        for ( std::size_t t = 0; t < timesteps; ++t ) s += at( t, c );
        return s;
    }
    std::vector< double > channel_totals() const {
        std::vector< double > out( channels );
        for ( std::size_t c = 0; c < channels; ++c ) out[ c ] = static_cast< double >( channel_total( c ) );
        return out;
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for ( auto v : data ) s += v;
        return s;
    }

    friend bool operator==( const ChannelCounts&, const ChannelCounts& ) = default;
};

inline ChannelCounts channel_counts( const SpikeTrain& train ) {
    const auto& shape = train.shape();
    const std::size_t plane = shape.height * shape.width;
    ChannelCounts counts( train.timesteps(), shape.channels );
    for ( std::size_t t = 0; t < train.timesteps(); ++t ) {
        const auto frame = train.frame( t );
        for ( std::size_t c = 0; c < shape.channels; ++c ) {
            std::uint32_t s = 0;
            for ( std::size_t p = c * plane; p < ( c + 1 ) * plane; ++p ) s += frame[ p ];
            counts.at( t, c ) = s;
        }
    }
    return counts;
}

inline FrameShape input_shape( const LayerSpec& layer ) {
    return { layer.in_channels, layer.input_side, layer.input_side };
}
inline FrameShape output_shape( const LayerSpec& layer ) {
    return { layer.out_channels, layer.output_side(), layer.output_side() };
}

struct ForwardOptions {
    bool keep_trains = true;
};

struct ForwardResult {
    /// Output train of each layer; empty when keep_trains is off.
    std::vector< SpikeTrain > trains;
    /// Input spike counts (the network input).
    ChannelCounts input_counts;
    /// Output spike counts per layer.
    std::vector< ChannelCounts > counts;
    /// Final membrane potentials per layer.
    std::vector< NeuronState > final_states;
};

/// Runs all timesteps through all layers with persistent potentials that
/// start at zero. Shapes are checked before any compute.
inline ForwardResult network_forward( const NetworkSpec& net, const SpikeTrain& input, ForwardOptions opts = {} ) {
    validate_network( net );
    if ( input.shape() != input_shape( net.layers.front() ) )
        throw ConfigError( "input train shape does not match layer 0 input" );
    const std::size_t T = input.timesteps();
    const std::size_t L = net.layers.size();

    ForwardResult result;
    result.input_counts = channel_counts( input );
    std::vector< std::vector< std::uint8_t > > frames( L );
    std::vector< std::vector< float > > scratch( L );
    for ( std::size_t l = 0; l < L; ++l ) {
        const auto& layer = net.layers[ l ];
        result.final_states.push_back( NeuronState::zeros( layer ) );
        result.counts.emplace_back( T, layer.out_channels );
        frames[ l ].assign( layer.output_size(), 0 );
        scratch[ l ].assign( layer.output_size(), 0.0f );
        if ( opts.keep_trains ) result.trains.emplace_back( T, output_shape( layer ) );
    }

    for ( std::size_t t = 0; t < T; ++t ) {
        std::span< const std::uint8_t > in = input.frame( t );
        for ( std::size_t l = 0; l < L; ++l ) {
            const auto& layer = net.layers[ l ];
            detail::layer_step_into( layer, in, result.final_states[ l ].vmem, frames[ l ], scratch[ l ] );
            const std::size_t plane = layer.output_side() * layer.output_side();
            for ( std::size_t n = 0; n < layer.out_channels; ++n ) {
                std::uint32_t s = 0;
                for ( std::size_t p = n * plane; p < ( n + 1 ) * plane; ++p ) s += frames[ l ][ p ];
                result.counts[ l ].at( t, n ) = s;
            }
            if ( opts.keep_trains ) std::copy( frames[ l ].begin(), frames[ l ].end(), result.trains[ l ].frame( t ).begin() );
            in = frames[ l ];
        }
    }
    return result;
}

} // namespace skydiver
