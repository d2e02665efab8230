#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "skydiver/error.hpp"
#include "skydiver/random.hpp"
#include "skydiver/spike_train.hpp"

namespace skydiver {

/// Bernoulli rate coding: each slot spikes with probability equal to the
/// (clamped) pixel value. Draw order is (t, c, y, x).
inline SpikeTrain rate_encode( const Image& image, std::size_t timesteps, std::uint64_t seed ) {
    if ( timesteps == 0 ) throw ConfigError( "rate_encode: zero timesteps gives an empty train" );
    if ( image.pixels.size() != image.shape.size() ) throw ConfigError( "rate_encode: image data does not match shape" );
    for ( float p : image.pixels )
        if ( !std::isfinite( p ) ) throw NumericError( "rate_encode: non-finite pixel" );

    SpikeTrain train( timesteps, image.shape );
    Rng rng( seed );
    for ( std::size_t t = 0; t < timesteps; ++t ) {
        auto frame = train.frame( t );
        for ( std::size_t i = 0; i < image.pixels.size(); ++i ) {
            const double p = std::clamp( static_cast< double >( image.pixels[ i ] ), 0.0, 1.0 );
            frame[ i ] = rng.bernoulli( p ) ? 1 : 0;
        }
    }
    return train;
}

/// Synthetic stand-in for a camera frame: independent uniform pixels in
/// [0, 2 * mean_intensity], clamped to [0, 1].
inline Image synthetic_image( FrameShape shape, std::uint64_t seed, double mean_intensity = 0.25 ) {
    Image image( shape );
    Rng rng( seed );
    for ( auto& p : image.pixels )
        p = static_cast< float >( std::clamp( 2.0 * mean_intensity * rng.uniform(), 0.0, 1.0 ) );
    return image;
}

} // namespace skydiver
