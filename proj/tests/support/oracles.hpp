#pragma once

// Independent reference implementations used by the tests. Deliberately
// naive: plain loops over the defining formulas, no shared code with the
// library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "skydiver/network.hpp"
#include "skydiver/random.hpp"
#include "skydiver/spike_train.hpp"

namespace oracle {

using skydiver::LayerSpec;

/// Gather form of the potential increment: for each output cell, sum over
/// (i, j, k) with bounds-checked reads.
inline std::vector< float > conv_dv( const std::vector< std::uint8_t >& in, const LayerSpec& L ) {
    const long C = static_cast< long >( L.in_channels ), M = static_cast< long >( L.out_channels );
    const long R = static_cast< long >( L.kernel_size ), H = static_cast< long >( L.input_side );
    const long S = static_cast< long >( L.stride ), P = static_cast< long >( L.pad );
    const long E = ( H - R + 2 * P ) / S + 1;
    std::vector< float > out( static_cast< std::size_t >( M * E * E ), 0.0f );
    for ( long n = 0; n < M; ++n )
        for ( long x = 0; x < E; ++x )
            for ( long y = 0; y < E; ++y ) {
                float acc = 0.0f;
                for ( long i = 0; i < C; ++i )
                    for ( long j = 0; j < R; ++j )
                        for ( long k = 0; k < R; ++k ) {
                            const long r = x * S - P + j, c = y * S - P + k;
                            if ( r < 0 || r >= H || c < 0 || c >= H ) continue;
                            if ( !in[ static_cast< std::size_t >( ( i * H + r ) * H + c ) ] ) continue;
                            acc += L.weights.data[ static_cast< std::size_t >( ( ( n * C + i ) * R + j ) * R + k ) ];
                        }
                out[ static_cast< std::size_t >( ( n * E + x ) * E + y ) ] = acc;
            }
    return out;
}

struct StepOut {
    std::vector< std::uint8_t > spikes;
    std::vector< float > vmem;
};

/// One timestep of a layer: potentials += dv + bias, fire at >= v_th,
/// subtract on fire.
inline StepOut layer_step( const LayerSpec& L, const std::vector< std::uint8_t >& in, std::vector< float > vmem ) {
    const auto dv = conv_dv( in, L );
    const std::size_t plane = dv.size() / L.out_channels;
    StepOut o;
    o.spikes.assign( dv.size(), 0 );
    for ( std::size_t p = 0; p < dv.size(); ++p ) {
        float v = vmem[ p ] + ( dv[ p ] + L.bias[ p / plane ] );
        if ( v >= L.v_th ) {
            o.spikes[ p ] = 1;
            v -= L.v_th;
        }
        vmem[ p ] = v;
    }
    o.vmem = std::move( vmem );
    return o;
}

/// max sum of the best assignment by full enumeration of N^K labelings.
inline double min_max_sum( const std::vector< double >& w, std::size_t n ) {
    const std::size_t k = w.size();
    std::vector< std::size_t > label( k, 0 );
    double best = std::numeric_limits< double >::infinity();
    while ( true ) {
        std::vector< double > loads( n, 0.0 );
        for ( std::size_t i = 0; i < k; ++i ) loads[ label[ i ] ] += w[ i ];
        best = std::min( best, *std::max_element( loads.begin(), loads.end() ) );
        std::size_t pos = 0;
        while ( pos < k && ++label[ pos ] == n ) label[ pos++ ] = 0;
        if ( pos == k ) break;
    }
    return best;
}

/// Random weights in [-scale, scale).
inline void fill_uniform( skydiver::Rng& rng, std::vector< float >& v, double scale ) {
    for ( auto& x : v ) x = static_cast< float >( ( 2.0 * rng.uniform() - 1.0 ) * scale );
}

inline std::vector< std::uint8_t > random_frame( skydiver::Rng& rng, std::size_t size, double p ) {
    std::vector< std::uint8_t > f( size );
    for ( auto& b : f ) b = rng.bernoulli( p ) ? 1 : 0;
    return f;
}

} // namespace oracle
