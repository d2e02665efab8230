#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skydiver/error.hpp"
#include "skydiver/network.hpp"

namespace skydiver {

namespace detail {

inline void check_frame( std::span< const std::uint8_t > frame, const LayerSpec& layer ) {
    if ( frame.size() != layer.input_size() )
        throw ConfigError( "frame has " + std::to_string( frame.size() ) + " elements, layer expects " +
                           std::to_string( layer.input_size() ) );
    for ( auto b : frame )
        if ( b > 1 ) throw ConfigError( "input frame is not binary" );
}

} // namespace detail

/// Membrane-potential increment of one timestep, written into `dv`
/// (M x E x E):
///
///   dv[n][x][y] = sum_i sum_j sum_k w[n][i][j][k] * in[i][x*S - pad + j][y*S - pad + k]
///
/// Out-of-range reads are zero. Cross-correlation orientation, no kernel flip.
///
/// Event driven: only set input bits are visited. Inputs are walked in
/// (channel, row, col) order, which for any fixed output cell is the same
/// (i, j, k) order the gather form above sums in, so float results are
/// identical to the naive triple loop.
inline void conv_dv_into( std::span< const std::uint8_t > frame, const LayerSpec& layer, std::span< float > dv ) {
    detail::check_frame( frame, layer );
    const std::size_t C = layer.in_channels;
    const std::size_t M = layer.out_channels;
    const std::size_t R = layer.kernel_size;
    const std::size_t H = layer.input_side;
    const std::size_t E = layer.output_side();
    const std::size_t S = layer.stride;
    const std::size_t P = layer.pad;
    if ( dv.size() != M * E * E ) throw ConfigError( "dv buffer does not match M x E x E" );
    std::fill( dv.begin(), dv.end(), 0.0f );

    const float* w = layer.weights.data.data();
    for ( std::size_t i = 0; i < C; ++i ) {
        for ( std::size_t r = 0; r < H; ++r ) {
            const std::uint8_t* row = frame.data() + ( i * H + r ) * H;
            for ( std::size_t c = 0; c < H; ++c ) {
                if ( !row[ c ] ) continue;
                // Output x with x*S - P + j == r, for each kernel row j.
                for ( std::size_t j = 0; j < R; ++j ) {
                    const std::size_t xs = r + P;
                    if ( xs < j || ( xs - j ) % S != 0 ) continue;
                    const std::size_t x = ( xs - j ) / S;
                    if ( x >= E ) continue;
                    for ( std::size_t k = 0; k < R; ++k ) {
                        const std::size_t ys = c + P;
                        if ( ys < k || ( ys - k ) % S != 0 ) continue;
                        const std::size_t y = ( ys - k ) / S;
                        if ( y >= E ) continue;
                        for ( std::size_t n = 0; n < M; ++n )
                            dv[ ( n * E + x ) * E + y ] += w[ ( ( n * C + i ) * R + j ) * R + k ];
                    }
                }
            }
        }
    }
}

inline std::vector< float > conv_dv( std::span< const std::uint8_t > frame, const LayerSpec& layer ) {
    std::vector< float > dv( layer.output_size() );
    conv_dv_into( frame, layer, dv );
    return dv;
}

} // namespace skydiver
