#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "skydiver/error.hpp"

namespace skydiver {

enum class LayerKind { conv, dense };

inline const char* to_string( LayerKind kind ) { return kind == LayerKind::conv ? "conv" : "dense"; }

/// Filter weights in (filter, in-channel, row, col) row-major order.
struct WeightTensor {
    std::array< std::size_t, 4 > dims{ 0, 0, 0, 0 };
    std::vector< float > data;

    WeightTensor() = default;
    WeightTensor( std::size_t filters, std::size_t channels, std::size_t rows, std::size_t cols )
        : dims{ filters, channels, rows, cols }, data( filters * channels * rows * cols, 0.0f ) {}

    std::size_t element_count() const { return dims[ 0 ] * dims[ 1 ] * dims[ 2 ] * dims[ 3 ]; }
    std::size_t filter_size() const { return dims[ 1 ] * dims[ 2 ] * dims[ 3 ]; }

    std::size_t index( std::size_t n, std::size_t c, std::size_t j, std::size_t k ) const {
        return ( ( n * dims[ 1 ] + c ) * dims[ 2 ] + j ) * dims[ 3 ] + k;
    }
    float& at( std::size_t n, std::size_t c, std::size_t j, std::size_t k ) { return data[ index( n, c, j, k ) ]; }
    float at( std::size_t n, std::size_t c, std::size_t j, std::size_t k ) const { return data[ index( n, c, j, k ) ]; }

    std::span< const float > filter( std::size_t n ) const {
        return std::span< const float >( data ).subspan( n * filter_size(), filter_size() );
    }

    friend bool operator==( const WeightTensor&, const WeightTensor& ) = default;
};

/// One spiking layer. Dense layers are 1x1 convolutions over 1x1 maps
/// (kernel_size = input_side = 1, pad = 0, stride = 1).
struct LayerSpec {
    LayerKind kind = LayerKind::conv;
    std::size_t in_channels = 0;  // C
    std::size_t out_channels = 0; // M
    std::size_t kernel_size = 1;  // R
    std::size_t input_side = 1;   // H (square maps)
    std::size_t pad = 0;
    std::size_t stride = 1;
    float v_th = 1.0f;
    WeightTensor weights;
    std::vector< float > bias;

    /// E = (H - R + 2 pad) / stride + 1. Only meaningful for a validated layer.
    std::size_t output_side() const { return ( input_side + 2 * pad - kernel_size ) / stride + 1; }
    std::size_t input_size() const { return in_channels * input_side * input_side; }
    std::size_t output_size() const { return out_channels * output_side() * output_side(); }

    friend bool operator==( const LayerSpec&, const LayerSpec& ) = default;
};

struct NetworkSpec {
    std::string name;
    std::vector< LayerSpec > layers;

    friend bool operator==( const NetworkSpec&, const NetworkSpec& ) = default;
};

inline LayerSpec make_conv_layer( std::size_t in_channels, std::size_t out_channels, std::size_t kernel_size,
                                  std::size_t input_side, std::size_t pad = 0, std::size_t stride = 1,
                                  float v_th = 1.0f ) {
    LayerSpec layer;
    layer.kind = LayerKind::conv;
    layer.in_channels = in_channels;
    layer.out_channels = out_channels;
    layer.kernel_size = kernel_size;
    layer.input_side = input_side;
    layer.pad = pad;
    layer.stride = stride;
    layer.v_th = v_th;
    layer.weights = WeightTensor( out_channels, in_channels, kernel_size, kernel_size );
    layer.bias.assign( out_channels, 0.0f );
    return layer;
}

inline LayerSpec make_dense_layer( std::size_t in_channels, std::size_t out_channels, float v_th = 1.0f ) {
    LayerSpec layer = make_conv_layer( in_channels, out_channels, 1, 1, 0, 1, v_th );
    layer.kind = LayerKind::dense;
    return layer;
}

namespace detail {

inline std::string layer_tag( std::size_t index ) { return "layer " + std::to_string( index ) + ": "; }

} // namespace detail

inline void validate_layer( const LayerSpec& layer, std::size_t index = 0 ) {
    const auto tag = detail::layer_tag( index );
    if ( layer.in_channels == 0 || layer.out_channels == 0 || layer.kernel_size == 0 || layer.input_side == 0 )
        throw ConfigError( tag + "channel counts, kernel size and input side must be >= 1" );
    if ( layer.stride == 0 ) throw ConfigError( tag + "stride must be >= 1" );
    if ( layer.pad > layer.kernel_size - 1 )
        throw ConfigError( tag + "pad " + std::to_string( layer.pad ) + " exceeds kernel_size - 1 = " +
                           std::to_string( layer.kernel_size - 1 ) );
    if ( layer.input_side + 2 * layer.pad < layer.kernel_size )
        throw ConfigError( tag + "kernel larger than padded input" );
    if ( layer.kind == LayerKind::dense &&
         ( layer.kernel_size != 1 || layer.input_side != 1 || layer.pad != 0 || layer.stride != 1 ) )
        throw ConfigError( tag + "dense layers must have kernel 1, input side 1, pad 0, stride 1" );
    if ( !std::isfinite( layer.v_th ) || layer.v_th <= 0.0f ) throw NumericError( tag + "threshold must be finite and > 0" );

    const std::array< std::size_t, 4 > expected{ layer.out_channels, layer.in_channels, layer.kernel_size,
                                                 layer.kernel_size };
    if ( layer.weights.dims != expected ) throw ConfigError( tag + "weight tensor dims do not match M x C x R x R" );
    if ( layer.weights.data.size() != layer.weights.element_count() )
        throw ConfigError( tag + "weight data length does not match dims" );
    for ( float w : layer.weights.data )
        if ( !std::isfinite( w ) ) throw NumericError( tag + "non-finite weight" );
    if ( layer.bias.size() != layer.out_channels ) throw ConfigError( tag + "bias length must equal out_channels" );
    for ( float b : layer.bias )
        if ( !std::isfinite( b ) ) throw NumericError( tag + "non-finite bias" );
}

/// Checks every layer and the chaining C(l) = M(l-1), H(l) = E(l-1).
inline void validate_network( const NetworkSpec& net ) {
    if ( net.layers.empty() ) throw ConfigError( "network has no layers" );
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        validate_layer( net.layers[ l ], l );
        if ( l == 0 ) continue;
        const auto& prev = net.layers[ l - 1 ];
        const auto& cur = net.layers[ l ];
        if ( cur.in_channels != prev.out_channels )
            throw ConfigError( detail::layer_tag( l ) + "in_channels " + std::to_string( cur.in_channels ) +
                               " != previous out_channels " + std::to_string( prev.out_channels ) );
        if ( cur.input_side != prev.output_side() )
            throw ConfigError( detail::layer_tag( l ) + "input side " + std::to_string( cur.input_side ) +
                               " != previous output side " + std::to_string( prev.output_side() ) );
    }
}

} // namespace skydiver
