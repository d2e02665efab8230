#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "skydiver/error.hpp"
#include "skydiver/network.hpp"
#include "skydiver/random.hpp"

// Compact layer notation as used in the literature, e.g.
//
//   "28x28-16c-32c-8c"                     classification shape
//   "16x16x3-8C3-16C3-32C3-32C3-16C3-1C3"  segmentation shape
//
// Tokens, separated by '-':
//   HxW or HxWxC   input map (square only, C defaults to 1); optional first token
//   <M>C<R>        conv with M filters of R x R ('c' accepted, R defaults to 3)
//                  optional suffixes p<pad> and s<stride>; pad defaults to (R-1)/2
//   <M>            dense layer, only after a 1x1 map

namespace skydiver {

struct LayerToken {
    LayerKind kind = LayerKind::conv;
    std::size_t filters = 0;
    std::size_t kernel = 3;
    std::optional< std::size_t > pad;
    std::size_t stride = 1;
};

struct Topology {
    std::optional< std::size_t > input_side;
    std::optional< std::size_t > input_channels;
    std::vector< LayerToken > layers;
};

inline Topology parse_topology( const std::string& text ) {
    static const std::regex input_re( R"((\d+)x(\d+)(?:x(\d+))?)" );
    static const std::regex conv_re( R"((\d+)[cC](\d+)?(?:p(\d+))?(?:s(\d+))?)" );
    static const std::regex dense_re( R"((\d+))" );

    Topology topo;
    std::stringstream ss( text );
    std::string tok;
    bool first = true;
    auto number = []( const std::string& s, const std::string& what ) -> std::size_t {
        if ( s.size() > 9 ) throw ConfigError( "topology: " + what + " is too large" );
        const auto v = std::stoull( s );
        if ( v == 0 ) throw ConfigError( "topology: " + what + " must be >= 1" );
        return static_cast< std::size_t >( v );
    };
    while ( std::getline( ss, tok, '-' ) ) {
        std::smatch m;
        if ( tok.empty() ) throw ConfigError( "topology: empty token in '" + text + "'" );
        if ( first && std::regex_match( tok, m, input_re ) ) {
            const auto h = number( m[ 1 ], "input height" );
            const auto w = number( m[ 2 ], "input width" );
            if ( h != w ) throw ConfigError( "topology: only square inputs are supported, got " + tok );
            topo.input_side = h;
            if ( m[ 3 ].matched ) topo.input_channels = number( m[ 3 ], "input channels" );
        } else if ( std::regex_match( tok, m, conv_re ) ) {
            LayerToken lt;
            lt.filters = number( m[ 1 ], "filter count in '" + tok + "'" );
            if ( m[ 2 ].matched ) lt.kernel = number( m[ 2 ], "kernel size in '" + tok + "'" );
            if ( m[ 3 ].matched ) lt.pad = m[ 3 ].length() > 9 ? SIZE_MAX : static_cast< std::size_t >( std::stoull( m[ 3 ] ) );
            if ( m[ 4 ].matched ) lt.stride = number( m[ 4 ], "stride in '" + tok + "'" );
            topo.layers.push_back( lt );
        } else if ( std::regex_match( tok, m, dense_re ) ) {
            LayerToken lt;
            lt.kind = LayerKind::dense;
            lt.filters = number( m[ 1 ], "dense width" );
            lt.kernel = 1;
            lt.pad = 0;
            topo.layers.push_back( lt );
        } else {
            throw ConfigError( "topology: cannot parse token '" + tok + "'" );
        }
        first = false;
    }
    if ( topo.layers.empty() ) throw ConfigError( "topology: no layers in '" + text + "'" );
    return topo;
}

inline constexpr double max_generated_weights = 1 << 26;

struct GenerateOptions {
    std::size_t input_side = 16;
    std::size_t input_channels = 1;
    double weight_mean = 0.0;
    double weight_sigma = 0.5;
    float v_th = 1.0f;
    std::string name = "synthetic";
};

/// Random network with Gaussian weights drawn in (layer, filter, channel,
/// row, col) order, zero bias and a shared threshold. Input dims in the
/// topology override the options.
inline NetworkSpec generate_network( const Topology& topo, std::uint64_t seed, const GenerateOptions& opts = {} ) {
    if ( !std::isfinite( opts.weight_sigma ) || opts.weight_sigma < 0.0 )
        throw NumericError( "weight sigma must be finite and >= 0" );
    NetworkSpec net;
    net.name = opts.name;
    std::size_t channels = topo.input_channels.value_or( opts.input_channels );
    std::size_t side = topo.input_side.value_or( opts.input_side );
    Rng rng( seed );
    for ( const auto& tok : topo.layers ) {
        const double weights = static_cast< double >( tok.filters ) * static_cast< double >( channels ) *
                               static_cast< double >( tok.kernel ) * static_cast< double >( tok.kernel );
        if ( weights > max_generated_weights )
            throw ConfigError( "topology: layer " + std::to_string( net.layers.size() ) + " has too many weights" );
        LayerSpec layer;
        if ( tok.kind == LayerKind::dense ) {
            if ( side != 1 )
                throw ConfigError( "topology: dense layer needs a 1x1 input map, got " + std::to_string( side ) + "x" +
                                   std::to_string( side ) );
            layer = make_dense_layer( channels, tok.filters, opts.v_th );
        } else {
            layer = make_conv_layer( channels, tok.filters, tok.kernel, side, tok.pad.value_or( ( tok.kernel - 1 ) / 2 ),
                                     tok.stride, opts.v_th );
        }
        validate_layer( layer, net.layers.size() );
        for ( auto& w : layer.weights.data ) w = static_cast< float >( rng.normal( opts.weight_mean, opts.weight_sigma ) );
        channels = layer.out_channels;
        side = layer.output_side();
        net.layers.push_back( std::move( layer ) );
    }
    validate_network( net );
    return net;
}

} // namespace skydiver
