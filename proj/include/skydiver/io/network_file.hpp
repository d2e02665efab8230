#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "skydiver/error.hpp"
#include "skydiver/io/binary.hpp"
#include "skydiver/network.hpp"

// Network files are a JSON description plus a sidecar weights blob:
//
//   net.json   {"format": "skydiver-network", "name": ..., "weights_file": "net.skyb",
//               "layers": [{"kind", "C", "M", "R", "H", "pad", "stride", "v_th",
//                           "bias": [...], "weights_ref": {"offset": o, "count": n}}]}
//   net.skyb   "SKYB", version byte, then little-endian float32 weights of every
//              layer in (filter, channel, row, col) order; offset/count in floats.

namespace skydiver::io {

inline constexpr char network_magic[ 4 ] = { 'S', 'K', 'Y', 'B' };
inline constexpr std::uint8_t network_version = 1;
inline constexpr std::size_t network_header_bytes = 5;

struct EncodedNetwork {
    std::string json;
    Bytes blob;
};

inline EncodedNetwork encode_network( const NetworkSpec& net, const std::string& blob_name ) {
    validate_network( net );
    nlohmann::ordered_json doc;
    doc[ "format" ] = "skydiver-network";
    doc[ "name" ] = net.name;
    doc[ "weights_file" ] = blob_name;
    auto layers = nlohmann::ordered_json::array();

    EncodedNetwork enc;
    enc.blob.insert( enc.blob.end(), std::begin( network_magic ), std::end( network_magic ) );
    enc.blob.push_back( network_version );
    std::size_t offset = 0;
    for ( const auto& layer : net.layers ) {
        nlohmann::ordered_json l;
        l[ "kind" ] = to_string( layer.kind );
        l[ "C" ] = layer.in_channels;
        l[ "M" ] = layer.out_channels;
        l[ "R" ] = layer.kernel_size;
        l[ "H" ] = layer.input_side;
        l[ "pad" ] = layer.pad;
        l[ "stride" ] = layer.stride;
        l[ "v_th" ] = layer.v_th;
        l[ "bias" ] = layer.bias;
        l[ "weights_ref" ] = { { "offset", offset }, { "count", layer.weights.data.size() } };
        layers.push_back( std::move( l ) );
        for ( float w : layer.weights.data ) put_f32_le( enc.blob, w );
        offset += layer.weights.data.size();
    }
    doc[ "layers" ] = std::move( layers );
    enc.json = doc.dump( 2 ) + "\n";
    return enc;
}

namespace detail {

template < class T >
T field( const nlohmann::json& obj, const char* key, const std::string& where ) {
    if ( !obj.is_object() || !obj.contains( key ) ) throw FormatError( where + ": missing field '" + key + "'" );
    try {
        return obj.at( key ).get< T >();
    } catch ( const nlohmann::json::exception& ) {
        throw FormatError( where + ": field '" + key + "' has the wrong type" );
    }
}

inline constexpr std::uint64_t max_dim = 1u << 16;

// Shape fields must be non-negative integers of sane size so that a corrupt
// file cannot drive a huge allocation.
inline std::size_t dim_field( const nlohmann::json& obj, const char* key, const std::string& where ) {
    if ( !obj.is_object() || !obj.contains( key ) ) throw FormatError( where + ": missing field '" + key + "'" );
    const auto& v = obj.at( key );
    if ( !v.is_number_unsigned() ) throw FormatError( where + ": field '" + key + "' must be a non-negative integer" );
    const auto x = v.get< std::uint64_t >();
    if ( x > max_dim ) throw FormatError( where + ": field '" + key + "' = " + std::to_string( x ) + " is too large" );
    return static_cast< std::size_t >( x );
}

} // namespace detail

inline NetworkSpec decode_network( const std::string& json_text, std::span< const std::uint8_t > blob ) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse( json_text );
    } catch ( const nlohmann::json::exception& e ) {
        throw FormatError( std::string( "network description is not valid JSON: " ) + e.what() );
    }
    if ( detail::field< std::string >( doc, "format", "network" ) != "skydiver-network" )
        throw FormatError( "network: unknown format tag" );

    Reader reader( blob, "weights blob" );
    if ( blob.size() < network_header_bytes )
        throw FormatError( "weights blob: length mismatch, expected at least " + std::to_string( network_header_bytes ) +
                           " bytes, got " + std::to_string( blob.size() ) );
    const auto magic = reader.take( 4 );
    if ( !std::equal( magic.begin(), magic.end(), std::begin( network_magic ) ) )
        throw FormatError( "weights blob: bad magic, expected \"SKYB\"" );
    const auto version = reader.u8();
    if ( version != network_version )
        throw FormatError( "weights blob: unsupported version " + std::to_string( version ) + " (supported: " +
                           std::to_string( network_version ) + ")" );

    NetworkSpec net;
    net.name = detail::field< std::string >( doc, "name", "network" );
    if ( !doc.contains( "layers" ) || !doc[ "layers" ].is_array() ) throw FormatError( "network: missing layer list" );

    std::size_t expected_floats = 0;
    for ( const auto& l : doc[ "layers" ] ) {
        const auto m = detail::dim_field( l, "M", "layer" );
        const auto c = detail::dim_field( l, "C", "layer" );
        const auto r = detail::dim_field( l, "R", "layer" );
        expected_floats += m * c * r * r;
    }
    const std::size_t expected_bytes = network_header_bytes + 4 * expected_floats;
    if ( blob.size() != expected_bytes )
        throw FormatError( "weights blob: length mismatch, expected " + std::to_string( expected_bytes ) + " bytes, got " +
                           std::to_string( blob.size() ) );
    const auto payload = blob.subspan( network_header_bytes );

    std::size_t index = 0;
    for ( const auto& l : doc[ "layers" ] ) {
        const std::string where = "layer " + std::to_string( index );
        LayerSpec layer;
        const auto kind = detail::field< std::string >( l, "kind", where );
        if ( kind == "conv" )
            layer.kind = LayerKind::conv;
        else if ( kind == "dense" )
            layer.kind = LayerKind::dense;
        else
            throw FormatError( where + ": unknown kind '" + kind + "'" );
        layer.in_channels = detail::dim_field( l, "C", where );
        layer.out_channels = detail::dim_field( l, "M", where );
        layer.kernel_size = detail::dim_field( l, "R", where );
        layer.input_side = detail::dim_field( l, "H", where );
        layer.pad = detail::dim_field( l, "pad", where );
        layer.stride = detail::dim_field( l, "stride", where );
        layer.v_th = detail::field< float >( l, "v_th", where );
        layer.bias = detail::field< std::vector< float > >( l, "bias", where );
        if ( !l.is_object() || !l.contains( "weights_ref" ) ) throw FormatError( where + ": missing field 'weights_ref'" );
        const auto& ref = l[ "weights_ref" ];
        if ( !ref.is_object() || !ref.contains( "offset" ) || !ref[ "offset" ].is_number_unsigned() ||
             !ref.contains( "count" ) || !ref[ "count" ].is_number_unsigned() )
            throw FormatError( where + ": weights_ref needs non-negative integer offset and count" );
        const auto offset = ref[ "offset" ].get< std::uint64_t >();
        const auto count = ref[ "count" ].get< std::uint64_t >();
        const std::size_t want = layer.out_channels * layer.in_channels * layer.kernel_size * layer.kernel_size;
        if ( count != want )
            throw ConfigError( where + ": weights_ref count " + std::to_string( count ) + " does not match M*C*R*R = " +
                               std::to_string( want ) );
        if ( offset > expected_floats || count > expected_floats - offset )
            throw FormatError( where + ": weights_ref points outside the blob" );
        layer.weights = WeightTensor( layer.out_channels, layer.in_channels, layer.kernel_size, layer.kernel_size );
        Reader wr( payload.subspan( 4 * offset, 4 * count ), where + " weights" );
        for ( auto& w : layer.weights.data ) w = wr.f32_le();
        net.layers.push_back( std::move( layer ) );
        ++index;
    }
    validate_network( net );
    return net;
}

/// Sidecar blob path for a description path (same stem, .skyb).
inline std::filesystem::path blob_path_for( const std::filesystem::path& json_path ) {
    auto p = json_path;
    p.replace_extension( ".skyb" );
    return p;
}

/// `path` may name either file; the other is found by swapping the extension.
inline std::pair< std::filesystem::path, std::filesystem::path > network_paths( const std::filesystem::path& path ) {
    auto json = path;
    if ( path.extension() == ".skyb" ) json.replace_extension( ".json" );
    return { json, blob_path_for( json ) };
}

inline void save_network( const NetworkSpec& net, const std::filesystem::path& path ) {
    const auto [ json, blob ] = network_paths( path );
    const auto enc = encode_network( net, blob.filename().string() );
    write_file_atomic( blob, enc.blob );
    write_file_atomic( json, enc.json );
}

inline NetworkSpec load_network( const std::filesystem::path& path ) {
    const auto [ json, blob ] = network_paths( path );
    const auto text = read_file( json );
    return decode_network( std::string( text.begin(), text.end() ), read_file( blob ) );
}

} // namespace skydiver::io
