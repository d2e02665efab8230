#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "skydiver/error.hpp"
#include "skydiver/io/binary.hpp"
#include "skydiver/spike_train.hpp"

// IDX image files (MNIST): big-endian magic 0x00000803, then count, rows and
// cols as big-endian uint32, then count*rows*cols unsigned bytes.

namespace skydiver::io {

inline constexpr std::uint32_t idx_image_magic = 0x00000803;

/// Reads at most `limit` images; pixels are byte / 255.
inline std::vector< Image > parse_idx_images( std::span< const std::uint8_t > bytes,
                                              std::size_t limit = std::numeric_limits< std::size_t >::max() ) {
    Reader reader( bytes, "IDX file" );
    const auto magic = reader.u32_be();
    if ( magic != idx_image_magic ) {
        char buf[ 16 ];
        std::snprintf( buf, sizeof buf, "0x%08x", magic );
        throw FormatError( std::string( "IDX file: bad magic " ) + buf + ", expected 0x00000803" );
    }
    const std::uint64_t count = reader.u32_be();
    const std::uint64_t rows = reader.u32_be();
    const std::uint64_t cols = reader.u32_be();
    const std::uint64_t n = std::min< std::uint64_t >( count, limit );
    const auto pixels = checked_mul( rows, cols );
    if ( !pixels ) throw FormatError( "IDX file: image dimensions overflow" );
    const auto need = checked_mul( n, *pixels );
    if ( !need || *need > reader.remaining() )
        throw FormatError( "IDX file: short read, " + std::to_string( n ) + " images of " + std::to_string( rows ) + "x" +
                           std::to_string( cols ) + " need more than the " + std::to_string( reader.remaining() ) +
                           " bytes present" );

    std::vector< Image > images;
    images.reserve( n );
    for ( std::uint64_t i = 0; i < n; ++i ) {
        Image img( FrameShape{ 1, rows, cols } );
        const auto data = reader.take( *pixels );
        for ( std::size_t p = 0; p < data.size(); ++p ) img.pixels[ p ] = static_cast< float >( data[ p ] / 255.0 );
        images.push_back( std::move( img ) );
    }
    return images;
}

inline std::vector< Image > load_idx_images( const std::filesystem::path& path,
                                             std::size_t limit = std::numeric_limits< std::size_t >::max() ) {
    return parse_idx_images( read_file( path ), limit );
}

inline Bytes encode_idx_images( const std::vector< std::vector< std::uint8_t > >& images, std::uint32_t rows,
                                std::uint32_t cols ) {
    Bytes out;
    auto put_be = [ & ]( std::uint32_t v ) {
        for ( int i = 3; i >= 0; --i ) out.push_back( static_cast< std::uint8_t >( v >> ( 8 * i ) ) );
    };
    put_be( idx_image_magic );
    put_be( static_cast< std::uint32_t >( images.size() ) );
    put_be( rows );
    put_be( cols );
    for ( const auto& img : images ) {
        if ( img.size() != std::size_t{ rows } * cols ) throw FormatError( "IDX encode: image size mismatch" );
        out.insert( out.end(), img.begin(), img.end() );
    }
    return out;
}

} // namespace skydiver::io
