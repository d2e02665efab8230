#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skydiver/error.hpp"

namespace skydiver::io {

using Bytes = std::vector< std::uint8_t >;

/// a * b, or nullopt on 64-bit overflow.
inline std::optional< std::uint64_t > checked_mul( std::uint64_t a, std::uint64_t b ) {
    if ( a != 0 && b > UINT64_MAX / a ) return std::nullopt;
    return a * b;
}

inline void put_u32_le( Bytes& out, std::uint32_t v ) {
    for ( int i = 0; i < 4; ++i ) out.push_back( static_cast< std::uint8_t >( v >> ( 8 * i ) ) );
}

inline void put_f32_le( Bytes& out, float v ) { put_u32_le( out, std::bit_cast< std::uint32_t >( v ) ); }

/// Bounds-checked cursor over a byte buffer. Never reads past the end.
class Reader {
  public:
    explicit Reader( std::span< const std::uint8_t > data, std::string what = "buffer" )
        : m_data( data ), m_what( std::move( what ) ) {}

    std::size_t remaining() const { return m_data.size() - m_pos; }
    std::size_t position() const { return m_pos; }

    void require( std::size_t n ) const {
        if ( remaining() < n )
            throw FormatError( m_what + ": truncated, need " + std::to_string( n ) + " bytes at offset " +
                               std::to_string( m_pos ) + ", have " + std::to_string( remaining() ) );
    }

    std::uint8_t u8() {
        require( 1 );
        return m_data[ m_pos++ ];
    }
    std::uint32_t u32_le() {
        require( 4 );
        std::uint32_t v = 0;
        for ( int i = 0; i < 4; ++i ) v |= static_cast< std::uint32_t >( m_data[ m_pos++ ] ) << ( 8 * i );
        return v;
    }
    std::uint32_t u32_be() {
        require( 4 );
        std::uint32_t v = 0;
        for ( int i = 0; i < 4; ++i ) v = ( v << 8 ) | m_data[ m_pos++ ];
        return v;
    }
    float f32_le() { return std::bit_cast< float >( u32_le() ); }

    std::span< const std::uint8_t > take( std::size_t n ) {
        require( n );
        auto s = m_data.subspan( m_pos, n );
        m_pos += n;
        return s;
    }

  private:
    std::span< const std::uint8_t > m_data;
    std::size_t m_pos = 0;
    std::string m_what;
};

inline Bytes read_file( const std::filesystem::path& path ) {
    std::ifstream in( path, std::ios::binary );
    if ( !in ) throw FormatError( "cannot open " + path.string() );
    return Bytes( std::istreambuf_iterator< char >( in ), std::istreambuf_iterator< char >() );
}

/// Writes to a sibling temp file then renames over `path`.
inline void write_file_atomic( const std::filesystem::path& path, std::span< const std::uint8_t > bytes ) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out( tmp, std::ios::binary | std::ios::trunc );
        if ( !out ) throw FormatError( "cannot write " + path.string() );
        out.write( reinterpret_cast< const char* >( bytes.data() ), static_cast< std::streamsize >( bytes.size() ) );
        if ( !out ) throw FormatError( "write failed for " + path.string() );
    }
    std::error_code ec;
    std::filesystem::rename( tmp, path, ec );
    if ( ec ) {
        std::filesystem::remove( tmp, ec );
        throw FormatError( "cannot move output into place at " + path.string() );
    }
}

inline void write_file_atomic( const std::filesystem::path& path, const std::string& text ) {
    write_file_atomic( path, std::span< const std::uint8_t >( reinterpret_cast< const std::uint8_t* >( text.data() ),
                                                              text.size() ) );
}

} // namespace skydiver::io
