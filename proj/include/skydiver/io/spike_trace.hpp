#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>

#include "skydiver/error.hpp"
#include "skydiver/io/binary.hpp"
#include "skydiver/spike_train.hpp"

// Spike trace layout:
//   T, C, H, W       4 x uint32 little-endian
//   payload          for each (t, c, y): ceil(W / 8) bytes holding x = 0..W-1,
//                    least significant bit first; padding bits are zero
// File length is exactly 16 + T*C*H*ceil(W/8).

namespace skydiver::io {

inline constexpr std::size_t trace_header_bytes = 16;

inline std::optional< std::uint64_t > trace_payload_bytes( std::uint64_t t, std::uint64_t c, std::uint64_t h,
                                                           std::uint64_t w ) {
    auto n = checked_mul( t, c );
    if ( n ) n = checked_mul( *n, h );
    if ( n ) n = checked_mul( *n, ( w + 7 ) / 8 );
    return n;
}

inline Bytes encode_spike_trace( const SpikeTrain& train ) {
    const auto& s = train.shape();
    for ( auto d : { train.timesteps(), s.channels, s.height, s.width } )
        if ( d > std::numeric_limits< std::uint32_t >::max() ) throw FormatError( "spike trace dimension exceeds 32 bits" );
    Bytes out;
    put_u32_le( out, static_cast< std::uint32_t >( train.timesteps() ) );
    put_u32_le( out, static_cast< std::uint32_t >( s.channels ) );
    put_u32_le( out, static_cast< std::uint32_t >( s.height ) );
    put_u32_le( out, static_cast< std::uint32_t >( s.width ) );
    const std::size_t row_bytes = ( s.width + 7 ) / 8;
    for ( std::size_t t = 0; t < train.timesteps(); ++t )
        for ( std::size_t c = 0; c < s.channels; ++c )
            for ( std::size_t y = 0; y < s.height; ++y ) {
                const std::size_t base = out.size();
                out.resize( base + row_bytes, 0 );
                for ( std::size_t x = 0; x < s.width; ++x )
                    if ( train.at( t, c, y, x ) ) out[ base + x / 8 ] |= static_cast< std::uint8_t >( 1u << ( x % 8 ) );
            }
    return out;
}

inline SpikeTrain decode_spike_trace( std::span< const std::uint8_t > bytes ) {
    Reader reader( bytes, "spike trace" );
    const std::uint64_t t = reader.u32_le(), c = reader.u32_le(), h = reader.u32_le(), w = reader.u32_le();
    const auto payload = trace_payload_bytes( t, c, h, w );
    if ( !payload || *payload > bytes.size() ) throw FormatError( "spike trace: header dimensions exceed file length" );
    const auto expected = trace_header_bytes + *payload;
    if ( bytes.size() != expected )
        throw FormatError( "spike trace: length mismatch, header implies " + std::to_string( expected ) + " bytes, got " +
                           std::to_string( bytes.size() ) );
    const FrameShape shape{ c, h, w };
    SpikeTrain train( t, shape );
    if ( t == 0 || c == 0 || h == 0 || w == 0 ) return train;
    const std::size_t row_bytes = ( w + 7 ) / 8;
    for ( std::size_t ti = 0; ti < t; ++ti )
        for ( std::size_t ci = 0; ci < c; ++ci )
            for ( std::size_t y = 0; y < h; ++y ) {
                const auto row = reader.take( row_bytes );
                for ( std::size_t x = 0; x < w; ++x )
                    if ( row[ x / 8 ] >> ( x % 8 ) & 1u ) train.set( ti, ci, y, x, true );
                if ( w % 8 != 0 && ( row[ row_bytes - 1 ] >> ( w % 8 ) ) != 0 )
                    throw FormatError( "spike trace: non-zero padding bits" );
            }
    return train;
}

inline void save_spike_trace( const SpikeTrain& train, const std::filesystem::path& path ) {
    write_file_atomic( path, encode_spike_trace( train ) );
}

inline SpikeTrain load_spike_trace( const std::filesystem::path& path ) { return decode_spike_trace( read_file( path ) ); }

} // namespace skydiver::io
