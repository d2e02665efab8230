#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skydiver/accel_sim.hpp"
#include "skydiver/aprc.hpp"
#include "skydiver/cbws.hpp"
#include "skydiver/error.hpp"
#include "skydiver/io/binary.hpp"

// Report serialisation. CSV numbers use fixed 6-decimal formatting and
// absent values are written as empty fields.

namespace skydiver::io {

inline std::string fixed6( double v ) {
    char buf[ 64 ];
    std::snprintf( buf, sizeof buf, "%.6f", v );
    return buf;
}

inline std::string fixed6( const std::optional< double >& v ) { return v ? fixed6( *v ) : std::string(); }

enum class ReportFormat { json, csv };

inline nlohmann::ordered_json report_to_json( const SimReport& report ) {
    nlohmann::ordered_json doc;
    doc[ "net" ] = report.net_name;
    doc[ "mode" ] = report.mode;
    doc[ "seed" ] = report.seed;
    doc[ "spes" ] = report.spes;
    doc[ "streams" ] = report.streams;
    doc[ "total_cycles" ] = report.total_cycles();
    doc[ "total_work" ] = report.total_work();
    doc[ "synaptic_ops" ] = report.synaptic_ops();
    const auto mean = mean_balance_ratio( report );
    doc[ "mean_balance_ratio" ] = mean ? nlohmann::ordered_json( *mean ) : nlohmann::ordered_json();
    auto layers = nlohmann::ordered_json::array();
    for ( std::size_t l = 0; l < report.layers.size(); ++l ) {
        const auto& act = report.layers[ l ];
        nlohmann::ordered_json j;
        j[ "layer" ] = l;
        j[ "kernel_size" ] = act.kernel_size;
        j[ "filter_passes" ] = act.filter_passes;
        j[ "timesteps" ] = act.timesteps;
        const auto br = balance_ratio( report, l );
        j[ "balance_ratio" ] = br ? nlohmann::ordered_json( *br ) : nlohmann::ordered_json();
        j[ "latency_cycles" ] = act.total_latency();
        j[ "work_cycles" ] = act.total_work();
        j[ "synaptic_ops" ] = act.synaptic_ops;
        auto busy = nlohmann::ordered_json::array();
        for ( std::size_t t = 0; t < act.timesteps; ++t ) {
            auto row = nlohmann::ordered_json::array();
            for ( std::size_t s = 0; s < act.spes; ++s ) row.push_back( act.busy_at( t, s ) );
            busy.push_back( std::move( row ) );
        }
        j[ "busy" ] = std::move( busy );
        layers.push_back( std::move( j ) );
    }
    doc[ "layers" ] = std::move( layers );
    return doc;
}

inline constexpr const char* summary_csv_header = "layer,mode,balance_ratio,latency_cycles";

/// Per-layer summary: layer, mode, balance_ratio, latency_cycles.
inline std::string report_summary_csv( const SimReport& report ) {
    std::string out = std::string( summary_csv_header ) + "\n";
    for ( std::size_t l = 0; l < report.layers.size(); ++l )
        out += std::to_string( l ) + "," + report.mode + "," + fixed6( balance_ratio( report, l ) ) + "," +
               std::to_string( report.layers[ l ].total_latency() ) + "\n";
    return out;
}

struct SummaryRow {
    std::size_t layer = 0;
    std::string mode;
    std::optional< double > balance_ratio;
    std::uint64_t latency_cycles = 0;
};

inline std::vector< std::string > split_csv_line( const std::string& line ) {
    std::vector< std::string > fields;
    std::string cur;
    for ( char ch : line ) {
        if ( ch == ',' ) {
            fields.push_back( cur );
            cur.clear();
        } else if ( ch != '\r' ) {
            cur += ch;
        }
    }
    fields.push_back( cur );
    return fields;
}

inline std::vector< SummaryRow > parse_summary_csv( const std::string& text ) {
    std::istringstream in( text );
    std::string line;
    if ( !std::getline( in, line ) || line != summary_csv_header ) throw FormatError( "summary CSV: unexpected header" );
    std::vector< SummaryRow > rows;
    while ( std::getline( in, line ) ) {
        if ( line.empty() ) continue;
        const auto f = split_csv_line( line );
        if ( f.size() != 4 ) throw FormatError( "summary CSV: expected 4 fields in '" + line + "'" );
        try {
            SummaryRow r;
            r.layer = std::stoul( f[ 0 ] );
            r.mode = f[ 1 ];
            if ( !f[ 2 ].empty() ) r.balance_ratio = std::stod( f[ 2 ] );
            r.latency_cycles = std::stoull( f[ 3 ] );
            rows.push_back( std::move( r ) );
        } catch ( const std::logic_error& ) {
            throw FormatError( "summary CSV: bad number in '" + line + "'" );
        }
    }
    return rows;
}

inline std::string format_report( const SimReport& report, ReportFormat format ) {
    return format == ReportFormat::json ? report_to_json( report ).dump( 2 ) + "\n" : report_summary_csv( report );
}

inline void write_report( const SimReport& report, ReportFormat format, const std::filesystem::path& path ) {
    write_file_atomic( path, format_report( report, format ) );
}

/// layer, channel, magnitude, spikes, rank (1 = largest magnitude).
inline std::string proportionality_csv( const ProportionalityReport& report ) {
    std::string out = "layer,channel,magnitude,spikes,rank\n";
    for ( const auto& lp : report.layers )
        for ( const auto& e : lp.channels )
            out += std::to_string( lp.layer ) + "," + std::to_string( e.channel ) + "," + fixed6( e.magnitude ) + "," +
                   std::to_string( e.spikes ) + "," + fixed6( e.magnitude_rank ) + "\n";
    return out;
}

/// layer, spearman, max_ratio_deviation, magnitude_ties.
inline std::string proportionality_summary_csv( const ProportionalityReport& report ) {
    std::string out = "layer,spearman,max_ratio_deviation,magnitude_ties\n";
    for ( const auto& lp : report.layers )
        out += std::to_string( lp.layer ) + "," + fixed6( lp.spearman ) + "," + fixed6( lp.max_ratio_deviation ) + "," +
               ( lp.magnitude_ties ? "1" : "0" ) + "\n";
    return out;
}

/// {"mode": ..., "layers": [{"layer": l, "sublists": [[c, ...], ...]}]}
inline nlohmann::ordered_json schedule_to_json( const Schedule& sched ) {
    nlohmann::ordered_json doc;
    doc[ "mode" ] = sched.mode();
    auto layers = nlohmann::ordered_json::array();
    for ( std::size_t l = 0; l < sched.layers.size(); ++l )
        layers.push_back( { { "layer", l }, { "sublists", sched.layers[ l ].sublists } } );
    doc[ "layers" ] = std::move( layers );
    return doc;
}

/// Partitions per layer from schedule JSON; sums are left for the caller.
inline std::vector< Partition > partitions_from_json( const std::string& text ) {
    try {
        const auto doc = nlohmann::json::parse( text );
        std::vector< Partition > out;
        for ( const auto& l : doc.at( "layers" ) ) {
            Partition p;
            p.sublists = l.at( "sublists" ).get< std::vector< std::vector< std::size_t > > >();
            p.sums.assign( p.sublists.size(), 0.0 );
            out.push_back( std::move( p ) );
        }
        return out;
    } catch ( const nlohmann::json::exception& e ) {
        throw FormatError( std::string( "schedule JSON: " ) + e.what() );
    }
}

} // namespace skydiver::io
