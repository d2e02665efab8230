#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "skydiver/accel_sim.hpp"
#include "skydiver/aprc.hpp"
#include "skydiver/encode.hpp"
#include "skydiver/error.hpp"
#include "skydiver/forward.hpp"
#include "skydiver/io/binary.hpp"
#include "skydiver/io/idx.hpp"
#include "skydiver/io/report.hpp"
#include "skydiver/io/spike_trace.hpp"
#include "skydiver/stats.hpp"
#include "skydiver/topology.hpp"

// Batch experiments behind the CLI: the schedule x APRC comparison matrix,
// seed sweeps over synthetic nets, and sparsity profiles. Work is spread with
// std::async; results are always gathered in a fixed order.

namespace skydiver {

// ---- inputs ---------------------------------------------------------------

struct InputOptions {
    /// Spike trace, IDX image file, or empty for a synthetic image.
    std::optional< std::filesystem::path > path;
    /// Encoding length (default 50); for a spike trace only checked if set.
    std::optional< std::size_t > timesteps;
    std::uint64_t seed = 0;
    std::size_t image_index = 0;
    double intensity = 0.25;
};

/// IDX files are recognised by their magic and rate-coded; anything else is
/// read as a spike trace.
inline SpikeTrain load_input( const NetworkSpec& net, const InputOptions& opts ) {
    validate_network( net );
    if ( opts.timesteps == std::size_t{ 0 } ) throw ConfigError( "timesteps must be >= 1" );
    const std::size_t T = opts.timesteps.value_or( 50 );
    const auto shape = input_shape( net.layers.front() );
    if ( !opts.path ) return rate_encode( synthetic_image( shape, opts.seed, opts.intensity ), T, opts.seed + 1 );

    const auto bytes = io::read_file( *opts.path );
    if ( bytes.size() >= 4 && bytes[ 0 ] == 0 && bytes[ 1 ] == 0 && bytes[ 2 ] == 8 && bytes[ 3 ] == 3 ) {
        auto images = io::parse_idx_images( bytes, opts.image_index + 1 );
        if ( images.size() <= opts.image_index )
            throw FormatError( "IDX file holds " + std::to_string( images.size() ) + " images, index " +
                               std::to_string( opts.image_index ) + " requested" );
        const auto& img = images[ opts.image_index ];
        if ( img.shape != shape )
            throw ConfigError( "IDX image is " + std::to_string( img.shape.height ) + "x" + std::to_string( img.shape.width ) +
                               ", network expects " + std::to_string( shape.channels ) + " channel(s) of " +
                               std::to_string( shape.height ) + "x" + std::to_string( shape.width ) );
        return rate_encode( img, T, opts.seed );
    }
    auto train = io::decode_spike_trace( bytes );
    if ( train.shape() != shape ) throw ConfigError( "spike trace shape does not match layer 0 input" );
    if ( opts.timesteps && train.timesteps() != *opts.timesteps )
        throw ConfigError( "spike trace has " + std::to_string( train.timesteps() ) + " timesteps, " +
                           std::to_string( *opts.timesteps ) + " requested" );
    return train;
}

// ---- comparison matrix ----------------------------------------------------

struct ModeSpec {
    bool cbws = false;
    bool aprc = false;
};

inline constexpr std::array< ModeSpec, 4 > matrix_modes{ { { false, false }, { true, false }, { false, true }, { true, true } } };

struct ScheduleOptions {
    MagnitudeKind magnitude = MagnitudeKind::signed_sum;
    NegativePolicy negative = NegativePolicy::absolute;
    std::size_t finetune_iterations = default_iterations;
};

struct ModeRun {
    ModeSpec spec;
    Schedule schedule;
    SimReport report;
    Throughput throughput;
};

/// Layer-0 CBWS weights come from the observed input channel totals.
inline ModeRun run_mode( const NetworkSpec& net, const ForwardResult& forward, const HwConfig& hw, ModeSpec spec,
                         const ScheduleOptions& opts ) {
    ScheduleRequest req;
    req.use_cbws = spec.cbws;
    req.input_rates = forward.input_counts.channel_totals();
    req.magnitude = opts.magnitude;
    req.negative = opts.negative;
    req.finetune_iterations = opts.finetune_iterations;
    ModeRun run;
    run.spec = spec;
    run.schedule = assign_schedule( net, hw, req );
    run.report = simulate_counts( net, forward, run.schedule, hw );
    if ( run.report.total_cycles() > 0 ) run.throughput = throughput_estimate( run.report, hw );
    return run;
}

struct CompareResult {
    std::vector< ModeRun > runs; // fixed order: baseline, cbws, then the +aprc pair
};

/// Runs `modes` on `net` (aprc modes use apply_aprc(net)). One forward pass
/// per distinct network.
inline CompareResult run_compare( const NetworkSpec& net, const SpikeTrain& input, const HwConfig& hw,
                                  const std::vector< ModeSpec >& modes, const ScheduleOptions& opts = {},
                                  std::uint64_t seed = 0 ) {
    validate_network( net );
    hw.validate();
    const auto aprc_net = apply_aprc( net );
    auto forward_of = [ & ]( const NetworkSpec& n ) { return network_forward( n, input, { .keep_trains = false } ); };

    bool need_plain = false, need_aprc = false;
    for ( const auto& m : modes ) ( m.aprc ? need_aprc : need_plain ) = true;
    std::future< ForwardResult > plain_f, aprc_f;
    if ( need_plain ) plain_f = std::async( std::launch::async, forward_of, std::cref( net ) );
    if ( need_aprc ) aprc_f = std::async( std::launch::async, forward_of, std::cref( aprc_net ) );
    const ForwardResult plain = need_plain ? plain_f.get() : ForwardResult{};
    const ForwardResult aprc = need_aprc ? aprc_f.get() : ForwardResult{};

    CompareResult result;
    for ( const auto& m : modes ) {
        auto run = run_mode( m.aprc ? aprc_net : net, m.aprc ? aprc : plain, hw, m, opts );
        run.report.seed = seed;
        result.runs.push_back( std::move( run ) );
    }
    return result;
}

namespace detail {

inline const ModeRun* find_run( const CompareResult& r, ModeSpec spec ) {
    for ( const auto& run : r.runs )
        if ( run.spec.cbws == spec.cbws && run.spec.aprc == spec.aprc ) return &run;
    return nullptr;
}

inline std::optional< double > ratio( std::uint64_t num, std::uint64_t den ) {
    if ( den == 0 ) return std::nullopt;
    return static_cast< double >( num ) / static_cast< double >( den );
}

// baseline latency / cbws latency for the pair sharing `aprc`; layer SIZE_MAX
// means whole-frame cycles.
inline std::optional< double > pair_ratio( const CompareResult& r, bool aprc, std::size_t layer ) {
    const auto* base = find_run( r, { false, aprc } );
    const auto* cb = find_run( r, { true, aprc } );
    if ( !base || !cb ) return std::nullopt;
    if ( layer == SIZE_MAX ) return ratio( base->report.total_cycles(), cb->report.total_cycles() );
    return ratio( base->report.layers[ layer ].total_latency(), cb->report.layers[ layer ].total_latency() );
}

inline std::string opt_fps( const ModeRun& run ) {
    return run.report.total_cycles() > 0 ? io::fixed6( run.throughput.fps ) : std::string();
}

} // namespace detail

/// layer, mode, balance_ratio, latency_cycles, total_work, est_fps, throughput_ratio
inline std::string compare_csv( const CompareResult& r ) {
    std::string out = "layer,mode,balance_ratio,latency_cycles,total_work,est_fps,throughput_ratio\n";
    if ( r.runs.empty() ) return out;
    const std::size_t layers = r.runs.front().report.layers.size();
    for ( std::size_t l = 0; l < layers; ++l )
        for ( const auto& run : r.runs ) {
            const auto& act = run.report.layers[ l ];
            out += std::to_string( l ) + "," + run.report.mode + "," + io::fixed6( balance_ratio( run.report, l ) ) + "," +
                   std::to_string( act.total_latency() ) + "," + std::to_string( act.total_work() ) + "," +
                   detail::opt_fps( run ) + "," + io::fixed6( detail::pair_ratio( r, run.spec.aprc, l ) ) + "\n";
        }
    return out;
}

/// mode, mean_balance_ratio, total_cycles, total_work, est_fps, est_sops, throughput_ratio
inline std::string compare_summary_csv( const CompareResult& r ) {
    std::string out = "mode,mean_balance_ratio,total_cycles,total_work,est_fps,est_sops,throughput_ratio\n";
    for ( const auto& run : r.runs ) {
        const bool ran = run.report.total_cycles() > 0;
        out += run.report.mode + "," + io::fixed6( mean_balance_ratio( run.report ) ) + "," +
               std::to_string( run.report.total_cycles() ) + "," + std::to_string( run.report.total_work() ) + "," +
               detail::opt_fps( run ) + "," + ( ran ? io::fixed6( run.throughput.sops_per_second ) : std::string() ) +
               "," + io::fixed6( detail::pair_ratio( r, run.spec.aprc, SIZE_MAX ) ) + "\n";
    }
    return out;
}

// ---- seed sweep -----------------------------------------------------------

struct SweepConfig {
    std::string topology = "16x16x3-8C3-16C3-32C3-32C3-16C3-1C3";
    std::size_t seeds = 20;
    std::uint64_t first_seed = 0;
    std::size_t timesteps = 50;
    double intensity = 0.25;
    GenerateOptions generate;
    HwConfig hw;
    ScheduleOptions schedule;
};

struct SweepRow {
    std::uint64_t seed = 0;
    std::array< std::optional< double >, 4 > mean_balance; // matrix_modes order
    std::array< std::uint64_t, 4 > cycles{};
    std::array< std::uint64_t, 4 > work{};
};

/// Seed s builds net 1000+s, image 7+s and encoding 99+s.
inline SweepRow sweep_one( const SweepConfig& cfg, const Topology& topo, std::uint64_t s ) {
    const auto net = generate_network( topo, 1000 + s, cfg.generate );
    const auto img = synthetic_image( input_shape( net.layers.front() ), 7 + s, cfg.intensity );
    const auto input = rate_encode( img, cfg.timesteps, 99 + s );
    const auto r = run_compare( net, input, cfg.hw, { matrix_modes.begin(), matrix_modes.end() }, cfg.schedule, s );
    SweepRow row;
    row.seed = s;
    for ( std::size_t k = 0; k < 4; ++k ) {
        row.mean_balance[ k ] = mean_balance_ratio( r.runs[ k ].report );
        row.cycles[ k ] = r.runs[ k ].report.total_cycles();
        row.work[ k ] = r.runs[ k ].report.total_work();
    }
    return row;
}

inline std::vector< SweepRow > run_sweep( const SweepConfig& cfg ) {
    if ( cfg.timesteps == 0 ) throw ConfigError( "timesteps must be >= 1" );
    cfg.hw.validate();
    const auto topo = parse_topology( cfg.topology );
    std::vector< std::future< SweepRow > > jobs;
    for ( std::size_t i = 0; i < cfg.seeds; ++i )
        jobs.push_back( std::async( std::launch::async, sweep_one, std::cref( cfg ), std::cref( topo ), cfg.first_seed + i ) );
    std::vector< SweepRow > rows;
    for ( auto& j : jobs ) rows.push_back( j.get() );
    return rows;
}

/// seed, mode, mean_balance_ratio, total_cycles, total_work
inline std::string sweep_csv( const std::vector< SweepRow >& rows ) {
    static const char* names[ 4 ] = { "baseline", "cbws", "baseline+aprc", "cbws+aprc" };
    std::string out = "seed,mode,mean_balance_ratio,total_cycles,total_work\n";
    for ( const auto& row : rows )
        for ( std::size_t k = 0; k < 4; ++k )
            out += std::to_string( row.seed ) + "," + names[ k ] + "," + io::fixed6( row.mean_balance[ k ] ) + "," +
                   std::to_string( row.cycles[ k ] ) + "," + std::to_string( row.work[ k ] ) + "\n";
    return out;
}

// ---- sparsity profile -----------------------------------------------------

struct ChannelProfile {
    std::size_t layer = 0;
    std::size_t channel = 0;
    std::uint64_t spikes = 0;
    std::array< double, 5 > quartiles{}; // min, q25, median, q75, max of per-timestep counts
};

struct LayerProfile {
    std::size_t layer = 0;
    std::uint64_t spikes = 0;
    std::uint64_t slots = 0; // neurons * timesteps
    double spikerate = 0.0;
    double input_spikerate = 0.0;
};

struct Profile {
    double input_spikerate = 0.0;
    std::vector< LayerProfile > layers;
    std::vector< ChannelProfile > channels;
};

inline Profile profile_network( const NetworkSpec& net, const SpikeTrain& input ) {
    const auto fw = network_forward( net, input, { .keep_trains = false } );
    Profile p;
    p.input_spikerate = input.spikerate();
    double prev_rate = p.input_spikerate;
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        const auto& counts = fw.counts[ l ];
        LayerProfile lp;
        lp.layer = l;
        lp.spikes = counts.total();
        lp.slots = static_cast< std::uint64_t >( net.layers[ l ].output_size() ) * counts.timesteps;
        lp.spikerate = lp.slots ? static_cast< double >( lp.spikes ) / static_cast< double >( lp.slots ) : 0.0;
        lp.input_spikerate = prev_rate;
        prev_rate = lp.spikerate;
        p.layers.push_back( lp );
        for ( std::size_t c = 0; c < counts.channels; ++c ) {
            ChannelProfile cp;
            cp.layer = l;
            cp.channel = c;
            cp.spikes = counts.channel_total( c );
            std::vector< double > per_t( counts.timesteps );
            for ( std::size_t t = 0; t < counts.timesteps; ++t ) per_t[ t ] = counts.at( t, c );
            if ( !per_t.empty() )
                for ( std::size_t q = 0; q < 5; ++q ) cp.quartiles[ q ] = stats::quantile( per_t, 0.25 * q );
            p.channels.push_back( cp );
        }
    }
    return p;
}

/// layer, spikerate, input_spikerate, spikes, slots
inline std::string profile_layers_csv( const Profile& p ) {
    std::string out = "layer,spikerate,input_spikerate,spikes,slots\n";
    for ( const auto& l : p.layers )
        out += std::to_string( l.layer ) + "," + io::fixed6( l.spikerate ) + "," + io::fixed6( l.input_spikerate ) + "," +
               std::to_string( l.spikes ) + "," + std::to_string( l.slots ) + "\n";
    return out;
}

/// layer, channel, spikes, min, q25, median, q75, max
inline std::string profile_channels_csv( const Profile& p ) {
    std::string out = "layer,channel,spikes,min,q25,median,q75,max\n";
    for ( const auto& c : p.channels ) {
        out += std::to_string( c.layer ) + "," + std::to_string( c.channel ) + "," + std::to_string( c.spikes );
        for ( double q : c.quartiles ) out += "," + io::fixed6( q );
        out += "\n";
    }
    return out;
}

} // namespace skydiver
