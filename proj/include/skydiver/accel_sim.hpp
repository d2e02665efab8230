#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skydiver/aprc.hpp"
#include "skydiver/cbws.hpp"
#include "skydiver/error.hpp"
#include "skydiver/forward.hpp"
#include "skydiver/network.hpp"
#include "skydiver/spike_train.hpp"

// Cycle-accounting model of the accelerator datapath.
//
// Each SPE cluster owns one filter; its N channel-based SPEs share the input
// channels of the layer according to a Partition. An input spike costs one
// R x R accumulation window on the SPE that owns its channel; silent inputs
// cost nothing. All clusters use the same partition, so per-cluster
// accounting collapses to per-SPE-position accounting, scaled by the number
// of filter passes ceil(M / clusters). Layers and timesteps run in sequence;
// a layer-timestep takes as long as its busiest SPE.

namespace skydiver {

struct HwConfig {
    std::size_t clusters = 16;
    std::size_t spes_per_cluster = 4;
    std::size_t streams = 4;
    double clock_hz = 200e6;

    void validate() const {
        if ( clusters == 0 || spes_per_cluster == 0 || streams == 0 )
            throw ConfigError( "hardware config: clusters, SPEs per cluster and streams must be >= 1" );
        if ( !std::isfinite( clock_hz ) || clock_hz <= 0.0 ) throw NumericError( "hardware config: clock must be > 0" );
    }
};

enum class ScheduleKind { baseline, cbws };

/// Where CBWS takes its per-channel weights from.
enum class WeightSource {
    none,      // baseline, contiguous split
    predicted, // filter magnitudes of the previous layer
    measured   // observed per-channel spike counts
};

/// How signed magnitudes become non-negative partition weights.
enum class NegativePolicy { absolute, clamp_zero };

struct Schedule {
    ScheduleKind kind = ScheduleKind::baseline;
    WeightSource source = WeightSource::none;
    bool aprc_net = false;
    std::vector< Partition > layers;

    std::string mode() const {
        std::string m = kind == ScheduleKind::baseline ? "baseline" : "cbws";
        if ( source == WeightSource::measured ) m += "-measured";
        m += aprc_net ? "+aprc" : "";
        return m;
    }
};

struct ScheduleRequest {
    bool use_cbws = false;
    /// Weights from filter magnitudes (layer 0 from `input_rates`). Otherwise
    /// CBWS needs `measured_rates`.
    bool use_aprc_prediction = true;
    /// Per layer, per input channel observed workload.
    std::optional< std::vector< std::vector< double > > > measured_rates;
    /// Layer-0 per-channel input rates for predicted mode.
    std::vector< double > input_rates;
    MagnitudeKind magnitude = MagnitudeKind::signed_sum;
    NegativePolicy negative = NegativePolicy::absolute;
    std::size_t finetune_iterations = default_iterations;
};

namespace detail {

inline std::vector< double > to_partition_weights( std::vector< double > w, NegativePolicy policy ) {
    for ( auto& x : w ) x = policy == NegativePolicy::absolute ? std::fabs( x ) : std::max( x, 0.0 );
    return w;
}

} // namespace detail

/// Builds one partition of each layer's input channels over the N SPEs.
/// Magnitude prediction is allowed on any network; it is only accurate after
/// apply_aprc, which is what the aprc_net tag records.
inline Schedule assign_schedule( const NetworkSpec& net, const HwConfig& hw, const ScheduleRequest& req ) {
    validate_network( net );
    hw.validate();
    Schedule sched;
    sched.aprc_net = is_aprc_network( net );
    sched.kind = req.use_cbws ? ScheduleKind::cbws : ScheduleKind::baseline;
    sched.source = !req.use_cbws             ? WeightSource::none
                   : req.use_aprc_prediction ? WeightSource::predicted
                                             : WeightSource::measured;
    if ( sched.source == WeightSource::measured ) {
        if ( !req.measured_rates ) throw ConfigError( "cbws schedule without prediction needs measured rates" );
        if ( req.measured_rates->size() != net.layers.size() )
            throw ConfigError( "measured rates must cover every layer" );
    }

    const std::size_t n = hw.spes_per_cluster;
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        const std::size_t c = net.layers[ l ].in_channels;
        std::vector< double > weights;
        switch ( sched.source ) {
        case WeightSource::none:
            weights.assign( c, 1.0 );
            break;
        case WeightSource::predicted:
            if ( l == 0 && req.input_rates.empty() ) {
                if ( !req.measured_rates ) throw ConfigError( "layer 0 prediction needs input channel rates" );
                weights = ( *req.measured_rates )[ 0 ];
            } else {
                weights = predict_channel_workload( net, l, req.input_rates, req.magnitude );
            }
            break;
        case WeightSource::measured:
            weights = ( *req.measured_rates )[ l ];
            break;
        }
        if ( weights.size() != c )
            throw ConfigError( "layer " + std::to_string( l ) + ": " + std::to_string( weights.size() ) +
                               " channel weights for " + std::to_string( c ) + " channels" );
        weights = detail::to_partition_weights( std::move( weights ), req.negative );
        sched.layers.push_back( req.use_cbws ? cbws_partition( weights, n, req.finetune_iterations )
                                             : contiguous_partition( weights, n ) );
    }
    return sched;
}

/// Busy cycles of one layer, [timestep][spe].
struct LayerActivity {
    std::size_t kernel_size = 1;
    std::size_t filter_passes = 1;
    std::size_t timesteps = 0;
    std::size_t spes = 0;
    std::vector< std::uint64_t > busy;    // t * spes + j
    std::vector< std::uint64_t > latency; // per t, max over SPEs
    std::uint64_t synaptic_ops = 0;       // input spikes * R * R * M

    std::uint64_t busy_at( std::size_t t, std::size_t j ) const { return busy[ t * spes + j ]; }
    std::uint64_t total_work() const {
        std::uint64_t s = 0;
        for ( auto b : busy ) s += b;
        return s;
    }
    std::uint64_t total_latency() const {
        std::uint64_t s = 0;
        for ( auto v : latency ) s += v;
        return s;
    }
};

struct SimReport {
    std::string net_name;
    std::string mode;
    std::uint64_t seed = 0;
    std::size_t spes = 0;
    std::size_t streams = 1;
    std::vector< LayerActivity > layers;

    /// Sequential cycles of one frame before the stream split.
    std::uint64_t total_cycles() const {
        std::uint64_t s = 0;
        for ( const auto& l : layers ) s += l.total_latency();
        return s;
    }
    std::uint64_t total_work() const {
        std::uint64_t s = 0;
        for ( const auto& l : layers ) s += l.total_work();
        return s;
    }
    std::uint64_t synaptic_ops() const {
        std::uint64_t s = 0;
        for ( const auto& l : layers ) s += l.synaptic_ops;
        return s;
    }
};

inline void check_schedule( const NetworkSpec& net, const Schedule& sched, const HwConfig& hw ) {
    if ( sched.layers.size() != net.layers.size() )
        throw ConfigError( "schedule has " + std::to_string( sched.layers.size() ) + " layers, network has " +
                           std::to_string( net.layers.size() ) );
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        const auto& p = sched.layers[ l ];
        if ( p.groups() != hw.spes_per_cluster )
            throw ConfigError( "layer " + std::to_string( l ) + ": partition has " + std::to_string( p.groups() ) +
                               " groups, hardware has " + std::to_string( hw.spes_per_cluster ) + " SPEs per cluster" );
        std::vector< char > seen( net.layers[ l ].in_channels, 0 );
        std::size_t count = 0;
        for ( const auto& g : p.sublists )
            for ( auto c : g ) {
                if ( c >= seen.size() || seen[ c ] )
                    throw ConfigError( "layer " + std::to_string( l ) + ": partition is not an exact cover of channels" );
                seen[ c ] = 1;
                ++count;
            }
        if ( count != seen.size() )
            throw ConfigError( "layer " + std::to_string( l ) + ": partition is not an exact cover of channels" );
    }
}

/// Cycle accounting from already-computed spike counts.
inline SimReport simulate_counts( const NetworkSpec& net, const ForwardResult& forward, const Schedule& sched,
                                  const HwConfig& hw ) {
    hw.validate();
    check_schedule( net, sched, hw );
    if ( forward.counts.size() != net.layers.size() ) throw ConfigError( "forward result does not match network" );

    SimReport report;
    report.net_name = net.name;
    report.mode = sched.mode();
    report.spes = hw.spes_per_cluster;
    report.streams = hw.streams;
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        const auto& layer = net.layers[ l ];
        const auto& in = l == 0 ? forward.input_counts : forward.counts[ l - 1 ];
        if ( in.channels != layer.in_channels ) throw ConfigError( "spike counts do not match layer channels" );
        LayerActivity act;
        act.kernel_size = layer.kernel_size;
        act.filter_passes = ( layer.out_channels + hw.clusters - 1 ) / hw.clusters;
        act.timesteps = in.timesteps;
        act.spes = hw.spes_per_cluster;
        act.busy.assign( act.timesteps * act.spes, 0 );
        act.latency.assign( act.timesteps, 0 );
        const std::uint64_t window = static_cast< std::uint64_t >( layer.kernel_size ) * layer.kernel_size;
        for ( std::size_t t = 0; t < act.timesteps; ++t ) {
            for ( std::size_t j = 0; j < act.spes; ++j ) {
                std::uint64_t spikes = 0;
                for ( auto c : sched.layers[ l ].sublists[ j ] ) spikes += in.at( t, c );
                act.busy[ t * act.spes + j ] = spikes * window * act.filter_passes;
                act.synaptic_ops += spikes * window * layer.out_channels;
            }
            act.latency[ t ] = *std::max_element( act.busy.begin() + static_cast< std::ptrdiff_t >( t * act.spes ),
                                                  act.busy.begin() + static_cast< std::ptrdiff_t >( ( t + 1 ) * act.spes ) );
        }
        report.layers.push_back( std::move( act ) );
    }
    return report;
}

/// Runs the functional model on `input` and accounts cycles under `sched`.
inline SimReport simulate( const NetworkSpec& net, const SpikeTrain& input, const Schedule& sched, const HwConfig& hw ) {
    check_schedule( net, sched, hw );
    const auto forward = network_forward( net, input, { .keep_trains = false } );
    return simulate_counts( net, forward, sched, hw );
}

/// Total work over N * (sum of per-timestep maxima): ideal over actual
/// latency. Absent when the layer did no work.
inline std::optional< double > balance_ratio( const SimReport& report, std::size_t layer ) {
    if ( layer >= report.layers.size() ) throw ConfigError( "layer index out of range" );
    const auto& act = report.layers[ layer ];
    const std::uint64_t latency = act.total_latency();
    if ( latency == 0 ) return std::nullopt;
    return static_cast< double >( act.total_work() ) / ( static_cast< double >( act.spes ) * static_cast< double >( latency ) );
}

/// Average over layers that did work.
inline std::optional< double > mean_balance_ratio( const SimReport& report ) {
    double sum = 0.0;
    std::size_t count = 0;
    for ( std::size_t l = 0; l < report.layers.size(); ++l )
        if ( auto r = balance_ratio( report, l ) ) {
            sum += *r;
            ++count;
        }
    if ( count == 0 ) return std::nullopt;
    return sum / static_cast< double >( count );
}

/// Model estimate, not a silicon measurement.
struct Throughput {
    double cycles_per_frame = 0.0; // after the stream split
    double fps = 0.0;
    double sops_per_second = 0.0;
};

inline Throughput throughput_estimate( const SimReport& report, const HwConfig& hw ) {
    hw.validate();
    const auto cycles = report.total_cycles();
    if ( cycles == 0 ) throw NumericError( "throughput undefined for a zero-cycle run" );
    Throughput t;
    t.cycles_per_frame = static_cast< double >( cycles ) / static_cast< double >( hw.streams );
    t.fps = hw.clock_hz / t.cycles_per_frame;
    t.sops_per_second = static_cast< double >( report.synaptic_ops() ) * hw.clock_hz / t.cycles_per_frame;
    return t;
}

} // namespace skydiver
