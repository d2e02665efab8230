#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skydiver/conv.hpp"
#include "skydiver/error.hpp"
#include "skydiver/forward.hpp"
#include "skydiver/network.hpp"
#include "skydiver/spike_train.hpp"
#include "skydiver/stats.hpp"

// Approximate proportional relation construction: with full zero padding
// (R - 1 per side) and stride 1 every weight meets every input element once,
// so the summed potential increment of output channel n is exactly
// sum_c slice(n, c) * nnz(channel c), i.e. magnitude(n) * nnz(frame) for a
// single input channel or equally active channels. Spike counts then follow
// magnitudes approximately, which lets channel workload be predicted offline.

namespace skydiver {

enum class MagnitudeKind {
    signed_sum,  // plain sum of the filter's weights
    absolute_sum // sum of |w|, a robustness variant for negative-weight regimes
};

inline const char* to_string( MagnitudeKind kind ) {
    return kind == MagnitudeKind::signed_sum ? "signed" : "absolute";
}

/// Sum of all C*R*R weights of filter n (bias excluded), accumulated in
/// double.
inline double filter_magnitude( const LayerSpec& layer, std::size_t n, MagnitudeKind kind = MagnitudeKind::signed_sum ) {
    if ( n >= layer.out_channels )
        throw ConfigError( "filter index " + std::to_string( n ) + " out of range (M = " +
                           std::to_string( layer.out_channels ) + ")" );
    double s = 0.0;
    for ( float w : layer.weights.filter( n ) )
        s += kind == MagnitudeKind::signed_sum ? static_cast< double >( w ) : std::fabs( static_cast< double >( w ) );
    return s;
}

inline std::vector< double > filter_magnitudes( const LayerSpec& layer, MagnitudeKind kind = MagnitudeKind::signed_sum ) {
    std::vector< double > out( layer.out_channels );
    for ( std::size_t n = 0; n < layer.out_channels; ++n ) out[ n ] = filter_magnitude( layer, n, kind );
    return out;
}

/// Full padding and unit stride (dense layers qualify trivially).
inline bool is_aprc_layer( const LayerSpec& layer ) {
    return layer.pad + 1 == layer.kernel_size && layer.stride == 1;
}

inline bool is_aprc_network( const NetworkSpec& net ) {
    return std::all_of( net.layers.begin(), net.layers.end(), []( const LayerSpec& l ) { return is_aprc_layer( l ); } );
}

/// Copy of `net` with every conv layer set to pad = R - 1, stride 1, and
/// spatial sides re-chained (E = H + R - 1). Weights are untouched. A dense
/// layer whose upstream map grows past 1x1 cannot keep its weights and is
/// rejected.
inline NetworkSpec apply_aprc( NetworkSpec net ) {
    validate_network( net );
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        auto& layer = net.layers[ l ];
        if ( l > 0 ) {
            const std::size_t side = net.layers[ l - 1 ].output_side();
            if ( layer.kind == LayerKind::dense && side != 1 )
                throw ConfigError( "layer " + std::to_string( l ) +
                                   ": dense layer cannot follow a map that full padding grows to " +
                                   std::to_string( side ) + "x" + std::to_string( side ) );
            layer.input_side = side;
        }
        if ( layer.kind == LayerKind::conv ) {
            layer.pad = layer.kernel_size - 1;
            layer.stride = 1;
        }
    }
    validate_network( net );
    return net;
}

/// Sum of the R x R slice of filter n that reads input channel c.
inline double slice_magnitude( const LayerSpec& layer, std::size_t n, std::size_t c ) {
    if ( n >= layer.out_channels || c >= layer.in_channels ) throw ConfigError( "slice index out of range" );
    const std::size_t rr = layer.kernel_size * layer.kernel_size;
    double s = 0.0;
    for ( float w : layer.weights.filter( n ).subspan( c * rr, rr ) ) s += static_cast< double >( w );
    return s;
}

/// Per output channel sum over all positions of one timestep's conv_dv.
/// Only defined for fully padded, stride-1 layers, where it equals
/// sum_c slice_magnitude(n, c) * nnz(channel c).
inline std::vector< double > channel_dv_sums( const LayerSpec& layer, std::span< const std::uint8_t > frame ) {
    if ( !is_aprc_layer( layer ) )
        throw ConfigError( "channel_dv_sums requires pad = R - 1 and stride 1 (pad " + std::to_string( layer.pad ) +
                           ", R " + std::to_string( layer.kernel_size ) + ", stride " + std::to_string( layer.stride ) +
                           ")" );
    const auto dv = conv_dv( frame, layer );
    const std::size_t plane = layer.output_side() * layer.output_side();
    std::vector< double > sums( layer.out_channels, 0.0 );
    for ( std::size_t n = 0; n < layer.out_channels; ++n )
        for ( std::size_t p = n * plane; p < ( n + 1 ) * plane; ++p ) sums[ n ] += static_cast< double >( dv[ p ] );
    return sums;
}

/// Predicted relative workload of each input channel of layer l. Channel c
/// of layer l is produced by filter c of layer l - 1, so its weight is that
/// filter's magnitude. Layer 0 has no upstream filter; `input_rates`
/// (measured or user supplied) are returned verbatim.
inline std::vector< double > predict_channel_workload( const NetworkSpec& net, std::size_t l,
                                                       std::span< const double > input_rates = {},
                                                       MagnitudeKind kind = MagnitudeKind::signed_sum ) {
    if ( l >= net.layers.size() )
        throw ConfigError( "layer index " + std::to_string( l ) + " out of range (" +
                           std::to_string( net.layers.size() ) + " layers)" );
    if ( l == 0 ) {
        if ( input_rates.size() != net.layers[ 0 ].in_channels )
            throw ConfigError( "layer 0 prediction needs " + std::to_string( net.layers[ 0 ].in_channels ) +
                               " input channel rates, got " + std::to_string( input_rates.size() ) );
        return { input_rates.begin(), input_rates.end() };
    }
    return filter_magnitudes( net.layers[ l - 1 ], kind );
}

struct ChannelEntry {
    std::size_t channel = 0;
    double magnitude = 0.0;
    std::uint64_t spikes = 0;
    double magnitude_rank = 0.0; // 1 = largest magnitude, ties averaged
};

struct LayerProportionality {
    std::size_t layer = 0;
    std::vector< ChannelEntry > channels;
    /// Spearman between magnitude and spike count; absent with < 2 channels
    /// or a constant column.
    std::optional< double > spearman;
    /// max(spikes/magnitude) / min(spikes/magnitude) - 1 over channels with
    /// positive magnitude and at least one spike; 0 means exactly proportional.
    std::optional< double > max_ratio_deviation;
    bool magnitude_ties = false;
};

struct ProportionalityReport {
    std::vector< LayerProportionality > layers;
};

inline ProportionalityReport proportionality_report( const NetworkSpec& net, const ForwardResult& forward,
                                                     MagnitudeKind kind = MagnitudeKind::signed_sum ) {
    if ( forward.counts.size() != net.layers.size() ) throw ConfigError( "forward result does not match network" );
    ProportionalityReport report;
    for ( std::size_t l = 0; l < net.layers.size(); ++l ) {
        const auto& layer = net.layers[ l ];
        LayerProportionality lp;
        lp.layer = l;
        const auto mags = filter_magnitudes( layer, kind );
        const auto spikes = forward.counts[ l ].channel_totals();

        std::vector< double > neg_mags( mags.size() );
        std::transform( mags.begin(), mags.end(), neg_mags.begin(), []( double m ) { return -m; } );
        const auto ranks = stats::average_ranks( neg_mags );
        for ( std::size_t n = 0; n < layer.out_channels; ++n )
            lp.channels.push_back( { n, mags[ n ], static_cast< std::uint64_t >( spikes[ n ] ), ranks[ n ] } );

        auto sorted = mags;
        std::sort( sorted.begin(), sorted.end() );
        lp.magnitude_ties = std::adjacent_find( sorted.begin(), sorted.end() ) != sorted.end();
        lp.spearman = stats::spearman( mags, spikes );

        double lo = 0.0, hi = 0.0;
        std::size_t used = 0;
        for ( std::size_t n = 0; n < mags.size(); ++n ) {
            if ( mags[ n ] <= 0.0 || spikes[ n ] <= 0.0 ) continue;
            const double r = spikes[ n ] / mags[ n ];
            lo = used == 0 ? r : std::min( lo, r );
            hi = used == 0 ? r : std::max( hi, r );
            ++used;
        }
        if ( used >= 2 ) lp.max_ratio_deviation = hi / lo - 1.0;
        report.layers.push_back( std::move( lp ) );
    }
    return report;
}

inline ProportionalityReport proportionality_report( const NetworkSpec& net, const SpikeTrain& input,
                                                     MagnitudeKind kind = MagnitudeKind::signed_sum ) {
    const auto forward = network_forward( net, input, { .keep_trains = false } );
    return proportionality_report( net, forward, kind );
}

} // namespace skydiver
