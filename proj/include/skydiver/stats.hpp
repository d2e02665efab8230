#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace skydiver::stats {

/// 1-based ranks in ascending order, ties get the average of their positions.
inline std::vector< double > average_ranks( std::span< const double > values ) {
    const std::size_t n = values.size();
    std::vector< std::size_t > order( n );
    std::iota( order.begin(), order.end(), 0 );
    std::stable_sort( order.begin(), order.end(), [ & ]( std::size_t a, std::size_t b ) { return values[ a ] < values[ b ]; } );
    std::vector< double > ranks( n );
    std::size_t i = 0;
    while ( i < n ) {
        std::size_t j = i;
        while ( j + 1 < n && values[ order[ j + 1 ] ] == values[ order[ i ] ] ) ++j;
        const double avg = 0.5 * static_cast< double >( i + j ) + 1.0;
        for ( std::size_t k = i; k <= j; ++k ) ranks[ order[ k ] ] = avg;
        i = j + 1;
    }
    return ranks;
}

inline std::optional< double > pearson( std::span< const double > a, std::span< const double > b ) {
    const std::size_t n = a.size();
    if ( n < 2 || b.size() != n ) return std::nullopt;
    const double ma = std::accumulate( a.begin(), a.end(), 0.0 ) / static_cast< double >( n );
    const double mb = std::accumulate( b.begin(), b.end(), 0.0 ) / static_cast< double >( n );
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for ( std::size_t i = 0; i < n; ++i ) {
        sab += ( a[ i ] - ma ) * ( b[ i ] - mb );
        saa += ( a[ i ] - ma ) * ( a[ i ] - ma );
        sbb += ( b[ i ] - mb ) * ( b[ i ] - mb );
    }
    if ( saa == 0.0 || sbb == 0.0 ) return std::nullopt;
    return std::clamp( sab / std::sqrt( saa * sbb ), -1.0, 1.0 );
}

/// Spearman rank correlation (Pearson over average ranks). Undefined for
/// fewer than two points or a constant sequence.
inline std::optional< double > spearman( std::span< const double > a, std::span< const double > b ) {
    if ( a.size() < 2 || a.size() != b.size() ) return std::nullopt;
    const auto ra = average_ranks( a );
    const auto rb = average_ranks( b );
    return pearson( ra, rb );
}

/// Quantile with linear interpolation between order statistics, q in [0, 1].
inline double quantile( std::vector< double > values, double q ) {
    if ( values.empty() ) return 0.0;
    std::sort( values.begin(), values.end() );
    const double pos = q * static_cast< double >( values.size() - 1 );
    const auto lo = static_cast< std::size_t >( std::floor( pos ) );
    const auto hi = std::min( lo + 1, values.size() - 1 );
    const double frac = pos - static_cast< double >( lo );
    return values[ lo ] + frac * ( values[ hi ] - values[ lo ] );
}

inline double mean( std::span< const double > values ) {
    if ( values.empty() ) return 0.0;
    return std::accumulate( values.begin(), values.end(), 0.0 ) / static_cast< double >( values.size() );
}

} // namespace skydiver::stats
