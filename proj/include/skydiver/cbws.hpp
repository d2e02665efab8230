#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "skydiver/error.hpp"

// Channel-balanced workload schedule.
//
// Splits K weighted items (input channels ranked by predicted workload) into
// N groups of near-equal weight:
//
//   1. sort descending (ties: lower index first)
//   2. cut into blocks of N and reverse every odd block (serpentine)
//   3. sublist j takes position j of every block
//   4. fine-tune: while diff/2 exceeds the smallest element of the heaviest
//      sublist, move that element to the lightest sublist
//
// When N does not divide K the list is padded with zero-weight phantom items
// that are dropped after seeding.

namespace skydiver {

struct Item {
    static constexpr std::size_t phantom = std::numeric_limits< std::size_t >::max();

    std::size_t index = 0;
    double weight = 0.0;

    bool is_phantom() const { return index == phantom; }
    friend bool operator==( const Item&, const Item& ) = default;
};

/// N disjoint sublists of item indices together covering 0..K-1.
struct Partition {
    std::vector< std::vector< std::size_t > > sublists;
    std::vector< double > sums;

    std::size_t groups() const { return sublists.size(); }
    bool has_empty() const {
        return std::any_of( sublists.begin(), sublists.end(), []( const auto& s ) { return s.empty(); } );
    }
    double max_sum() const { return sums.empty() ? 0.0 : *std::max_element( sums.begin(), sums.end() ); }

    friend bool operator==( const Partition&, const Partition& ) = default;
};

namespace detail {

inline void check_groups( std::size_t n ) {
    if ( n == 0 ) throw ConfigError( "number of groups must be >= 1" );
}

inline void check_weights( std::span< const double > weights ) {
    if ( weights.empty() ) throw ConfigError( "need at least one item" );
    for ( double w : weights ) {
        if ( !std::isfinite( w ) ) throw NumericError( "item weights must be finite" );
        if ( w < 0.0 ) throw NumericError( "item weights must be non-negative" );
    }
}

} // namespace detail

/// Sum of each sublist in its stored order.
inline void recompute_sums( Partition& p, std::span< const double > weights ) {
    p.sums.assign( p.sublists.size(), 0.0 );
    for ( std::size_t j = 0; j < p.sublists.size(); ++j )
        for ( auto i : p.sublists[ j ] ) p.sums[ j ] += weights[ i ];
}

/// True when the sublists exactly cover 0..K-1 and the sums are current.
inline bool is_valid_partition( const Partition& p, std::span< const double > weights ) {
    if ( p.sums.size() != p.sublists.size() ) return false;
    std::vector< char > seen( weights.size(), 0 );
    std::size_t count = 0;
    for ( std::size_t j = 0; j < p.sublists.size(); ++j ) {
        double s = 0.0;
        for ( auto i : p.sublists[ j ] ) {
            if ( i >= weights.size() || seen[ i ] ) return false;
            seen[ i ] = 1;
            ++count;
            s += weights[ i ];
        }
        if ( s != p.sums[ j ] ) return false;
    }
    return count == weights.size();
}

inline std::vector< Item > sort_descending( std::span< const double > weights ) {
    std::vector< Item > items( weights.size() );
    for ( std::size_t i = 0; i < weights.size(); ++i ) items[ i ] = { i, weights[ i ] };
    std::stable_sort( items.begin(), items.end(), []( const Item& a, const Item& b ) { return a.weight > b.weight; } );
    return items;
}

/// Pads a descending list to a multiple of N with phantoms, then reverses
/// every odd block of N so adjacent blocks run in opposite directions.
inline std::vector< Item > serpentine_order( std::span< const Item > sorted_desc, std::size_t n ) {
    detail::check_groups( n );
    std::vector< Item > out( sorted_desc.begin(), sorted_desc.end() );
    while ( out.size() % n != 0 ) out.push_back( { Item::phantom, 0.0 } );
    for ( std::size_t b = 1; b * n < out.size(); b += 2 ) {
        const auto first = out.begin() + static_cast< std::ptrdiff_t >( b * n );
        std::reverse( first, first + static_cast< std::ptrdiff_t >( n ) );
    }
    return out;
}

/// Sublist j collects positions N*i + j of the serpentine list. Phantoms are
/// dropped.
inline Partition seed_sublists( std::span< const Item > ordered, std::size_t n ) {
    detail::check_groups( n );
    Partition p;
    p.sublists.resize( n );
    p.sums.assign( n, 0.0 );
    for ( std::size_t pos = 0; pos < ordered.size(); ++pos ) {
        const auto& item = ordered[ pos ];
        if ( item.is_phantom() ) continue;
        p.sublists[ pos % n ].push_back( item.index );
        p.sums[ pos % n ] += item.weight;
    }
    return p;
}

/// Per-iteration record of the fine-tune loop.
struct FinetuneStep {
    double diff = 0.0;          // max(sum) - min(sum) before the step
    bool moved = false;
    std::size_t item = 0;       // moved item, if any
    std::size_t from = 0, to = 0;
};

/// At most `max_iterations` rounds of: find heaviest and lightest sublist
/// (ties: lowest sublist index); if diff/2 > smallest element of the heaviest
/// (ties: lowest item index), move it to the lightest; otherwise stop.
inline Partition finetune( Partition p, std::span< const double > weights, std::size_t max_iterations,
                           std::vector< FinetuneStep >* trace = nullptr ) {
    if ( p.sublists.empty() ) return p;
    for ( std::size_t it = 0; it < max_iterations; ++it ) {
        recompute_sums( p, weights );
        std::size_t hi = 0, lo = 0;
        for ( std::size_t j = 1; j < p.sums.size(); ++j ) {
            if ( p.sums[ j ] > p.sums[ hi ] ) hi = j;
            if ( p.sums[ j ] < p.sums[ lo ] ) lo = j;
        }
        FinetuneStep step;
        step.diff = p.sums[ hi ] - p.sums[ lo ];
        auto& heavy = p.sublists[ hi ];
        if ( heavy.empty() || hi == lo ) {
            if ( trace ) trace->push_back( step );
            break;
        }
        auto smallest = heavy.begin();
        for ( auto i = heavy.begin() + 1; i != heavy.end(); ++i ) {
            const double wi = weights[ *i ], ws = weights[ *smallest ];
            if ( wi < ws || ( wi == ws && *i < *smallest ) ) smallest = i;
        }
        if ( !( step.diff / 2.0 > weights[ *smallest ] ) ) {
            if ( trace ) trace->push_back( step );
            break;
        }
        step.moved = true;
        step.item = *smallest;
        step.from = hi;
        step.to = lo;
        p.sublists[ lo ].push_back( *smallest );
        heavy.erase( smallest );
        if ( trace ) trace->push_back( step );
    }
    recompute_sums( p, weights );
    return p;
}

/// Default fine-tune budget: one round per item.
inline constexpr std::size_t default_iterations = std::numeric_limits< std::size_t >::max();

/// Full pipeline: sort, serpentine, seed, fine-tune. Deterministic; N > K
/// leaves empty sublists (see Partition::has_empty).
inline Partition cbws_partition( std::span< const double > weights, std::size_t n,
                                 std::size_t max_iterations = default_iterations ) {
    detail::check_weights( weights );
    detail::check_groups( n );
    if ( max_iterations == default_iterations ) max_iterations = weights.size();
    const auto sorted = sort_descending( weights );
    const auto ordered = serpentine_order( sorted, n );
    auto seeded = seed_sublists( ordered, n );
    recompute_sums( seeded, weights );
    return finetune( std::move( seeded ), weights, max_iterations );
}

/// Equal-count contiguous split in index order; the first K mod N groups get
/// one extra item. This is the hardware's default channel assignment.
inline Partition contiguous_partition( std::span< const double > weights, std::size_t n ) {
    detail::check_groups( n );
    Partition p;
    p.sublists.resize( n );
    const std::size_t k = weights.size();
    std::size_t next = 0;
    for ( std::size_t j = 0; j < n; ++j ) {
        const std::size_t size = k / n + ( j < k % n ? 1 : 0 );
        for ( std::size_t s = 0; s < size; ++s ) p.sublists[ j ].push_back( next++ );
    }
    recompute_sums( p, weights );
    return p;
}

inline constexpr std::size_t oracle_max_items = 16;

/// Exact minimiser of the largest sublist sum by depth-first branch and
/// bound. Items are assigned in index order to groups in ascending order, so
/// the first optimum found is the lexicographically smallest assignment.
inline Partition optimal_partition_oracle( std::span< const double > weights, std::size_t n ) {
    detail::check_weights( weights );
    detail::check_groups( n );
    const std::size_t k = weights.size();
    if ( k > oracle_max_items )
        throw BudgetError( "exhaustive partition limited to " + std::to_string( oracle_max_items ) + " items, got " +
                           std::to_string( k ) );

    const double total = std::accumulate( weights.begin(), weights.end(), 0.0 );
    const double largest = *std::max_element( weights.begin(), weights.end() );
    const double lower_bound = std::max( total / static_cast< double >( n ), largest );

    std::vector< std::size_t > assign( k, 0 ), best_assign;
    std::vector< double > loads( n, 0.0 );
    double best = std::numeric_limits< double >::infinity();
    bool done = false;

    // `used` = number of groups touched so far; an item may open at most one
    // new group, which removes group-relabelling symmetry without losing the
    // lexicographically smallest representative.
    auto search = [ & ]( auto&& self, std::size_t i, std::size_t used, double current_max ) -> void {
        if ( done ) return;
        if ( i == k ) {
            if ( current_max < best ) {
                best = current_max;
                best_assign = assign;
                if ( best <= lower_bound ) done = true;
            }
            return;
        }
        const std::size_t limit = std::min( n, used + 1 );
        for ( std::size_t g = 0; g < limit && !done; ++g ) {
            const double load = loads[ g ] + weights[ i ];
            const double next_max = std::max( current_max, load );
            if ( next_max >= best ) continue;
            const double saved = loads[ g ];
            loads[ g ] = load;
            assign[ i ] = g;
            self( self, i + 1, std::max( used, g + 1 ), next_max );
            loads[ g ] = saved;
        }
    };
    search( search, 0, 0, 0.0 );

    Partition p;
    p.sublists.resize( n );
    for ( std::size_t i = 0; i < k; ++i ) p.sublists[ best_assign[ i ] ].push_back( i );
    recompute_sums( p, weights );
    return p;
}

struct PartitionStats {
    std::vector< double > sums;
    double diff = 0.0;
    double max_sum = 0.0;
    /// mean(sums) / max(sums); 1 for an all-empty partition.
    double balance = 1.0;
};

inline PartitionStats partition_stats( const Partition& p ) {
    PartitionStats s;
    s.sums = p.sums;
    if ( p.sums.empty() ) return s;
    const auto [ lo, hi ] = std::minmax_element( p.sums.begin(), p.sums.end() );
    s.diff = *hi - *lo;
    s.max_sum = *hi;
    const double mean = std::accumulate( p.sums.begin(), p.sums.end(), 0.0 ) / static_cast< double >( p.sums.size() );
    s.balance = s.max_sum > 0.0 ? mean / s.max_sum : 1.0;
    return s;
}

} // namespace skydiver
