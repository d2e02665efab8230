#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace skydiver {

// Seeded generator with platform-independent output. std::mt19937_64 is fully
// specified by the standard, the <random> distributions are not, so the
// conversions to uniform/normal/Bernoulli are done here.
class Rng {
  public:
    explicit Rng( std::uint64_t seed ) : m_engine( seed ) {}

    std::uint64_t next() { return m_engine(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast< double >( m_engine() >> 11 ) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t below( std::uint64_t n ) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = m_engine();
        } while ( x >= limit );
        return x % n;
    }

    bool bernoulli( double p ) { return uniform() < p; }

    // Box-Muller; the second variate is cached.
    double normal() {
        if ( m_has_spare ) {
            m_has_spare = false;
            return m_spare;
        }
        double u1 = uniform();
        while ( u1 <= 0.0 ) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt( -2.0 * std::log( u1 ) );
        const double theta = 2.0 * std::numbers::pi * u2;
        m_spare = r * std::sin( theta );
        m_has_spare = true;
        return r * std::cos( theta );
    }

    double normal( double mean, double sigma ) { return mean + sigma * normal(); }

  private:
    std::mt19937_64 m_engine;
    double m_spare = 0.0;
    bool m_has_spare = false;
};

} // namespace skydiver
