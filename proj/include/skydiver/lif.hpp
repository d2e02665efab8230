#pragma once

#include <cmath>

#include "skydiver/error.hpp"

namespace skydiver {

struct LifResult {
    float vmem = 0.0f;
    bool spiked = false;

    friend bool operator==( const LifResult&, const LifResult& ) = default;
};

/// Integrate-and-fire update without leak: v = vmem + z; fire when v >= v_th
/// and subtract v_th from the potential.
inline LifResult lif_step( float vmem, float z, float v_th ) {
    if ( !std::isfinite( vmem ) || !std::isfinite( z ) || !std::isfinite( v_th ) )
        throw NumericError( "lif_step: non-finite input" );
    if ( v_th <= 0.0f ) throw NumericError( "lif_step: threshold must be > 0" );
    const float v = vmem + z;
    if ( v >= v_th ) return { v - v_th, true };
    return { v, false };
}

} // namespace skydiver
