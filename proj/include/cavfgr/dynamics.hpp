// dynamics.hpp: two-state population master equation
//   dP_D/dt = -k_fwd(t) P_D + k_bwd(t) P_A,   P_A = 1 - P_D
// integrated with classic RK4 on the rate grid.

#pragma once

#include <vector>

#include "cavfgr/rates.hpp"

namespace cavfgr {

struct PopulationTrajectory {
    TimeGrid grid;
    std::vector<double> p_donor;
    std::vector<double> p_acceptor;
    Variant variant = Variant::NE;
};

struct PropagateOptions {
    /// When > grid.t_max(), continue to this time with the last rate values frozen.
    double extend_to = 0.0;
};

/// Rates at half steps come from 4-point cubic Lagrange interpolation of the
/// series (one-sided at the ends, quadratic for a 2-step grid). Negative rates
/// are accepted.
[[nodiscard]] PopulationTrajectory propagate(const RateSeries& k_fwd, const RateSeries& k_bwd,
                                             const PropagateOptions& opts = {});

/// Series value at t = (i + 1/2) dt.
[[nodiscard]] double midpoint_value(const std::vector<double>& values, std::size_t i);

}  // namespace cavfgr
