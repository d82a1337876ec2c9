#include "cavfgr/dynamics.hpp"

#include <cmath>

#include "cavfgr/error.hpp"

namespace cavfgr {

double midpoint_value(const std::vector<double>& v, std::size_t i) {
    const std::size_t m = v.size() - 1;
    if (i >= m) throw ConfigError("midpoint_value: index past the last interval");
    if (m == 1) return 0.5 * (v[0] + v[1]);
    if (m == 2) {
        return i == 0 ? (3.0 * v[0] + 6.0 * v[1] - v[2]) / 8.0 : (-v[0] + 6.0 * v[1] + 3.0 * v[2]) / 8.0;
    }
    if (i == 0) return (5.0 * v[0] + 15.0 * v[1] - 5.0 * v[2] + v[3]) / 16.0;
    if (i == m - 1) return (v[m - 3] - 5.0 * v[m - 2] + 15.0 * v[m - 1] + 5.0 * v[m]) / 16.0;
    return (-v[i - 1] + 9.0 * v[i] + 9.0 * v[i + 1] - v[i + 2]) / 16.0;
}

PopulationTrajectory propagate(const RateSeries& k_fwd, const RateSeries& k_bwd, const PropagateOptions& opts) {
    if (!(k_fwd.grid == k_bwd.grid)) throw ConfigError("propagate: forward and backward grids differ");
    k_fwd.grid.validate();
    const std::size_t nodes = k_fwd.grid.size();
    if (k_fwd.values.size() != nodes || k_bwd.values.size() != nodes) {
        throw ConfigError("propagate: rate series length does not match its grid");
    }
    if (free_counterpart(k_fwd.variant) != free_counterpart(k_bwd.variant) ||
        is_cavity(k_fwd.variant) != is_cavity(k_bwd.variant)) {
        throw ConfigError("propagate: forward and backward variants differ");
    }

    TimeGrid grid = k_fwd.grid;
    if (opts.extend_to > grid.t_max()) {
        grid.steps = static_cast<std::size_t>(std::ceil(opts.extend_to / grid.dt - 1e-9));
    }

    const double dt = grid.dt;
    const std::size_t last = nodes - 1;
    auto rates_at_node = [&](std::size_t i, double& kf, double& kb) {
        const std::size_t j = std::min(i, last);
        kf = k_fwd.values[j];
        kb = k_bwd.values[j];
    };
    auto rates_at_mid = [&](std::size_t i, double& kf, double& kb) {
        if (i >= last) {
            kf = k_fwd.values[last];
            kb = k_bwd.values[last];
        } else {
            kf = midpoint_value(k_fwd.values, i);
            kb = midpoint_value(k_bwd.values, i);
        }
    };
    auto rhs = [](double p, double kf, double kb) { return -kf * p + kb * (1.0 - p); };

    PopulationTrajectory out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()), k_fwd.variant};
    double p = 1.0;
    out.p_donor[0] = 1.0;
    out.p_acceptor[0] = 0.0;
    for (std::size_t i = 0; i < grid.steps; ++i) {
        double kf0, kb0, kfm, kbm, kf1, kb1;
        rates_at_node(i, kf0, kb0);
        rates_at_mid(i, kfm, kbm);
        rates_at_node(i + 1, kf1, kb1);
        const double s1 = rhs(p, kf0, kb0);
        const double s2 = rhs(p + 0.5 * dt * s1, kfm, kbm);
        const double s3 = rhs(p + 0.5 * dt * s2, kfm, kbm);
        const double s4 = rhs(p + dt * s3, kf1, kb1);
        p += dt / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        if (!std::isfinite(p)) throw NumericalError("propagate: population became non-finite");
        out.p_donor[i + 1] = p;
        out.p_acceptor[i + 1] = 1.0 - p;
    }
    return out;
}

}  // namespace cavfgr
