#include "fsk/schedule.hpp"

#include <algorithm>
#include <limits>

namespace fsk {

double joint_sq_diameter(const Mat& X, const Mat& Y) {
    const std::size_t d = X.cols();
    double diam2 = 0.0;
    for (std::size_t t = 0; t < d; ++t) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            lo = std::min(lo, X(i, t));
            hi = std::max(hi, X(i, t));
        }
        for (std::size_t j = 0; j < Y.rows(); ++j) {
            lo = std::min(lo, Y(j, t));
            hi = std::max(hi, Y(j, t));
        }
        diam2 += (hi - lo) * (hi - lo);
    }
    return diam2;
}

std::vector<double> eps_schedule(const SinkhornConfig& cfg, double sq_diam) {
    validate_sinkhorn_config(cfg);
    std::vector<double> out;
    const std::size_t cap = static_cast<std::size_t>(cfg.max_iters);
    if (cfg.eps_scaling_factor >= 1.0) {
        out.assign(cap, cfg.eps);
        return out;
    }
    double e = sq_diam;
    while (out.size() < cap) {
        out.push_back(std::max(e, cfg.eps));
        if (e <= cfg.eps) break;
        e *= cfg.eps_scaling_factor;
    }
    for (int k = 0; k < cfg.extra_iters_at_final_eps && out.size() < cap; ++k)
        out.push_back(cfg.eps);
    return out;
}

}  // namespace fsk
