#pragma once

#include <vector>

#include "fsk/core.hpp"

namespace fsk {

// Upper bound on the squared diameter of the joint cloud from the
// coordinate-wise bounding box; O((n+m)d) and only a schedule heuristic.
double joint_sq_diameter(const Mat& X, const Mat& Y);

// Per-iteration regularization values. With eps_scaling_factor < 1 the value
// starts at the squared diameter and decays geometrically until it reaches
// cfg.eps, then stays there for extra_iters_at_final_eps more iterations.
// The sequence is truncated at cfg.max_iters.
std::vector<double> eps_schedule(const SinkhornConfig& cfg, double sq_diam);

}  // namespace fsk
