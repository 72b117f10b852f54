#pragma once

#include "fsk/core.hpp"

namespace fsk::dense {

// Materialized coupling; the brute-force counterpart of the streaming ops.
struct DensePlan {
    Mat entries;  // n x m, nonnegative
};

// Data-space Hessian stored as an (nd) x (nd) matrix; desk scale only.
struct DenseHessian {
    Mat entries;
    std::size_t n = 0;
    std::size_t d = 0;
};

struct DenseSolveResult {
    ShiftedPotentials potentials;
    int iterations = 0;
    double marginal_violation = 0.0;  // ||P1 - a||_1 + ||P^T 1 - b||_1
};

// Exact pairwise costs, materialized.
Mat dense_cost(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const CostSpec& spec);

// Log-domain Sinkhorn over a materialized cost matrix with stabilized
// row-wise LSE; supports the same schedules and eps annealing as the
// streaming solver so the two backends are comparable iteration for
// iteration.
ShiftedPotentials dense_sinkhorn(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                 const CostSpec& spec, const SinkhornConfig& cfg);

// Same solve, with iteration count and final marginal violation reported.
DenseSolveResult dense_sinkhorn_report(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                       const CostSpec& spec, const SinkhornConfig& cfg);

// P_ij = a_i b_j exp((f_i + g_j - C_ij)/eps), entrywise from unshifted
// potentials. Overflow to Inf signals unstabilized potentials and throws.
DensePlan dense_plan(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                     const CostSpec& spec, const ShiftedPotentials& p);

// G = 2 (diag(P 1) X - P Y); induced marginals so early-stopped plans stay
// consistent.
Mat dense_gradient(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                   const DensePlan& plan);

// Full Hessian via the sensitivity-system pseudoinverse; eigenvalues below
// pinv_threshold * lambda_max are dropped.
DenseHessian dense_hessian(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                           const DensePlan& plan, double eps, double pinv_threshold = 1e-10);

// Contraction of the stored Hessian with a direction, flattened row-major.
Mat dense_hvp(const DenseHessian& h, const Mat& A);

// <C, P> + eps * KL(P || a (x) b); the primal objective used as an oracle for
// the dual value at convergence.
double dense_primal_objective(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                              const CostSpec& spec, const DensePlan& plan, double eps);

}  // namespace fsk::dense
