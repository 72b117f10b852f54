#pragma once

#include "fsk/core.hpp"
#include "fsk/ledger.hpp"

namespace fsk::solver {

struct SolveReport {
    ShiftedPotentials potentials;
    int iterations = 0;
    double marginal_violation = 0.0;  // ||r - a||_1 + ||c - b||_1
    double dual_cost = 0.0;           // mass-corrected dual value
    std::vector<double> eps_history;
};

// Sinkhorn driver over the streaming kernels: runs the configured schedule
// with optional eps annealing, stops early once the induced-marginal
// violation drops below cfg.marginal_tol (checked only at the final eps).
SolveReport sinkhorn_solve(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                           const CostSpec& spec, const SinkhornConfig& cfg,
                           const TileConfig& tiles, IoLedger& ledger);

// <f, a> + <g, b> - eps (mass(P) - 1) with unshifted potentials; equals the
// optimal dual value at convergence and stays smooth under early stopping.
double dual_cost(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                 const ShiftedPotentials& p, const CostSpec& spec, const TileConfig& tiles,
                 IoLedger& ledger);

// Debiased divergence S_eps(mu, nu) = OT(mu,nu) - OT(mu,mu)/2 - OT(nu,nu)/2,
// three solves with identical configuration.
double sinkhorn_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const CostSpec& spec, const SinkhornConfig& cfg,
                           const TileConfig& tiles, IoLedger& ledger);

// Variant with per-term cost specs (the label-augmented dataset distance uses
// a different label block for each term).
double sinkhorn_divergence_mixed(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const CostSpec& spec_cross, const CostSpec& spec_mu,
                                 const CostSpec& spec_nu, const SinkhornConfig& cfg,
                                 const TileConfig& tiles, IoLedger& ledger);

}  // namespace fsk::solver
