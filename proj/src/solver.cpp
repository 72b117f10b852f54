#include "fsk/solver.hpp"

#include <cmath>
#include <string>

#include "fsk/mathutil.hpp"
#include "fsk/schedule.hpp"
#include "fsk/stream.hpp"

namespace fsk::solver {

namespace {

double marginal_violation(const Vec& r, const Vec& a, const Vec& c, const Vec& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) v += std::abs(r[i] - a[i]);
    for (std::size_t j = 0; j < c.size(); ++j) v += std::abs(c[j] - b[j]);
    return v;
}

SolveReport solve_f64(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                      const CostSpec& spec, const SinkhornConfig& cfg, const TileConfig& tiles,
                      IoLedger& ledger) {
    const Vec alpha = potential_shift(src.points, spec);
    const Vec beta = potential_shift(tgt.points, spec);

    // f = g = 0, i.e. f_hat = -alpha, g_hat = -beta
    ShiftedPotentials p;
    p.f_hat.resize(src.size());
    p.g_hat.resize(tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i) p.f_hat[i] = -alpha[i];
    for (std::size_t j = 0; j < tgt.size(); ++j) p.g_hat[j] = -beta[j];

    SolveReport rep;
    const auto schedule = eps_schedule(cfg, joint_sq_diameter(src.points, tgt.points));
    for (double eps : schedule) {
        p.eps = eps;
        try {
            if (cfg.schedule == Schedule::Alternating) {
                p.f_hat = stream::update_f_hat(src, tgt, p.g_hat, spec, eps, tiles, ledger);
                p.g_hat = stream::update_g_hat(src, tgt, p.f_hat, spec, eps, tiles, ledger);
            } else {
                p = stream::symmetric_update(src, tgt, p, spec, tiles, ledger);
            }
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at iteration " +
                                 std::to_string(rep.iterations + 1));
        }
        ++rep.iterations;
        rep.eps_history.push_back(eps);
        if (cfg.marginal_tol > 0.0 && eps == cfg.eps) {
            auto [r, c] = stream::induced_marginals(src, tgt, p, spec, tiles, ledger);
            rep.marginal_violation = marginal_violation(r, src.weights, c, tgt.weights);
            if (rep.marginal_violation <= cfg.marginal_tol) {
                rep.potentials = std::move(p);
                rep.dual_cost =
                    dual_cost(src, tgt, rep.potentials, spec, tiles, ledger);
                return rep;
            }
        }
    }
    rep.potentials = std::move(p);
    auto [r, c] = stream::induced_marginals(src, tgt, rep.potentials, spec, tiles, ledger);
    rep.marginal_violation = marginal_violation(r, src.weights, c, tgt.weights);
    rep.dual_cost = dual_cost(src, tgt, rep.potentials, spec, tiles, ledger);
    return rep;
}

SolveReport solve_f32(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                      const CostSpec& spec, const SinkhornConfig& cfg, const TileConfig& tiles,
                      IoLedger& ledger) {
    if (spec.kind != CostKind::SquaredEuclidean)
        throw ValidationError("single-precision solve supports the squared-Euclidean cost only");
    const stream::FloatCloud fsrc = stream::to_float_cloud(src);
    const stream::FloatCloud ftgt = stream::to_float_cloud(tgt);

    std::vector<float> f_hat(src.size()), g_hat(tgt.size());
    {
        const Vec alpha = potential_shift(src.points, spec);
        const Vec beta = potential_shift(tgt.points, spec);
        for (std::size_t i = 0; i < src.size(); ++i) f_hat[i] = -static_cast<float>(alpha[i]);
        for (std::size_t j = 0; j < tgt.size(); ++j) g_hat[j] = -static_cast<float>(beta[j]);
    }

    SolveReport rep;
    const auto schedule = eps_schedule(cfg, joint_sq_diameter(src.points, tgt.points));
    for (double eps_d : schedule) {
        const float eps = static_cast<float>(eps_d);
        try {
            if (cfg.schedule == Schedule::Alternating) {
                f_hat = stream::update_f_hat_f32(fsrc, ftgt, g_hat, eps, tiles, ledger);
                g_hat = stream::update_g_hat_f32(fsrc, ftgt, f_hat, eps, tiles, ledger);
            } else {
                auto f_fresh = stream::update_f_hat_f32(fsrc, ftgt, g_hat, eps, tiles, ledger);
                auto g_fresh = stream::update_g_hat_f32(fsrc, ftgt, f_hat, eps, tiles, ledger);
                for (std::size_t i = 0; i < f_hat.size(); ++i)
                    f_hat[i] = 0.5f * f_hat[i] + 0.5f * f_fresh[i];
                for (std::size_t j = 0; j < g_hat.size(); ++j)
                    g_hat[j] = 0.5f * g_hat[j] + 0.5f * g_fresh[j];
                ledger.add_load(src.size() + tgt.size());
            }
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " at iteration " +
                                 std::to_string(rep.iterations + 1));
        }
        ++rep.iterations;
        rep.eps_history.push_back(eps_d);
    }

    rep.potentials.eps = cfg.eps;
    rep.potentials.f_hat.assign(f_hat.begin(), f_hat.end());
    rep.potentials.g_hat.assign(g_hat.begin(), g_hat.end());
    auto [r, c] = stream::induced_marginals(src, tgt, rep.potentials, spec, tiles, ledger);
    rep.marginal_violation = marginal_violation(r, src.weights, c, tgt.weights);
    rep.dual_cost = dual_cost(src, tgt, rep.potentials, spec, tiles, ledger);
    return rep;
}

}  // namespace

SolveReport sinkhorn_solve(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                           const CostSpec& spec, const SinkhornConfig& cfg,
                           const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_sinkhorn_config(cfg);
    validate_tiles(tiles);
    if (cfg.precision == Precision::Single) return solve_f32(src, tgt, spec, cfg, tiles, ledger);
    return solve_f64(src, tgt, spec, cfg, tiles, ledger);
}

double dual_cost(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                 const ShiftedPotentials& p, const CostSpec& spec, const TileConfig& tiles,
                 IoLedger& ledger) {
    const Vec alpha = potential_shift(src.points, spec);
    const Vec beta = potential_shift(tgt.points, spec);
    auto [f, g] = unshift_potentials(p, alpha, beta);
    auto [r, c] = stream::induced_marginals(src, tgt, p, spec, tiles, ledger);
    const double mass = pairwise_sum<double>(r.size(), [&](std::size_t i) { return r[i]; });
    double value = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) value += f[i] * src.weights[i];
    for (std::size_t j = 0; j < g.size(); ++j) value += g[j] * tgt.weights[j];
    return value - p.eps * (mass - 1.0);
}

double sinkhorn_divergence_mixed(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 const CostSpec& spec_cross, const CostSpec& spec_mu,
                                 const CostSpec& spec_nu, const SinkhornConfig& cfg,
                                 const TileConfig& tiles, IoLedger& ledger) {
    const double cross = sinkhorn_solve(mu, nu, spec_cross, cfg, tiles, ledger).dual_cost;
    const double self_mu = sinkhorn_solve(mu, mu, spec_mu, cfg, tiles, ledger).dual_cost;
    const double self_nu = sinkhorn_solve(nu, nu, spec_nu, cfg, tiles, ledger).dual_cost;
    return cross - 0.5 * self_mu - 0.5 * self_nu;
}

double sinkhorn_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           const CostSpec& spec, const SinkhornConfig& cfg,
                           const TileConfig& tiles, IoLedger& ledger) {
    return sinkhorn_divergence_mixed(mu, nu, spec, spec, spec, cfg, tiles, ledger);
}

}  // namespace fsk::solver
