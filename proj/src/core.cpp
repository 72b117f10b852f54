#include "fsk/core.hpp"

#include <cmath>

#include "fsk/mathutil.hpp"

namespace fsk {

DiscreteMeasure make_uniform_measure(Mat points, std::optional<std::vector<int32_t>> labels) {
    DiscreteMeasure m;
    const std::size_t n = points.rows();
    m.points = std::move(points);
    m.weights.assign(n, 1.0 / static_cast<double>(n));
    m.labels = std::move(labels);
    return m;
}

void validate_measure(const DiscreteMeasure& m) {
    const std::size_t n = m.points.rows();
    const std::size_t d = m.points.cols();
    if (n < 1 || d < 1) throw ValidationError("measure must have n >= 1 points of dimension d >= 1");
    if (m.weights.size() != n)
        throw ValidationError("weight count " + std::to_string(m.weights.size()) +
                              " does not match point count " + std::to_string(n));
    if (!all_finite({m.points.data(), m.points.size()}))
        throw ValidationError("non-finite coordinate in measure");
    double sum = 0.0;
    for (double w : m.weights) {
        if (!(w > 0.0)) throw ValidationError("weights must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("weights must sum to 1 (got " + std::to_string(sum) + ")");
    if (m.labels && m.labels->size() != n)
        throw ValidationError("label count does not match point count");
    if (m.labels) {
        for (int32_t l : *m.labels)
            if (l < 0) throw ValidationError("labels must be nonnegative");
    }
}

void validate_problem(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                      const CostSpec& spec) {
    validate_measure(src);
    validate_measure(tgt);
    if (src.dim() != tgt.dim())
        throw ValidationError("source dimension " + std::to_string(src.dim()) +
                              " != target dimension " + std::to_string(tgt.dim()));
    if (spec.kind == CostKind::LabelAugmented) {
        if (!src.labeled() || !tgt.labeled())
            throw ValidationError("label-augmented cost requires labels on both measures");
        if (spec.lambda1 < 0.0 || spec.lambda2 < 0.0)
            throw ValidationError("lambda1/lambda2 must be nonnegative");
        const auto v = static_cast<int32_t>(spec.label_cost.rows());
        if (spec.label_cost.cols() != spec.label_cost.rows())
            throw ValidationError("label cost table must be square");
        for (int32_t l : *src.labels)
            if (l >= v) throw ValidationError("source label " + std::to_string(l) +
                                              " out of range of label cost table");
        for (int32_t l : *tgt.labels)
            if (l >= v) throw ValidationError("target label " + std::to_string(l) +
                                              " out of range of label cost table");
        if (!all_finite({spec.label_cost.data(), spec.label_cost.size()}))
            throw ValidationError("non-finite entry in label cost table");
    }
}

void validate_sinkhorn_config(const SinkhornConfig& cfg) {
    if (!(cfg.eps > 0.0)) throw ValidationError("eps must be positive");
    if (cfg.max_iters < 1) throw ValidationError("max_iters must be positive");
    if (cfg.marginal_tol < 0.0) throw ValidationError("marginal_tol must be nonnegative");
    if (!(cfg.eps_scaling_factor > 0.0 && cfg.eps_scaling_factor <= 1.0))
        throw ValidationError("eps_scaling_factor must lie in (0, 1]");
    if (cfg.extra_iters_at_final_eps < 0)
        throw ValidationError("extra_iters_at_final_eps must be nonnegative");
}

void validate_tiles(const TileConfig& tiles) {
    if (tiles.block_rows < 1 || tiles.block_cols < 1)
        throw ValidationError("tile block sizes must be >= 1");
}

Vec squared_norms(const Mat& points) {
    if (!all_finite({points.data(), points.size()}))
        throw ValidationError("non-finite coordinate in squared_norms input");
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = points.row(i);
        double s = 0.0;
        for (std::size_t t = 0; t < d; ++t) s += r[t] * r[t];
        out[i] = s;
    }
    return out;
}

std::pair<Vec, Vec> unshift_potentials(const ShiftedPotentials& p, const Vec& alpha,
                                       const Vec& beta) {
    if (p.f_hat.size() != alpha.size() || p.g_hat.size() != beta.size())
        throw ValidationError("potential/shift length mismatch in unshift_potentials");
    Vec f(p.f_hat.size()), g(p.g_hat.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = p.f_hat[i] + alpha[i];
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = p.g_hat[j] + beta[j];
    return {std::move(f), std::move(g)};
}

ShiftedPotentials shift_potentials(const Vec& f, const Vec& g, const Vec& alpha,
                                   const Vec& beta, double eps) {
    if (f.size() != alpha.size() || g.size() != beta.size())
        throw ValidationError("potential/shift length mismatch in shift_potentials");
    ShiftedPotentials p;
    p.eps = eps;
    p.f_hat.resize(f.size());
    p.g_hat.resize(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) p.f_hat[i] = f[i] - alpha[i];
    for (std::size_t j = 0; j < g.size(); ++j) p.g_hat[j] = g[j] - beta[j];
    return p;
}

Vec potential_shift(const Mat& points, const CostSpec& spec) {
    Vec a = squared_norms(points);
    const double s = spec.feature_scale();
    if (s != 1.0)
        for (double& v : a) v *= s;
    return a;
}

}  // namespace fsk
