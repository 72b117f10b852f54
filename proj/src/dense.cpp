#include "fsk/dense.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "fsk/mathutil.hpp"
#include "fsk/schedule.hpp"

namespace fsk::dense {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::VectorXd;

constexpr std::size_t kDeskScaleLimit = 512;

// one stabilized row LSE of (g - C_row)/eps + log b
double row_lse(const double* crow, const Vec& g, const Vec& logb, double eps, std::size_t m) {
    double mx = -std::numeric_limits<double>::infinity();
    Vec z(m);
    for (std::size_t j = 0; j < m; ++j) {
        z[j] = (g[j] - crow[j]) / eps + logb[j];
        mx = std::max(mx, z[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::exp(z[j] - mx);
    return mx + std::log(s);
}

// column LSE of (f - C_col)/eps + log a
double col_lse(const Mat& C, std::size_t j, const Vec& f, const Vec& loga, double eps) {
    const std::size_t n = C.rows();
    double mx = -std::numeric_limits<double>::infinity();
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = (f[i] - C(i, j)) / eps + loga[i];
        mx = std::max(mx, z[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(z[i] - mx);
    return mx + std::log(s);
}

double marginal_violation_of(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                             const Vec& f, const Vec& g, const Mat& C, double eps) {
    const std::size_t n = src.size(), m = tgt.size();
    double viol = 0.0;
    Vec colsum(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double pij =
                src.weights[i] * tgt.weights[j] * std::exp((f[i] + g[j] - C(i, j)) / eps);
            rs += pij;
            colsum[j] += pij;
        }
        viol += std::abs(rs - src.weights[i]);
    }
    for (std::size_t j = 0; j < m; ++j) viol += std::abs(colsum[j] - tgt.weights[j]);
    return viol;
}

}  // namespace

Mat dense_cost(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const CostSpec& spec) {
    validate_problem(src, tgt, spec);
    const std::size_t n = src.size(), m = tgt.size(), d = src.dim();
    Mat C(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = src.points.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double* yj = tgt.points.row(j);
            double s = 0.0;
            for (std::size_t t = 0; t < d; ++t) {
                const double diff = xi[t] - yj[t];
                s += diff * diff;
            }
            if (spec.kind == CostKind::LabelAugmented) {
                s = spec.lambda1 * s +
                    spec.lambda2 * spec.label_cost((*src.labels)[i], (*tgt.labels)[j]);
            }
            C(i, j) = s;
        }
    }
    return C;
}

DenseSolveResult dense_sinkhorn_report(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                       const CostSpec& spec, const SinkhornConfig& cfg) {
    validate_problem(src, tgt, spec);
    validate_sinkhorn_config(cfg);
    const std::size_t n = src.size(), m = tgt.size();
    const Mat C = dense_cost(src, tgt, spec);
    Vec loga(n), logb(m);
    for (std::size_t i = 0; i < n; ++i) loga[i] = std::log(src.weights[i]);
    for (std::size_t j = 0; j < m; ++j) logb[j] = std::log(tgt.weights[j]);

    Vec f(n, 0.0), g(m, 0.0);
    const auto schedule =
        eps_schedule(cfg, joint_sq_diameter(src.points, tgt.points));

    int iters = 0;
    for (double eps : schedule) {
        if (cfg.schedule == Schedule::Alternating) {
            for (std::size_t i = 0; i < n; ++i) f[i] = -eps * row_lse(C.row(i), g, logb, eps, m);
            for (std::size_t j = 0; j < m; ++j) g[j] = -eps * col_lse(C, j, f, loga, eps);
        } else {
            Vec f_new(n), g_new(m);
            for (std::size_t i = 0; i < n; ++i)
                f_new[i] = 0.5 * f[i] - 0.5 * eps * row_lse(C.row(i), g, logb, eps, m);
            for (std::size_t j = 0; j < m; ++j)
                g_new[j] = 0.5 * g[j] - 0.5 * eps * col_lse(C, j, f, loga, eps);
            f = std::move(f_new);
            g = std::move(g_new);
        }
        ++iters;
        if (!all_finite(f) || !all_finite(g))
            throw NumericalError("dense_sinkhorn produced non-finite potentials at iteration " +
                                 std::to_string(iters));
        if (cfg.marginal_tol > 0.0 && eps == cfg.eps) {
            if (marginal_violation_of(src, tgt, f, g, C, eps) <= cfg.marginal_tol) break;
        }
    }

    DenseSolveResult out;
    out.iterations = iters;
    out.marginal_violation = marginal_violation_of(src, tgt, f, g, C, cfg.eps);
    const Vec alpha = potential_shift(src.points, spec);
    const Vec beta = potential_shift(tgt.points, spec);
    out.potentials = shift_potentials(f, g, alpha, beta, cfg.eps);
    return out;
}

ShiftedPotentials dense_sinkhorn(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                 const CostSpec& spec, const SinkhornConfig& cfg) {
    return dense_sinkhorn_report(src, tgt, spec, cfg).potentials;
}

DensePlan dense_plan(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                     const CostSpec& spec, const ShiftedPotentials& p) {
    validate_problem(src, tgt, spec);
    const std::size_t n = src.size(), m = tgt.size();
    if (p.f_hat.size() != n || p.g_hat.size() != m)
        throw ValidationError("dense_plan: potential lengths do not match the measures");
    const Mat C = dense_cost(src, tgt, spec);
    const Vec alpha = potential_shift(src.points, spec);
    const Vec beta = potential_shift(tgt.points, spec);
    auto [f, g] = unshift_potentials(p, alpha, beta);

    DensePlan plan{Mat(n, m)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v =
                src.weights[i] * tgt.weights[j] * std::exp((f[i] + g[j] - C(i, j)) / p.eps);
            if (!std::isfinite(v))
                throw NumericalError("dense_plan overflow, potentials are not stabilized");
            plan.entries(i, j) = v;
        }
    }
    return plan;
}

Mat dense_gradient(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                   const DensePlan& plan) {
    const std::size_t n = src.size(), m = tgt.size(), d = src.dim();
    if (plan.entries.rows() != n || plan.entries.cols() != m)
        throw ValidationError("dense_gradient: plan shape mismatch");
    Mat G(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* prow = plan.entries.row(i);
        double rowsum = 0.0;
        for (std::size_t j = 0; j < m; ++j) rowsum += prow[j];
        for (std::size_t t = 0; t < d; ++t) {
            double py = 0.0;
            for (std::size_t j = 0; j < m; ++j) py += prow[j] * tgt.points(j, t);
            G(i, t) = 2.0 * (rowsum * src.points(i, t) - py);
        }
    }
    return G;
}

DenseHessian dense_hessian(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                           const DensePlan& plan, double eps, double pinv_threshold) {
    const std::size_t n = src.size(), m = tgt.size(), d = src.dim();
    if (n > kDeskScaleLimit || m > kDeskScaleLimit)
        throw ValidationError("dense_hessian is desk-scale only (n, m <= 512)");
    const Mat& P = plan.entries;

    // induced marginals keep early-stopped plans consistent
    Vec r(n, 0.0), c(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            r[i] += P(i, j);
            c[j] += P(i, j);
        }

    // sensitivity matrix H = [diag(r) P; P^T diag(c)] and its pseudoinverse
    const std::size_t nm = n + m;
    EMat H = EMat::Zero(nm, nm);
    for (std::size_t i = 0; i < n; ++i) H(i, i) = r[i];
    for (std::size_t j = 0; j < m; ++j) H(n + j, n + j) = c[j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            H(i, n + j) = P(i, j);
            H(n + j, i) = P(i, j);
        }
    Eigen::SelfAdjointEigenSolver<EMat> eig(H);
    if (eig.info() != Eigen::Success)
        throw NumericalError("dense_hessian: eigendecomposition failed");
    const EVec& evals = eig.eigenvalues();
    const double lmax = evals.cwiseAbs().maxCoeff();
    EVec inv = EVec::Zero(nm);
    for (Eigen::Index k = 0; k < evals.size(); ++k)
        if (evals[k] > pinv_threshold * lmax) inv[k] = 1.0 / evals[k];
    EMat Hdag = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();

    // PY for the top block of R
    Mat PY(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += P(i, j) * tgt.points(j, t);
            PY(i, t) = s;
        }

    // R[(i or n+j), k*d+t]
    EMat R = EMat::Zero(nm, n * d);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t t = 0; t < d; ++t)
            R(k, k * d + t) = 2.0 * (src.points(k, t) * r[k] - PY(k, t));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const double pkj = P(k, j);
            if (pkj == 0.0) continue;
            for (std::size_t t = 0; t < d; ++t)
                R(n + j, k * d + t) = 2.0 * (src.points(k, t) - tgt.points(j, t)) * pkj;
        }

    EMat T = (R.transpose() * (Hdag * R)) / eps;

    // block-diagonal explicit term
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t t = 0; t < d; ++t)
            for (std::size_t l = 0; l < d; ++l) {
                double s = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    s += P(k, j) * (src.points(k, t) - tgt.points(j, t)) *
                         (src.points(k, l) - tgt.points(j, l));
                double v = -(4.0 / eps) * s;
                if (t == l) v += 2.0 * r[k];
                T(k * d + t, k * d + l) += v;
            }
    }

    DenseHessian out;
    out.n = n;
    out.d = d;
    out.entries = Mat(n * d, n * d);
    for (std::size_t a = 0; a < n * d; ++a)
        for (std::size_t b = 0; b < n * d; ++b) out.entries(a, b) = T(a, b);
    return out;
}

Mat dense_hvp(const DenseHessian& h, const Mat& A) {
    if (A.rows() != h.n || A.cols() != h.d)
        throw ValidationError("dense_hvp: direction shape mismatch");
    const std::size_t nd = h.n * h.d;
    Mat out(h.n, h.d);
    for (std::size_t a = 0; a < nd; ++a) {
        double s = 0.0;
        const double* row = h.entries.row(a);
        for (std::size_t b = 0; b < nd; ++b) s += row[b] * A.data()[b];
        out.data()[a] = s;
    }
    return out;
}

double dense_primal_objective(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                              const CostSpec& spec, const DensePlan& plan, double eps) {
    const Mat C = dense_cost(src, tgt, spec);
    const std::size_t n = src.size(), m = tgt.size();
    double cost = 0.0, kl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = plan.entries(i, j);
            const double ab = src.weights[i] * tgt.weights[j];
            cost += C(i, j) * p;
            if (p > 0.0) kl += p * std::log(p / ab) - p + ab;
            else kl += ab;
        }
    return cost + eps * kl;
}

}  // namespace fsk::dense
