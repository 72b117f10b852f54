#include "fsk/stream.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "fsk/mathutil.hpp"
#include "fsk/threads.hpp"

namespace fsk::stream {

namespace {

std::atomic<bool> g_break_lse{false};

// Shared description of the biased score matrix
//   S_ij = (two_scale * <q_i, k_j>) / eps + bias2_j - (lam2/eps) * W[lq_i, lk_j],
// where bias2 is the (ghat + eps log b)/eps column bias. The f-update reads it
// with (q, k) = (X, Y); the g-update swaps the roles. Templated on the scalar
// type: double is the correctness path, float the opt-in benchmark path.
template <typename T>
struct CoreCtx {
    const T* qpts = nullptr;
    std::size_t R = 0;
    const T* kpts = nullptr;
    std::size_t C = 0;
    std::size_t d = 0;
    const int32_t* qlab = nullptr;
    const int32_t* klab = nullptr;
    const double* wtab = nullptr;
    std::size_t wdim = 0;
    T lam2_eps = 0;
    T scaled2_eps = 0;  // two_scale/eps, folded into the transposed key copy
    std::vector<T> bias2;
};

// Scratch owned by one row-block task; `kt` is the transposed, pre-scaled key
// tile so score accumulation vectorizes along j.
template <typename T>
struct Scratch {
    std::vector<T> tile;   // bn x bc scores
    std::vector<T> wbuf;   // bc exp weights
    std::vector<T> kt;     // d x bc transposed keys
    std::vector<T> mI;     // running max
    std::vector<T> sI;     // running sumexp
    std::vector<T> oI;     // bn x p accumulator (apply path)

    Scratch(std::size_t bn, std::size_t bc, std::size_t d, std::size_t p)
        : tile(bn * bc), wbuf(bc), kt(d * bc), mI(bn), sI(bn), oI(p ? bn * p : 0) {}
};

template <typename T>
void transpose_keys(const T* kpts, std::size_t d, std::size_t J0, std::size_t bc, T scale,
                    std::vector<T>& kt) {
    for (std::size_t j = 0; j < bc; ++j) {
        const T* kr = kpts + (J0 + j) * d;
        for (std::size_t t = 0; t < d; ++t) kt[t * bc + j] = kr[t] * scale;
    }
}

template <typename T>
void score_tile(const CoreCtx<T>& c, std::size_t I0, std::size_t bn, std::size_t J0,
                std::size_t bc, const std::vector<T>& kt, std::vector<T>& tile) {
    for (std::size_t i = 0; i < bn; ++i) {
        const T* qi = c.qpts + (I0 + i) * c.d;
        T* srow = tile.data() + i * bc;
        for (std::size_t j = 0; j < bc; ++j) srow[j] = c.bias2[J0 + j];
        for (std::size_t t = 0; t < c.d; ++t) {
            const T qv = qi[t];
            const T* krow = kt.data() + t * bc;
            for (std::size_t j = 0; j < bc; ++j) srow[j] += qv * krow[j];
        }
        if (c.qlab) {
            const double* wrow = c.wtab + static_cast<std::size_t>(c.qlab[I0 + i]) * c.wdim;
            for (std::size_t j = 0; j < bc; ++j)
                srow[j] -= c.lam2_eps * static_cast<T>(wrow[c.klab[J0 + j]]);
        }
    }
}

template <typename T>
T rescale_factor(T m_old, T m_new) {
    // negative control: flipping the exponent breaks the online recurrence
    // for every multi-tile stream while leaving single-tile runs exact
    if (g_break_lse.load(std::memory_order_relaxed)) return fast_exp(m_new - m_old);
    return fast_exp(m_old - m_new);
}

// -eps * LSE_row of the biased scores, streamed over column tiles with the
// online max/sumexp recurrence. br/bc are the row/column block sizes in this
// orientation. Ledger: q rows once per row block, key-side streams per tile,
// one store per output row.
template <typename T>
std::vector<T> lse_reduce(const CoreCtx<T>& c, std::size_t br, std::size_t bc, T eps,
                          IoLedger& ledger) {
    const std::size_t R = c.R, C = c.C, d = c.d;
    br = std::min(br, R);
    bc = std::min(bc, C);
    const std::size_t nblocks = (R + br - 1) / br;
    const bool labeled = c.qlab != nullptr;
    const T ninf = -std::numeric_limits<T>::infinity();
    std::vector<T> out(R);

    parallel_for_blocks(nblocks, [&](std::size_t blk) {
        const std::size_t I0 = blk * br;
        const std::size_t bn = std::min(br, R - I0);
        Scratch<T> s(bn, bc, d, 0);
        ledger.add_load(bn * d + (labeled ? bn : 0));
        std::fill(s.mI.begin(), s.mI.end(), ninf);
        std::fill(s.sI.begin(), s.sI.end(), T(0));
        for (std::size_t J0 = 0; J0 < C; J0 += bc) {
            const std::size_t bm = std::min(bc, C - J0);
            ledger.add_load(bm * d + 2 * bm + (labeled ? bm : 0));
            transpose_keys(c.kpts, d, J0, bm, c.scaled2_eps, s.kt);
            score_tile(c, I0, bn, J0, bm, s.kt, s.tile);
            for (std::size_t i = 0; i < bn; ++i) {
                const T* srow = s.tile.data() + i * bc;
                T tmax = srow[0];
                for (std::size_t j = 1; j < bm; ++j) tmax = std::max(tmax, srow[j]);
                const T mnew = std::max(s.mI[i], tmax);
                for (std::size_t j = 0; j < bm; ++j) s.wbuf[j] = fast_exp(srow[j] - mnew);
                const T tsum = pairwise_sum<T>(bm, [&](std::size_t j) { return s.wbuf[j]; });
                s.sI[i] = rescale_factor(s.mI[i], mnew) * s.sI[i] + tsum;
                s.mI[i] = mnew;
            }
        }
        for (std::size_t i = 0; i < bn; ++i) {
            const T v = -eps * (s.mI[i] + std::log(s.sI[i]));
            if (!std::isfinite(v))
                throw NumericalError("non-finite potential produced by streaming LSE update");
            out[I0 + i] = v;
        }
        ledger.add_store(bn);
    });
    return out;
}

// out = diag(w (.) exp(fhat/eps + m)) O accumulated against V; the Hadamard
// variant multiplies each exp weight by <A_i, B_j>. Double precision only.
Mat apply_core(const CoreCtx<double>& c, const Vec& row_weights, const Vec& row_fhat,
               const Mat& V, const Mat* A, const Mat* B, std::size_t br, std::size_t bc,
               double eps, IoLedger& ledger) {
    const std::size_t R = c.R, C = c.C, d = c.d;
    const std::size_t p = V.cols();
    const std::size_t r = A ? A->cols() : 0;
    br = std::min(br, R);
    bc = std::min(bc, C);
    const std::size_t nblocks = (R + br - 1) / br;
    const bool labeled = c.qlab != nullptr;
    const double inv_eps = 1.0 / eps;
    Mat out(R, p);

    parallel_for_blocks(nblocks, [&](std::size_t blk) {
        const std::size_t I0 = blk * br;
        const std::size_t bn = std::min(br, R - I0);
        Scratch<double> s(bn, bc, d, p);
        ledger.add_load(bn * d + 2 * bn + (labeled ? bn : 0) + bn * r);
        std::fill(s.mI.begin(), s.mI.end(), -std::numeric_limits<double>::infinity());
        std::fill(s.oI.begin(), s.oI.end(), 0.0);
        for (std::size_t J0 = 0; J0 < C; J0 += bc) {
            const std::size_t bm = std::min(bc, C - J0);
            ledger.add_load(bm * d + 2 * bm + bm * p + (labeled ? bm : 0) + bm * r);
            transpose_keys(c.kpts, d, J0, bm, c.scaled2_eps, s.kt);
            score_tile(c, I0, bn, J0, bm, s.kt, s.tile);
            for (std::size_t i = 0; i < bn; ++i) {
                const double* srow = s.tile.data() + i * bc;
                double tmax = srow[0];
                for (std::size_t j = 1; j < bm; ++j) tmax = std::max(tmax, srow[j]);
                const double mnew = std::max(s.mI[i], tmax);
                for (std::size_t j = 0; j < bm; ++j) s.wbuf[j] = fast_exp(srow[j] - mnew);
                if (A) {
                    const double* ai = A->row(I0 + i);
                    for (std::size_t j = 0; j < bm; ++j) {
                        const double* bj = B->row(J0 + j);
                        double wd = 0.0;
                        for (std::size_t q = 0; q < r; ++q) wd += ai[q] * bj[q];
                        s.wbuf[j] *= wd;
                    }
                }
                const double resc = rescale_factor(s.mI[i], mnew);
                double* orow = s.oI.data() + i * p;
                for (std::size_t col = 0; col < p; ++col) {
                    const double part = pairwise_sum<double>(
                        bm, [&](std::size_t j) { return s.wbuf[j] * V(J0 + j, col); });
                    orow[col] = resc * orow[col] + part;
                }
                s.mI[i] = mnew;
            }
        }
        for (std::size_t i = 0; i < bn; ++i) {
            const double arg = row_fhat[I0 + i] * inv_eps + s.mI[i];
            if (arg > 709.0)
                throw NumericalError(
                    "overflow in transport application, potentials are not stabilized");
            const double scale = row_weights[I0 + i] * fast_exp(arg);
            const double* orow = s.oI.data() + i * p;
            double* dst = out.row(I0 + i);
            for (std::size_t col = 0; col < p; ++col) {
                dst[col] = scale * orow[col];
                if (!std::isfinite(dst[col]))
                    throw NumericalError("non-finite entry in transport application output");
            }
        }
        ledger.add_store(bn * p);
    });
    return out;
}

CoreCtx<double> make_ctx_f(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                           const Vec& g_hat, const CostSpec& spec, double eps) {
    CoreCtx<double> c;
    c.qpts = src.points.data();
    c.R = src.size();
    c.kpts = tgt.points.data();
    c.C = tgt.size();
    c.d = src.dim();
    if (spec.kind == CostKind::LabelAugmented) {
        c.qlab = src.labels->data();
        c.klab = tgt.labels->data();
        c.wtab = spec.label_cost.data();
        c.wdim = spec.label_cost.cols();
        c.lam2_eps = spec.lambda2 / eps;
    }
    c.scaled2_eps = 2.0 * spec.feature_scale() / eps;
    c.bias2.resize(tgt.size());
    for (std::size_t j = 0; j < tgt.size(); ++j)
        c.bias2[j] = (g_hat[j] + eps * std::log(tgt.weights[j])) / eps;
    return c;
}

CoreCtx<double> make_ctx_g(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                           const Vec& f_hat, const CostSpec& spec, double eps) {
    CoreCtx<double> c;
    c.qpts = tgt.points.data();
    c.R = tgt.size();
    c.kpts = src.points.data();
    c.C = src.size();
    c.d = src.dim();
    if (spec.kind == CostKind::LabelAugmented) {
        c.qlab = tgt.labels->data();
        c.klab = src.labels->data();
        c.wtab = spec.label_cost.data();
        c.wdim = spec.label_cost.cols();
        c.lam2_eps = spec.lambda2 / eps;
    }
    c.scaled2_eps = 2.0 * spec.feature_scale() / eps;
    c.bias2.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        c.bias2[i] = (f_hat[i] + eps * std::log(src.weights[i])) / eps;
    return c;
}

void check_potentials(const ShiftedPotentials& p, std::size_t n, std::size_t m) {
    if (p.f_hat.size() != n || p.g_hat.size() != m)
        throw ValidationError("potential lengths do not match the measures");
    if (!(p.eps > 0.0)) throw ValidationError("potentials carry nonpositive eps");
    if (!all_finite(p.f_hat) || !all_finite(p.g_hat))
        throw ValidationError("non-finite potential entry");
}

uint64_t wtab_scalars(const CostSpec& spec) {
    if (spec.kind != CostKind::LabelAugmented) return 0;
    return static_cast<uint64_t>(spec.label_cost.size());
}

}  // namespace

void debug_break_lse(bool broken) { g_break_lse.store(broken); }

Vec update_f_hat(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const Vec& g_hat,
                 const CostSpec& spec, double eps, const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    if (g_hat.size() != tgt.size()) throw ValidationError("g_hat length mismatch");
    if (!all_finite(g_hat)) throw ValidationError("non-finite g_hat entry");
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));  // V x V table cached once per call
    CoreCtx<double> c = make_ctx_f(src, tgt, g_hat, spec, eps);
    return lse_reduce(c, tiles.block_rows, tiles.block_cols, eps, ledger);
}

Vec update_g_hat(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const Vec& f_hat,
                 const CostSpec& spec, double eps, const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    if (f_hat.size() != src.size()) throw ValidationError("f_hat length mismatch");
    if (!all_finite(f_hat)) throw ValidationError("non-finite f_hat entry");
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));
    CoreCtx<double> c = make_ctx_g(src, tgt, f_hat, spec, eps);
    return lse_reduce(c, tiles.block_cols, tiles.block_rows, eps, ledger);
}

ShiftedPotentials symmetric_update(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                   const ShiftedPotentials& p, const CostSpec& spec,
                                   const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    check_potentials(p, src.size(), tgt.size());
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));

    // Both reductions read the same old pair; nothing is written until both
    // half-steps are available.
    CoreCtx<double> cf = make_ctx_f(src, tgt, p.g_hat, spec, p.eps);
    Vec f_fresh = lse_reduce(cf, tiles.block_rows, tiles.block_cols, p.eps, ledger);
    CoreCtx<double> cg = make_ctx_g(src, tgt, p.f_hat, spec, p.eps);
    Vec g_fresh = lse_reduce(cg, tiles.block_cols, tiles.block_rows, p.eps, ledger);
    ledger.add_load(src.size() + tgt.size());  // old pair enters the averaging

    ShiftedPotentials out;
    out.eps = p.eps;
    out.f_hat.resize(src.size());
    out.g_hat.resize(tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        out.f_hat[i] = 0.5 * p.f_hat[i] + 0.5 * f_fresh[i];
    for (std::size_t j = 0; j < tgt.size(); ++j)
        out.g_hat[j] = 0.5 * p.g_hat[j] + 0.5 * g_fresh[j];
    return out;
}

Mat apply_plan(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
               const ShiftedPotentials& p, const CostSpec& spec, const Mat& V,
               const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    check_potentials(p, src.size(), tgt.size());
    if (V.rows() != tgt.size()) throw ValidationError("apply_plan: V row count != m");
    if (!all_finite({V.data(), V.size()})) throw ValidationError("apply_plan: non-finite V");
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    (V.cols() == 1 ? ledger.transport_vector_applies : ledger.transport_matrix_applies)
        .fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));
    CoreCtx<double> c = make_ctx_f(src, tgt, p.g_hat, spec, p.eps);
    return apply_core(c, src.weights, p.f_hat, V, nullptr, nullptr, tiles.block_rows,
                      tiles.block_cols, p.eps, ledger);
}

Mat apply_plan_adjoint(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                       const ShiftedPotentials& p, const CostSpec& spec, const Mat& U,
                       const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    check_potentials(p, src.size(), tgt.size());
    if (U.rows() != src.size()) throw ValidationError("apply_plan_adjoint: U row count != n");
    if (!all_finite({U.data(), U.size()}))
        throw ValidationError("apply_plan_adjoint: non-finite U");
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    (U.cols() == 1 ? ledger.transport_vector_applies : ledger.transport_matrix_applies)
        .fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));
    CoreCtx<double> c = make_ctx_g(src, tgt, p.f_hat, spec, p.eps);
    return apply_core(c, tgt.weights, p.g_hat, U, nullptr, nullptr, tiles.block_cols,
                      tiles.block_rows, p.eps, ledger);
}

Mat apply_hadamard_plan(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                        const ShiftedPotentials& p, const CostSpec& spec, const Mat& A,
                        const Mat& B, const Mat& V, const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    check_potentials(p, src.size(), tgt.size());
    if (A.rows() != src.size() || B.rows() != tgt.size() || A.cols() != B.cols())
        throw ValidationError("apply_hadamard_plan: weight factor shape mismatch");
    if (A.cols() < 1) throw ValidationError("apply_hadamard_plan: rank factor r must be >= 1");
    if (V.rows() != tgt.size()) throw ValidationError("apply_hadamard_plan: V row count != m");
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    ledger.hadamard_applies.fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));
    CoreCtx<double> c = make_ctx_f(src, tgt, p.g_hat, spec, p.eps);
    return apply_core(c, src.weights, p.f_hat, V, &A, &B, tiles.block_rows, tiles.block_cols,
                      p.eps, ledger);
}

std::pair<Vec, Vec> induced_marginals(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                      const ShiftedPotentials& p, const CostSpec& spec,
                                      const TileConfig& tiles, IoLedger& ledger) {
    validate_problem(src, tgt, spec);
    validate_tiles(tiles);
    check_potentials(p, src.size(), tgt.size());
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    ledger.add_load(wtab_scalars(spec));

    CoreCtx<double> cf = make_ctx_f(src, tgt, p.g_hat, spec, p.eps);
    Vec f_plus = lse_reduce(cf, tiles.block_rows, tiles.block_cols, p.eps, ledger);
    ledger.add_load(2 * src.size());  // fhat and a enter the closed-form epilogue
    CoreCtx<double> cg = make_ctx_g(src, tgt, p.f_hat, spec, p.eps);
    Vec g_plus = lse_reduce(cg, tiles.block_cols, tiles.block_rows, p.eps, ledger);
    ledger.add_load(2 * tgt.size());

    const double inv_eps = 1.0 / p.eps;
    Vec r(src.size()), c(tgt.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = src.weights[i] * fast_exp((p.f_hat[i] - f_plus[i]) * inv_eps);
        if (!std::isfinite(r[i])) throw NumericalError("non-finite induced row marginal");
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
        c[j] = tgt.weights[j] * fast_exp((p.g_hat[j] - g_plus[j]) * inv_eps);
        if (!std::isfinite(c[j])) throw NumericalError("non-finite induced column marginal");
    }
    return {std::move(r), std::move(c)};
}

// --- single precision half-steps (benchmark path, squared-Euclidean) --------

FloatCloud to_float_cloud(const DiscreteMeasure& m) {
    FloatCloud f;
    f.n = m.size();
    f.d = m.dim();
    f.points.resize(f.n * f.d);
    for (std::size_t i = 0; i < f.points.size(); ++i)
        f.points[i] = static_cast<float>(m.points.data()[i]);
    f.weights.resize(f.n);
    for (std::size_t i = 0; i < f.n; ++i) f.weights[i] = static_cast<float>(m.weights[i]);
    return f;
}

namespace {
CoreCtx<float> make_ctx_f32(const FloatCloud& q, const FloatCloud& k,
                            const std::vector<float>& k_hat, float eps) {
    CoreCtx<float> c;
    c.qpts = q.points.data();
    c.R = q.n;
    c.kpts = k.points.data();
    c.C = k.n;
    c.d = q.d;
    c.scaled2_eps = 2.0f / eps;
    c.bias2.resize(k.n);
    for (std::size_t j = 0; j < k.n; ++j)
        c.bias2[j] = (k_hat[j] + eps * std::log(k.weights[j])) / eps;
    return c;
}
}  // namespace

std::vector<float> update_f_hat_f32(const FloatCloud& src, const FloatCloud& tgt,
                                    const std::vector<float>& g_hat, float eps,
                                    const TileConfig& tiles, IoLedger& ledger) {
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    CoreCtx<float> c = make_ctx_f32(src, tgt, g_hat, eps);
    return lse_reduce(c, tiles.block_rows, tiles.block_cols, eps, ledger);
}

std::vector<float> update_g_hat_f32(const FloatCloud& src, const FloatCloud& tgt,
                                    const std::vector<float>& f_hat, float eps,
                                    const TileConfig& tiles, IoLedger& ledger) {
    ledger.kernel_invocations.fetch_add(1, std::memory_order_relaxed);
    CoreCtx<float> c = make_ctx_f32(tgt, src, f_hat, eps);
    return lse_reduce(c, tiles.block_cols, tiles.block_rows, eps, ledger);
}

// --- closed-form schedules ---------------------------------------------------

namespace {
uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }
}  // namespace

uint64_t io_count_f_update(std::size_t n, std::size_t m, std::size_t d, const TileConfig& tiles) {
    const uint64_t bn = std::min<uint64_t>(tiles.block_rows, n);
    return uint64_t(n) * d + ceil_div(n, bn) * uint64_t(m) * (d + 2) + n;
}

uint64_t io_count_g_update(std::size_t n, std::size_t m, std::size_t d, const TileConfig& tiles) {
    const uint64_t bm = std::min<uint64_t>(tiles.block_cols, m);
    return uint64_t(m) * d + ceil_div(m, bm) * uint64_t(n) * (d + 2) + m;
}

uint64_t io_count_symmetric_update(std::size_t n, std::size_t m, std::size_t d,
                                   const TileConfig& tiles) {
    // two fused reductions plus a re-read of the old pair for the averaging
    return io_count_f_update(n, m, d, tiles) + io_count_g_update(n, m, d, tiles) + n + m;
}

uint64_t io_count_apply_plan(std::size_t n, std::size_t m, std::size_t d, std::size_t p,
                             const TileConfig& tiles) {
    const uint64_t bn = std::min<uint64_t>(tiles.block_rows, n);
    return uint64_t(n) * (d + 2) + ceil_div(n, bn) * uint64_t(m) * (d + 2 + p) + uint64_t(n) * p;
}

uint64_t io_count_apply_plan_adjoint(std::size_t n, std::size_t m, std::size_t d, std::size_t p,
                                     const TileConfig& tiles) {
    const uint64_t bm = std::min<uint64_t>(tiles.block_cols, m);
    return uint64_t(m) * (d + 2) + ceil_div(m, bm) * uint64_t(n) * (d + 2 + p) + uint64_t(m) * p;
}

uint64_t io_count_apply_hadamard(std::size_t n, std::size_t m, std::size_t d, std::size_t r,
                                 std::size_t p, const TileConfig& tiles) {
    const uint64_t bn = std::min<uint64_t>(tiles.block_rows, n);
    return uint64_t(n) * (d + 2 + r) + ceil_div(n, bn) * uint64_t(m) * (d + 2 + r + p) +
           uint64_t(n) * p;
}

uint64_t io_count_induced_marginals(std::size_t n, std::size_t m, std::size_t d,
                                    const TileConfig& tiles) {
    // each reduction plus the 2n (resp. 2m) closed-form epilogue loads
    return io_count_f_update(n, m, d, tiles) + 2 * uint64_t(n) +
           io_count_g_update(n, m, d, tiles) + 2 * uint64_t(m);
}

bool tiles_fit_sram(const TileConfig& tiles, std::size_t d, std::size_t sram_scalars) {
    const uint64_t need = uint64_t(tiles.block_cols) * d + uint64_t(tiles.block_rows) * d +
                          tiles.block_cols + 2 * uint64_t(tiles.block_rows);
    return need <= sram_scalars;
}

}  // namespace fsk::stream
