#include "doctest.h"

#include <cmath>

#include "fsk/core.hpp"
#include "fsk/ledger.hpp"
#include "fsk/mathutil.hpp"
#include "fsk/rng.hpp"
#include "fsk/stream.hpp"

using namespace fsk;

namespace {

DiscreteMeasure random_measure(Rng& rng, std::size_t n, std::size_t d, bool uniform = true) {
    Mat pts(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < d; ++t) pts(i, t) = rng.normal();
    DiscreteMeasure m;
    m.points = std::move(pts);
    m.weights = uniform ? Vec(n, 1.0 / double(n)) : rng.simplex_weights(n);
    return m;
}

// test-only oracle: materialized biased scores reduced with std::exp
Vec dense_f_half_step(const DiscreteMeasure& src, const DiscreteMeasure& tgt, const Vec& g_hat,
                      double eps) {
    const std::size_t n = src.size(), m = tgt.size(), d = src.dim();
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec scores(m);
        for (std::size_t j = 0; j < m; ++j) {
            double dotxy = 0.0;
            for (std::size_t t = 0; t < d; ++t) dotxy += src.points(i, t) * tgt.points(j, t);
            scores[j] = (2.0 * dotxy + g_hat[j] + eps * std::log(tgt.weights[j])) / eps;
        }
        out[i] = -eps * lse(scores);
    }
    return out;
}

// test-only oracle: plan entries from shifted potentials, P_ij = a b exp((fh+gh+2x.y)/eps)
Mat dense_plan_from(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                    const ShiftedPotentials& p) {
    const std::size_t n = src.size(), m = tgt.size(), d = src.dim();
    Mat P(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double dotxy = 0.0;
            for (std::size_t t = 0; t < d; ++t) dotxy += src.points(i, t) * tgt.points(j, t);
            P(i, j) = src.weights[i] * tgt.weights[j] *
                      std::exp((p.f_hat[i] + p.g_hat[j] + 2.0 * dotxy) / p.eps);
        }
    return P;
}

ShiftedPotentials rough_potentials(const DiscreteMeasure& src, const DiscreteMeasure& tgt,
                                   double eps, int iters, const TileConfig& tiles) {
    IoLedger led;
    CostSpec spec;
    ShiftedPotentials p;
    p.eps = eps;
    Vec alpha = squared_norms(src.points), beta = squared_norms(tgt.points);
    p.f_hat.resize(src.size());
    p.g_hat.resize(tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i) p.f_hat[i] = -alpha[i];
    for (std::size_t j = 0; j < tgt.size(); ++j) p.g_hat[j] = -beta[j];
    for (int k = 0; k < iters; ++k) {
        p.f_hat = stream::update_f_hat(src, tgt, p.g_hat, spec, eps, tiles, led);
        p.g_hat = stream::update_g_hat(src, tgt, p.f_hat, spec, eps, tiles, led);
    }
    return p;
}

double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace

TEST_CASE("f-update trivial cases") {
    CostSpec spec;
    TileConfig tiles;
    IoLedger led;

    DiscreteMeasure one = make_uniform_measure(Mat(1, 1, 0.0));
    Vec f = stream::update_f_hat(one, one, Vec{0.0}, spec, 0.3, tiles, led);
    CHECK(f[0] == doctest::Approx(0.0));

    // m = 1: single-column reduction collapses to -(2 x.y + g_hat)
    Rng rng(5);
    DiscreteMeasure src = random_measure(rng, 6, 3);
    DiscreteMeasure tgt = random_measure(rng, 1, 3);
    Vec ghat{0.7};
    Vec got = stream::update_f_hat(src, tgt, ghat, spec, 0.45, tiles, led);
    for (std::size_t i = 0; i < 6; ++i) {
        double dotxy = 0.0;
        for (std::size_t t = 0; t < 3; ++t) dotxy += src.points(i, t) * tgt.points(0, t);
        CHECK(got[i] == doctest::Approx(-(2.0 * dotxy + 0.7)).epsilon(1e-13));
    }
}

TEST_CASE("f-update matches the dense half-step oracle") {
    Rng rng(101);
    DiscreteMeasure src = random_measure(rng, 64, 4, false);
    DiscreteMeasure tgt = random_measure(rng, 64, 4, false);
    Vec ghat = rng.normal_vector(64);
    CostSpec spec;
    TileConfig tiles{16, 24};
    IoLedger led;
    Vec got = stream::update_f_hat(src, tgt, ghat, spec, 0.1, tiles, led);
    Vec want = dense_f_half_step(src, tgt, ghat, 0.1);
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) <= 1e-12 * (1.0 + std::abs(want[i])));
}

TEST_CASE("g-update mirrors the f-update") {
    Rng rng(17);
    DiscreteMeasure src = random_measure(rng, 23, 3, false);
    DiscreteMeasure tgt = random_measure(rng, 31, 3, false);
    Vec fhat = rng.normal_vector(23);
    CostSpec spec;
    TileConfig tiles{8, 8};
    IoLedger led;
    Vec got = stream::update_g_hat(src, tgt, fhat, spec, 0.2, tiles, led);
    // swap roles of the measures and reuse the f oracle
    Vec want = dense_f_half_step(tgt, src, fhat, 0.2);
    CHECK(max_abs_diff(got, want) < 1e-12);
}

TEST_CASE("tiling invariance for the update kernels") {
    Rng rng(23);
    DiscreteMeasure src = random_measure(rng, 53, 3, false);
    DiscreteMeasure tgt = random_measure(rng, 41, 3, false);
    Vec ghat = rng.normal_vector(41);
    CostSpec spec;
    IoLedger led;
    const TileConfig single{53, 41};
    Vec ref = stream::update_f_hat(src, tgt, ghat, spec, 0.15, single, led);
    for (std::size_t bn : {std::size_t{1}, std::size_t{5}, std::size_t{53}}) {
        for (std::size_t bm : {std::size_t{1}, std::size_t{3}, std::size_t{7}, std::size_t{41}}) {
            TileConfig t{bn, bm};
            Vec got = stream::update_f_hat(src, tgt, ghat, spec, 0.15, t, led);
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK(std::abs(got[i] - ref[i]) <= 1e-12 * (1.0 + std::abs(ref[i])));
        }
    }
}

TEST_CASE("symmetric update is a no-op at a fixed point and averages otherwise") {
    Rng rng(31);
    DiscreteMeasure src = random_measure(rng, 20, 2);
    DiscreteMeasure tgt = random_measure(rng, 22, 2);
    CostSpec spec;
    TileConfig tiles{7, 9};
    IoLedger led;

    // run alternating long enough to be at the fixed point
    ShiftedPotentials p = rough_potentials(src, tgt, 0.5, 300, tiles);
    ShiftedPotentials q = stream::symmetric_update(src, tgt, p, spec, tiles, led);
    CHECK(max_abs_diff(q.f_hat, p.f_hat) < 1e-10);
    CHECK(max_abs_diff(q.g_hat, p.g_hat) < 1e-10);

    // from zero potentials one symmetric step equals the average of the old
    // pair and fresh half-steps
    ShiftedPotentials zero;
    zero.eps = 0.5;
    Vec alpha = squared_norms(src.points), beta = squared_norms(tgt.points);
    zero.f_hat.resize(src.size());
    zero.g_hat.resize(tgt.size());
    for (std::size_t i = 0; i < src.size(); ++i) zero.f_hat[i] = -alpha[i];
    for (std::size_t j = 0; j < tgt.size(); ++j) zero.g_hat[j] = -beta[j];
    ShiftedPotentials s = stream::symmetric_update(src, tgt, zero, spec, tiles, led);
    Vec f_fresh = dense_f_half_step(src, tgt, zero.g_hat, 0.5);
    Vec g_fresh = dense_f_half_step(tgt, src, zero.f_hat, 0.5);
    for (std::size_t i = 0; i < src.size(); ++i)
        CHECK(s.f_hat[i] ==
              doctest::Approx(0.5 * zero.f_hat[i] + 0.5 * f_fresh[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < tgt.size(); ++j)
        CHECK(s.g_hat[j] ==
              doctest::Approx(0.5 * zero.g_hat[j] + 0.5 * g_fresh[j]).epsilon(1e-12));

    // 1x1 same-point case stays at 0
    DiscreteMeasure one = make_uniform_measure(Mat(1, 1, 0.0));
    ShiftedPotentials z1{{0.0}, {0.0}, 0.3};
    ShiftedPotentials r1 = stream::symmetric_update(one, one, z1, spec, tiles, led);
    CHECK(r1.f_hat[0] == doctest::Approx(0.0));
    CHECK(r1.g_hat[0] == doctest::Approx(0.0));
}

TEST_CASE("apply_plan matches the dense plan product") {
    Rng rng(47);
    DiscreteMeasure src = random_measure(rng, 64, 4, false);
    DiscreteMeasure tgt = random_measure(rng, 64, 4, false);
    CostSpec spec;
    TileConfig tiles{16, 16};
    IoLedger led;
    ShiftedPotentials p = rough_potentials(src, tgt, 0.3, 20, tiles);

    Mat V(64, 3);
    for (std::size_t j = 0; j < 64; ++j)
        for (std::size_t c = 0; c < 3; ++c) V(j, c) = rng.normal();

    Mat got = stream::apply_plan(src, tgt, p, spec, V, tiles, led);
    Mat P = dense_plan_from(src, tgt, p);
    Mat want(64, 3);
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t c = 0; c < 3; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < 64; ++j) s += P(i, j) * V(j, c);
            want(i, c) = s;
        }
    double scale = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i)
        scale = std::max(scale, std::abs(want.data()[i]));
    CHECK(max_abs_diff(got, want) <= 1e-10 * (1.0 + scale));

    // V = ones gives the induced row marginal
    Mat ones(64, 1, 1.0);
    Mat r_cols = stream::apply_plan(src, tgt, p, spec, ones, tiles, led);
    auto [r, c] = stream::induced_marginals(src, tgt, p, spec, tiles, led);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK(r_cols(i, 0) == doctest::Approx(r[i]).epsilon(1e-12));
}

TEST_CASE("1x1 converged case: apply_plan(V) = V and P = [[1]]") {
    CostSpec spec;
    TileConfig tiles;
    IoLedger led;
    DiscreteMeasure one = make_uniform_measure(Mat(1, 1, 0.0));
    ShiftedPotentials p{{0.0}, {0.0}, 0.7};
    Mat V(1, 2);
    V(0, 0) = 3.5;
    V(0, 1) = -1.25;
    Mat out = stream::apply_plan(one, one, p, spec, V, tiles, led);
    CHECK(out(0, 0) == doctest::Approx(3.5));
    CHECK(out(0, 1) == doctest::Approx(-1.25));
}

TEST_CASE("adjointness of apply_plan and apply_plan_adjoint") {
    Rng rng(53);
    DiscreteMeasure src = random_measure(rng, 19, 3, false);
    DiscreteMeasure tgt = random_measure(rng, 27, 3, false);
    CostSpec spec;
    TileConfig tiles{5, 6};
    IoLedger led;
    ShiftedPotentials p = rough_potentials(src, tgt, 0.4, 10, tiles);

    Mat V(27, 2), U(19, 2);
    for (std::size_t j = 0; j < 27; ++j)
        for (std::size_t c = 0; c < 2; ++c) V(j, c) = rng.normal();
    for (std::size_t i = 0; i < 19; ++i)
        for (std::size_t c = 0; c < 2; ++c) U(i, c) = rng.normal();

    Mat PV = stream::apply_plan(src, tgt, p, spec, V, tiles, led);
    Mat PtU = stream::apply_plan_adjoint(src, tgt, p, spec, U, tiles, led);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < 19; ++i)
        for (std::size_t c = 0; c < 2; ++c) lhs += PV(i, c) * U(i, c);
    for (std::size_t j = 0; j < 27; ++j)
        for (std::size_t c = 0; c < 2; ++c) rhs += PtU(j, c) * V(j, c);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

    // U = ones gives the induced column marginal
    Mat ones(19, 1, 1.0);
    Mat c_col = stream::apply_plan_adjoint(src, tgt, p, spec, ones, tiles, led);
    auto [r, c] = stream::induced_marginals(src, tgt, p, spec, tiles, led);
    for (std::size_t j = 0; j < 27; ++j)
        CHECK(c_col(j, 0) == doctest::Approx(c[j]).epsilon(1e-12));
}

TEST_CASE("hadamard-weighted transport") {
    Rng rng(61);
    DiscreteMeasure src = random_measure(rng, 32, 3, false);
    DiscreteMeasure tgt = random_measure(rng, 32, 3, false);
    CostSpec spec;
    TileConfig tiles{8, 8};
    IoLedger led;
    ShiftedPotentials p = rough_potentials(src, tgt, 0.3, 15, tiles);

    Mat A(32, 2), B(32, 2), V(32, 2);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t c = 0; c < 2; ++c) {
            A(i, c) = rng.normal();
            B(i, c) = rng.normal();
            V(i, c) = rng.normal();
        }

    Mat got = stream::apply_hadamard_plan(src, tgt, p, spec, A, B, V, tiles, led);
    Mat P = dense_plan_from(src, tgt, p);
    Mat want(32, 2);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t c = 0; c < 2; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < 32; ++j) {
                double w = A(i, 0) * B(j, 0) + A(i, 1) * B(j, 1);
                s += P(i, j) * w * V(j, c);
            }
            want(i, c) = s;
        }
    double scale = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i)
        scale = std::max(scale, std::abs(want.data()[i]));
    CHECK(max_abs_diff(got, want) <= 1e-10 * (1.0 + scale));

    // all-ones rank-1 weight reduces to apply_plan
    Mat A1(32, 1, 1.0), B1(32, 1, 1.0);
    Mat plain = stream::apply_plan(src, tgt, p, spec, V, tiles, led);
    Mat viaw = stream::apply_hadamard_plan(src, tgt, p, spec, A1, B1, V, tiles, led);
    CHECK(max_abs_diff(plain, viaw) < 1e-12);

    // V = 0 maps to 0
    Mat zero(32, 2, 0.0);
    Mat outz = stream::apply_hadamard_plan(src, tgt, p, spec, A, B, zero, tiles, led);
    CHECK(max_abs_diff(outz, zero) == 0.0);
}

TEST_CASE("induced marginals: mass identity and consistency") {
    Rng rng(71);
    DiscreteMeasure src = random_measure(rng, 33, 2, false);
    DiscreteMeasure tgt = random_measure(rng, 21, 2, false);
    CostSpec spec;
    TileConfig tiles{16, 8};
    IoLedger led;
    ShiftedPotentials p = rough_potentials(src, tgt, 0.6, 5, tiles);
    auto [r, c] = stream::induced_marginals(src, tgt, p, spec, tiles, led);
    double mr = 0.0, mc = 0.0;
    for (double v : r) mr += v;
    for (double v : c) mc += v;
    CHECK(mr == doctest::Approx(mc).epsilon(1e-12));

    // converged potentials give r = a, c = b
    ShiftedPotentials q = rough_potentials(src, tgt, 0.6, 400, tiles);
    auto [r2, c2] = stream::induced_marginals(src, tgt, q, spec, tiles, led);
    for (std::size_t i = 0; i < r2.size(); ++i)
        CHECK(r2[i] == doctest::Approx(src.weights[i]).epsilon(1e-8));
    for (std::size_t j = 0; j < c2.size(); ++j)
        CHECK(c2[j] == doctest::Approx(tgt.weights[j]).epsilon(1e-8));
}

TEST_CASE("ledger matches the closed-form schedule for the f-update") {
    struct Case {
        std::size_t n, m, bn, bm, d;
    };
    const Case cases[] = {
        {64, 64, 64, 64, 8}, {100, 64, 32, 16, 8}, {57, 31, 5, 7, 3},
        {1, 10, 1, 3, 2},    {128, 100, 64, 100, 16},
    };
    Rng rng(83);
    CostSpec spec;
    for (const auto& cs : cases) {
        DiscreteMeasure src = random_measure(rng, cs.n, cs.d);
        DiscreteMeasure tgt = random_measure(rng, cs.m, cs.d);
        Vec ghat = rng.normal_vector(cs.m);
        TileConfig tiles{cs.bn, cs.bm};
        IoLedger led;
        stream::update_f_hat(src, tgt, ghat, spec, 0.2, tiles, led);
        CHECK(led.total_scalars() == stream::io_count_f_update(cs.n, cs.m, cs.d, tiles));

        IoLedger led2;
        stream::update_g_hat(src, tgt, rng.normal_vector(cs.n), spec, 0.2, tiles, led2);
        CHECK(led2.total_scalars() == stream::io_count_g_update(cs.n, cs.m, cs.d, tiles));
    }
}

TEST_CASE("ledger matches the closed-form schedules for apply and marginals") {
    Rng rng(89);
    DiscreteMeasure src = random_measure(rng, 45, 5);
    DiscreteMeasure tgt = random_measure(rng, 33, 5);
    CostSpec spec;
    TileConfig tiles{8, 16};
    ShiftedPotentials p = rough_potentials(src, tgt, 0.5, 3, tiles);

    Mat V(33, 4), U(45, 2), A(45, 3), B(33, 3);
    for (std::size_t i = 0; i < V.size(); ++i) V.data()[i] = rng.normal();
    for (std::size_t i = 0; i < U.size(); ++i) U.data()[i] = rng.normal();
    for (std::size_t i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
    for (std::size_t i = 0; i < B.size(); ++i) B.data()[i] = rng.normal();

    {
        IoLedger led;
        stream::apply_plan(src, tgt, p, spec, V, tiles, led);
        CHECK(led.total_scalars() == stream::io_count_apply_plan(45, 33, 5, 4, tiles));
    }
    {
        IoLedger led;
        stream::apply_plan_adjoint(src, tgt, p, spec, U, tiles, led);
        CHECK(led.total_scalars() == stream::io_count_apply_plan_adjoint(45, 33, 5, 2, tiles));
    }
    {
        IoLedger led;
        stream::apply_hadamard_plan(src, tgt, p, spec, A, B, V, tiles, led);
        CHECK(led.total_scalars() == stream::io_count_apply_hadamard(45, 33, 5, 3, 4, tiles));
    }
    {
        IoLedger led;
        stream::induced_marginals(src, tgt, p, spec, tiles, led);
        CHECK(led.total_scalars() == stream::io_count_induced_marginals(45, 33, 5, tiles));
    }
    {
        IoLedger led;
        stream::symmetric_update(src, tgt, p, spec, tiles, led);
        CHECK(led.total_scalars() == stream::io_count_symmetric_update(45, 33, 5, tiles));
    }
}

TEST_CASE("single-block degenerate forms of the io count") {
    TileConfig one_block{64, 64};
    CHECK(stream::io_count_f_update(64, 64, 8, one_block) == 64 * 8 + 64 * (8 + 2) + 64);
    TileConfig row_at_a_time{1, 64};
    CHECK(stream::io_count_f_update(64, 64, 8, row_at_a_time) ==
          64 * 8 + 64ull * 64 * (8 + 2) + 64);
}

TEST_CASE("sram fit check") {
    CHECK(stream::tiles_fit_sram(TileConfig{16, 16}, 4, 16 * 4 + 16 * 4 + 16 + 32));
    CHECK_FALSE(stream::tiles_fit_sram(TileConfig{16, 16}, 4, 100));
}

TEST_CASE("update kernels reject invalid input") {
    CostSpec spec;
    TileConfig tiles;
    IoLedger led;
    DiscreteMeasure one = make_uniform_measure(Mat(1, 1, 0.0));
    CHECK_THROWS_AS(stream::update_f_hat(one, one, Vec{0.0}, spec, -1.0, tiles, led),
                    ValidationError);
    CHECK_THROWS_AS(stream::update_f_hat(one, one, Vec{0.0, 1.0}, spec, 1.0, tiles, led),
                    ValidationError);
    Vec bad{std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(stream::update_f_hat(one, one, bad, spec, 1.0, tiles, led), ValidationError);
}

TEST_CASE("label-augmented scores match the dense label cost") {
    Rng rng(97);
    const std::size_t n = 18, m = 22, d = 2;
    Mat W(3, 3, 0.0);
    W(0, 1) = W(1, 0) = 1.5;
    W(0, 2) = W(2, 0) = 0.75;
    W(1, 2) = W(2, 1) = 2.25;
    std::vector<int32_t> la(n), lb(m);
    for (auto& l : la) l = static_cast<int32_t>(rng.next_u64() % 3);
    for (auto& l : lb) l = static_cast<int32_t>(rng.next_u64() % 3);
    DiscreteMeasure src = random_measure(rng, n, d);
    DiscreteMeasure tgt = random_measure(rng, m, d);
    src.labels = la;
    tgt.labels = lb;
    CostSpec spec = CostSpec::label_augmented(0.5, 0.5, W);

    Vec ghat = rng.normal_vector(m);
    TileConfig tiles{5, 4};
    IoLedger led;
    Vec got = stream::update_f_hat(src, tgt, ghat, spec, 0.25, tiles, led);

    // oracle mirrors the unshifted update with the materialized augmented cost
    const double eps = 0.25;
    Vec beta = potential_shift(tgt.points, spec);
    for (std::size_t i = 0; i < n; ++i) {
        Vec scores(m);
        for (std::size_t j = 0; j < m; ++j) {
            double dotxy = 0.0;
            for (std::size_t t = 0; t < d; ++t) dotxy += src.points(i, t) * tgt.points(j, t);
            double label_term = 0.5 * W(la[i], lb[j]);
            scores[j] = (2.0 * 0.5 * dotxy + ghat[j] + eps * std::log(tgt.weights[j]) -
                         label_term) /
                        eps;
        }
        double want = -eps * lse(scores);
        CHECK(std::abs(got[i] - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
}
