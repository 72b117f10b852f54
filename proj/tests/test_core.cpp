#include "doctest.h"

#include <cmath>

#include "fsk/core.hpp"
#include "fsk/mathutil.hpp"
#include "fsk/rng.hpp"
#include "fsk/schedule.hpp"

using namespace fsk;

namespace {
Mat mat_from(std::initializer_list<std::initializer_list<double>> rows) {
    Mat m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}
}  // namespace

TEST_CASE("squared_norms basics") {
    CHECK(squared_norms(mat_from({{0, 0}}))[0] == 0.0);
    CHECK(squared_norms(mat_from({{3, 4}}))[0] == 25.0);
}

TEST_CASE("squared_norms matches per-element oracle on seeded input") {
    Rng rng(42);
    Mat pts(4, 2);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t t = 0; t < 2; ++t) pts(i, t) = rng.normal();
    Vec got = squared_norms(pts);
    for (std::size_t i = 0; i < 4; ++i) {
        double want = 0.0;
        for (std::size_t t = 0; t < 2; ++t) want += pts(i, t) * pts(i, t);
        CHECK(got[i] == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("squared_norms rejects non-finite input") {
    Mat pts(1, 2);
    pts(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(squared_norms(pts), ValidationError);
}

TEST_CASE("unshift basics") {
    ShiftedPotentials p{{0.0}, {0.0}, 1.0};
    auto [f, g] = unshift_potentials(p, {0.0}, {0.0});
    CHECK(f[0] == 0.0);

    ShiftedPotentials q{{-2.0}, {0.0}, 1.0};
    auto [f2, g2] = unshift_potentials(q, {2.0}, {0.0});
    CHECK(f2[0] == 0.0);

    CHECK_THROWS_AS(unshift_potentials(p, {0.0, 1.0}, {0.0}), ValidationError);
}

TEST_CASE("shift then unshift is the identity on random input") {
    Rng rng(7);
    Vec f = rng.normal_vector(13), g = rng.normal_vector(9);
    Vec alpha = rng.normal_vector(13), beta = rng.normal_vector(9);
    ShiftedPotentials p = shift_potentials(f, g, alpha, beta, 0.5);
    auto [f2, g2] = unshift_potentials(p, alpha, beta);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f2[i] == f[i]);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g2[j] == g[j]);
}

TEST_CASE("weight validation") {
    DiscreteMeasure m;
    m.points = mat_from({{0.0}, {1.0}});
    m.weights = {0.5, 0.5};
    CHECK_NOTHROW(validate_measure(m));

    m.weights = {1.0, 0.0};
    CHECK_THROWS_AS(validate_measure(m), ValidationError);

    m.weights = {0.5, -0.5};
    CHECK_THROWS_AS(validate_measure(m), ValidationError);

    m.weights = {0.5, 0.5 + 1e-9};
    CHECK_THROWS_AS(validate_measure(m), ValidationError);

    // within the 1e-12 sum tolerance
    m.weights = {0.5, 0.5 + 1e-13};
    CHECK_NOTHROW(validate_measure(m));
}

TEST_CASE("label validation against the cost table") {
    DiscreteMeasure a = make_uniform_measure(mat_from({{0.0}, {1.0}}), {{0, 1}});
    DiscreteMeasure b = make_uniform_measure(mat_from({{2.0}}), {{2}});
    CostSpec spec = CostSpec::label_augmented(0.5, 0.5, Mat(2, 2, 0.0));
    CHECK_THROWS_AS(validate_problem(a, b, spec), ValidationError);
    CostSpec spec3 = CostSpec::label_augmented(0.5, 0.5, Mat(3, 3, 0.0));
    CHECK_NOTHROW(validate_problem(a, b, spec3));

    DiscreteMeasure c = make_uniform_measure(mat_from({{2.0}}));
    CHECK_THROWS_AS(validate_problem(a, c, spec3), ValidationError);
}

TEST_CASE("pairwise_sum agrees with plain summation") {
    Rng rng(3);
    Vec xs = rng.normal_vector(1000);
    double plain = 0.0;
    for (double v : xs) plain += v;
    double pw = pairwise_sum<double>(std::span<const double>(xs));
    CHECK(pw == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("fast_exp is ulp-accurate against std::exp") {
    Rng rng(11);
    double maxrel = 0.0;
    for (int k = 0; k < 20000; ++k) {
        double x = -40.0 + 41.0 * rng.uniform();
        double rel = std::abs(fast_exp(x) - std::exp(x)) / std::exp(x);
        maxrel = std::max(maxrel, rel);
    }
    CHECK(maxrel < 1e-15);
    CHECK(fast_exp(0.0) == 1.0);
    CHECK(fast_exp(-std::numeric_limits<double>::infinity()) < 1e-300);
}

TEST_CASE("eps schedule anneals from the diameter and truncates") {
    SinkhornConfig cfg;
    cfg.eps = 0.25;
    cfg.eps_scaling_factor = 0.9;
    cfg.extra_iters_at_final_eps = 60;
    cfg.max_iters = 1000;
    auto sched = eps_schedule(cfg, 245.0);
    CHECK(sched.front() == 245.0);
    CHECK(sched.back() == 0.25);
    // geometric decay from 245 to 0.25 at 0.9 takes 66 steps, then 60 extra
    CHECK(sched.size() == 66 + 60);
    for (std::size_t k = 1; k < sched.size(); ++k) CHECK(sched[k] <= sched[k - 1]);

    cfg.max_iters = 50;
    CHECK(eps_schedule(cfg, 245.0).size() == 50);

    cfg.eps_scaling_factor = 1.0;
    cfg.max_iters = 7;
    auto flat = eps_schedule(cfg, 245.0);
    CHECK(flat.size() == 7);
    for (double e : flat) CHECK(e == 0.25);
}

TEST_CASE("joint_sq_diameter is a bounding-box upper bound") {
    Mat X = mat_from({{0.0, 0.0}, {1.0, 0.0}});
    Mat Y = mat_from({{0.0, 2.0}});
    CHECK(joint_sq_diameter(X, Y) == doctest::Approx(1.0 + 4.0));
}
