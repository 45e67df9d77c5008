#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tomosar/error.hpp"
#include "tomosar/estimators.hpp"

using namespace tomosar;

namespace {

CMatrix random_phase_matrix(Eigen::Index n, Eigen::Index l, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
    CMatrix m(n, l);
    for (Eigen::Index j = 0; j < l; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            m(i, j) = std::polar(1.0, ph(rng));
    return m;
}

// Cyclic block coordinate descent on ||R x - g||^2 + eps sum |x_l|; each block update
// is an exact complex soft threshold, so the sweep converges to the global optimum.
CVector lasso_by_coordinate_descent(const CMatrix& r, const CVector& g, double eps) {
    CVector x = CVector::Zero(r.cols());
    CVector res = g;
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double change = 0.0;
        for (Eigen::Index l = 0; l < r.cols(); ++l) {
            const double nl = r.col(l).squaredNorm();
            const cdouble z = x[l] + r.col(l).dot(res) / nl;
            const double mag = std::abs(z);
            const double shrink = eps / (2.0 * nl);
            const cdouble next = mag > shrink ? z * ((mag - shrink) / mag) : cdouble{};
            if (next != x[l]) {
                res -= (next - x[l]) * r.col(l);
                change = std::max(change, std::abs(next - x[l]));
                x[l] = next;
            }
        }
        if (change < 1e-15)
            break;
    }
    return x;
}

} // namespace

TEST_SUITE("estimators") {

TEST_CASE("tikhonov examples") {
    const auto geo = testing::uniform_stack();
    const auto dict = build_dictionary(geo, ElevationMotionGrid::elevation_only({-20, 20, 2}));
    const auto zero = tikhonov_solve(dict, CVector::Zero(41), 1.0);
    CHECK(zero.gamma.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(tikhonov_solve(dict, CVector::Zero(41), 0.0), InvalidArgument);
    CHECK_THROWS_AS(tikhonov_solve(dict, CVector::Zero(40), 1.0), DimensionError);

    CMatrix ones = CMatrix::Ones(7, 1);
    const auto single = testing::wrap_matrix(ones);
    const auto est = tikhonov_solve(single, CVector::Ones(7), 1.0);
    CHECK(est.gamma[0].real() == doctest::Approx(7.0 / 8.0).epsilon(1e-14));
    CHECK(est.gamma[0].imag() == doctest::Approx(0.0));
}

TEST_CASE("tikhonov closed form and optimality") {
    const CMatrix r = random_phase_matrix(12, 20, 4);
    const auto dict = testing::wrap_matrix(r);
    const CVector g = r.col(13);
    const auto est = tikhonov_solve(dict, g, 1e-6);
    Eigen::Index arg = 0;
    est.gamma.cwiseAbs().maxCoeff(&arg);
    CHECK(arg == 13);

    // Brute-force closed form on the larger system.
    CMatrix k = r.adjoint() * r;
    k.diagonal().array() += 0.3;
    const CVector direct = k.ldlt().solve(r.adjoint() * g);
    const auto est2 = tikhonov_solve(dict, g, 0.3);
    CHECK((est2.gamma - direct).norm() <= 1e-10 * direct.norm());
    const CVector grad = 2.0 * (r.adjoint() * (r * est2.gamma - g)) + 2.0 * 0.3 * est2.gamma;
    CHECK(grad.norm() <= 1e-8 * (r.adjoint() * g).norm());
    CHECK(est2.certificate <= 1e-8);
}

TEST_CASE("l1 zero solution threshold") {
    const CMatrix r = random_phase_matrix(10, 15, 8);
    const auto dict = testing::wrap_matrix(r);
    CHECK(l1_solve(dict, CVector::Zero(10), 1.0).gamma.cwiseAbs().maxCoeff() == 0.0);

    CVector g = r.col(2) * cdouble(1.0, 0.5) + 0.7 * r.col(9);
    const double edge = 2.0 * (r.adjoint() * g).cwiseAbs().maxCoeff();
    CHECK(l1_solve(dict, g, edge).gamma.cwiseAbs().maxCoeff() == 0.0);
    CHECK(l1_solve(dict, g, 1.5 * edge).gamma.cwiseAbs().maxCoeff() == 0.0);
    // Just below the threshold the independent minimizer is no longer zero.
    CHECK(lasso_by_coordinate_descent(r, g, 0.98 * edge).cwiseAbs().maxCoeff() > 0.0);
    CHECK(l1_solve(dict, g, 0.98 * edge).gamma.cwiseAbs().maxCoeff() > 0.0);
    CHECK_THROWS_AS(l1_solve(dict, g, 0.0), InvalidArgument);
}

TEST_CASE("l1 recovers a two-spike support") {
    const CMatrix r = random_phase_matrix(10, 15, 21);
    const auto dict = testing::wrap_matrix(r);
    CVector x0 = CVector::Zero(15);
    x0[3] = cdouble(1.5, -0.5);
    x0[11] = cdouble(-1.0, 0.8);
    const CVector g = r * x0;
    const auto est = l1_solve(dict, g, 0.05, 1e-10);
    for (Eigen::Index l = 0; l < 15; ++l) {
        if (l == 3 || l == 11)
            CHECK(std::abs(est.gamma[l]) > 0.5);
        else
            CHECK(std::abs(est.gamma[l]) < 0.05);
    }
}

TEST_CASE("l1 matches coordinate descent") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const CMatrix r = random_phase_matrix(8 + static_cast<Eigen::Index>(seed), 20, 100 + seed);
        const auto dict = testing::wrap_matrix(r);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        CVector g(r.rows());
        for (auto& v : g)
            v = {nd(rng), nd(rng)};
        const double eps = 0.3 * 2.0 * (r.adjoint() * g).cwiseAbs().maxCoeff();
        const double ours = l1_objective(r, g, l1_solve(dict, g, eps, 1e-10).gamma, eps);
        const double theirs = l1_objective(r, g, lasso_by_coordinate_descent(r, g, eps), eps);
        CHECK(testing::rel_diff(ours, theirs) <= 1e-8);
    }
}

TEST_CASE("l1 matches the frozen convex-programming optima") {
    const auto doc = testing::load_json("l1_instances.json");
    int count = 0;
    for (const auto& inst : doc.at("instances")) {
        const auto n = inst.at("n").get<Eigen::Index>();
        const auto l = inst.at("l").get<Eigen::Index>();
        CMatrix r(n, l);
        const auto re = inst.at("r_re").get<std::vector<double>>();
        const auto im = inst.at("r_im").get<std::vector<double>>();
        for (Eigen::Index j = 0; j < l; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                r(i, j) = {re[static_cast<std::size_t>(i + n * j)], im[static_cast<std::size_t>(i + n * j)]};
        CVector g(n);
        const auto gr = inst.at("g_re").get<std::vector<double>>();
        const auto gi = inst.at("g_im").get<std::vector<double>>();
        for (Eigen::Index i = 0; i < n; ++i)
            g[i] = {gr[static_cast<std::size_t>(i)], gi[static_cast<std::size_t>(i)]};
        const double eps = inst.at("epsilon").get<double>();
        const auto est = l1_solve(testing::wrap_matrix(r), g, eps, 1e-9);
        const double obj = l1_objective(r, g, est.gamma, eps);
        CHECK(testing::rel_diff(obj, inst.at("objective").get<double>()) <= 1e-6);
        CHECK(l1_duality_gap(r, g, est.gamma, eps) >= 0.0);
        ++count;
    }
    CHECK(count >= 20);
}

TEST_CASE("l1 reports non-convergence") {
    const CMatrix r = random_phase_matrix(10, 25, 5);
    CVector g = r.col(0) + r.col(1);
    try {
        l1_solve(testing::wrap_matrix(r), g, 1e-3, 1e-14, 3);
        FAIL("expected a ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.iterations() == 3);
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("off-grid refinement") {
    const auto geo = testing::uniform_stack();
    const auto grid = ElevationMotionGrid::uniform({-10, 10, 2}, {-4, 4, 2}, {-3, 3, 1.5});
    const auto dict = build_dictionary(geo, grid);

    SUBCASE("a scatterer on the grid is a fixed point") {
        const std::size_t col = grid.column_index(6, 3, 1);
        const auto p = grid.point(col);
        const CVector g = synthesize_pixel(geo, {{p.s, p.v, p.a, 1.0, 0.3}}, std::nullopt, 0);
        ScattererEstimate coarse{p.s, p.v, p.a, 1.0, 0.0, {}, col, false};
        const auto fine = offgrid_refine(geo, grid, g, coarse, 10);
        CHECK(fine.s == p.s);
        CHECK(fine.v == p.v);
        CHECK(fine.a == p.a);
        CHECK_FALSE(fine.truncated);
        CHECK(fine.amplitude == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("a scatterer between nodes is found on the fine grid") {
        const std::size_t col = grid.column_index(5, 2, 2);
        const auto p = grid.point(col);
        const double s_true = p.s + 0.35 * 2.0;
        const CVector g = synthesize_pixel(geo, {{s_true, p.v, p.a, 1.0, 0.0}}, std::nullopt, 0);
        ScattererEstimate coarse{p.s, p.v, p.a, 1.0, 0.0, {}, col, false};
        const auto fine = offgrid_refine(geo, grid, g, coarse, 10);
        CHECK(std::abs(fine.s - s_true) <= 2.0 / 20.0 + 1e-9);
        CHECK(std::abs(fine.s - p.s) <= 2.0);
    }
    SUBCASE("boundary node truncates the neighbourhood") {
        const std::size_t col = grid.column_index(0, 2, 2);
        const auto p = grid.point(col);
        const CVector g = synthesize_pixel(geo, {{p.s, p.v, p.a, 1.0, 0.0}}, std::nullopt, 0);
        ScattererEstimate coarse{p.s, p.v, p.a, 1.0, 0.0, {}, col, false};
        CHECK(offgrid_refine(geo, grid, g, coarse, 10).truncated);
    }
    SUBCASE("preconditions") {
        const auto p = grid.point(3);
        const CVector g = CVector::Ones(41);
        ScattererEstimate coarse{p.s, p.v, p.a, 1.0, 0.0, {}, 3, false};
        CHECK_THROWS_AS(offgrid_refine(geo, grid, g, coarse, 1), InvalidArgument);
        coarse.s += 0.1;
        CHECK_THROWS_AS(offgrid_refine(geo, grid, g, coarse, 10), InvalidArgument);
    }
}

TEST_CASE("ensemble coherence") {
    CVector g(4);
    g << cdouble(1, 2), cdouble(-3, 0.5), cdouble(0.2, -1), cdouble(2, 2);
    CHECK(std::abs(ensemble_coherence(3.0 * g, g) - cdouble(1.0, 0.0)) <= 1e-15);

    CVector m1(1), g1(1);
    m1 << cdouble(1, 0);
    g1 << cdouble(-1, 0);
    const cdouble eta = ensemble_coherence(m1, g1);
    CHECK(eta.real() == doctest::Approx(-1.0));
    CHECK(std::abs(eta) == doctest::Approx(1.0));

    // A constant phase offset keeps |eta| = 1; a varying one does not.
    CVector shifted = g * std::polar(1.0, 0.8);
    CHECK(std::abs(ensemble_coherence(shifted, g)) == doctest::Approx(1.0).epsilon(1e-14));
    shifted[2] *= std::polar(1.0, 0.3);
    CHECK(std::abs(ensemble_coherence(shifted, g)) < 1.0 - 1e-3);

    // Zero model entries count with model phase 0.
    CVector zero = CVector::Zero(1);
    CVector gz(1);
    gz << std::polar(2.0, 0.7);
    CHECK(std::abs(ensemble_coherence(zero, gz) - std::polar(1.0, 0.7)) <= 1e-15);
}

TEST_CASE("coherence of random phases follows the Rayleigh mean") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
    const int n = 41;
    double sum = 0.0;
    CVector model = CVector::Ones(n);
    CVector g(n);
    for (int trial = 0; trial < 10000; ++trial) {
        for (int i = 0; i < n; ++i)
            g[i] = std::polar(1.0, ph(rng));
        sum += std::abs(ensemble_coherence(model, g));
    }
    const double expected = std::sqrt(std::numbers::pi) / (2.0 * std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sum / 10000.0 - expected) <= 0.05 * expected);
}

TEST_CASE("outlier rejection") {
    PixelResult r;
    r.selected_model = 2;
    r.estimates.resize(2);
    r.estimates[0].coherence = 0.97;
    r.estimates[1].coherence = 0.4;
    r.rejected = {false, false};
    CHECK(reject_outliers(r, 0.0).surviving() == 2);
    CHECK(reject_outliers(r, 1.0).surviving() == 0);
    const auto mid = reject_outliers(r, 0.6);
    CHECK(mid.rejected == std::vector<bool>{false, true});
    CHECK_THROWS_AS(reject_outliers(r, 1.5), InvalidArgument);

    const auto geo = testing::uniform_stack();
    const auto grid = ElevationMotionGrid::elevation_only({-20, 20, 1});
    const auto dict = build_dictionary(geo, grid);
    const CVector g = synthesize_pixel(geo, {{-6.0, 0, 0, 1.0, 0.4}, {7.0, 0, 0, 0.8, -1.1}},
                                       std::nullopt, 0);
    PixelInversionOptions opts;
    opts.penalty = ModelPenalty{5.0};
    const auto res = invert_pixel(dict, g, opts);
    REQUIRE(res.selected_model == 2);
    CHECK(std::abs(res.coherence) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.surviving() == 2);
}

} // TEST_SUITE
