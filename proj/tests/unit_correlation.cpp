#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "skewmix/correlation.hpp"
#include "skewmix/examples.hpp"
#include "skewmix/transfer.hpp"

using namespace skewmix;

TEST_CASE("rate fit recovers an exact exponential") {
    std::vector<Complex> vals;
    for (int n = 0; n <= 20; ++n) vals.push_back(2.5 * std::exp(-0.3 * n));
    RateFit fit = fit_rate(vals, 0, 20);
    CHECK(fit.zeta == Catch::Approx(0.3).margin(1e-9));
    CHECK(fit.r2 == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.used == 21);
}

TEST_CASE("rate fit on alternating-sign decay uses magnitudes") {
    std::vector<Complex> vals;
    for (int n = 0; n <= 15; ++n)
        vals.push_back(((n % 2) ? -1.0 : 1.0) * 0.7 * std::exp(-0.45 * n));
    RateFit fit = fit_rate(vals, 0, 15);
    CHECK(fit.zeta == Catch::Approx(0.45).margin(1e-6));
    CHECK(fit.r2 == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("rate fit on a constant series reports no decay") {
    std::vector<Complex> vals(12, Complex(0.2, 0.0));
    RateFit fit = fit_rate(vals, 0, 11);
    CHECK(std::fabs(fit.zeta) <= 1e-9);
}

TEST_CASE("rate fit needs four usable points") {
    std::vector<Complex> vals(10, Complex(0.0, 0.0));
    vals[1] = 0.5;
    vals[2] = 0.25;
    vals[3] = 0.125;
    CHECK_THROWS_AS(fit_rate(vals, 0, 9), InsufficientData);
}

TEST_CASE("mode sampling recovers trigonometric polynomials") {
    auto fn = [](double x, double u) {
        return 0.3 + std::cos(2.0 * kPi * u) * std::cos(2.0 * kPi * x) +
               0.2 * std::sin(4.0 * kPi * u);
    };
    Observable2D g = observable_from_function(1u << 6, 1u << 6, 3, fn);
    CHECK(g.tail_bv.empty());
    double x = 10.5 / 64.0;  // a grid midpoint, where the cell lookup is exact
    CHECK(std::abs(g.mode_at(0, x) - Complex(0.3)) <= 1e-12);
    CHECK(std::abs(g.mode_at(1, x) - Complex(0.5 * std::cos(2.0 * kPi * x))) <= 1e-12);
    CHECK(std::abs(g.mode_at(2, x) - Complex(0.0, -0.1)) <= 1e-12);
    // conjugate symmetry of a real observable
    CHECK(std::abs(g.mode_at(-1, x) - std::conj(g.mode_at(1, x))) <= 1e-12);
    CHECK(std::abs(g.mode_at(-2, x) - std::conj(g.mode_at(2, x))) <= 1e-12);
    // discarded high mode lands in the tail record
    Observable2D trunc = observable_from_function(1u << 5, 1u << 6, 1, fn);
    CHECK(trunc.tail_bv.count(2) == 1);
    CHECK(trunc.tail_bv.count(-2) == 1);
    CHECK_THROWS_AS(observable_from_function(8, 6, 3, fn), GridTooCoarse);
}

TEST_CASE("mode expressions flag conjugate symmetry") {
    Observable2D sym = observable_from_modes(
        64, {{1, "0.5", ""}, {-1, "0.5", ""}});
    CHECK(sym.real_symmetric);
    Observable2D asym = observable_from_modes(
        64, {{1, "0.5", "0.1"}, {-1, "0.5", "0.1"}});
    CHECK_FALSE(asym.real_symmetric);
    CHECK_THROWS_AS(observable_from_modes(64, {{0, "1", ""}, {0, "2", ""}}), Error);
}

TEST_CASE("zero-mean fibre observable against a base observable decorrelates exactly") {
    // g depends only on u with zero mean, h only on x: every Cor(n) vanishes
    SkewProduct sp = example_skew_product("tripling_cos");
    Observable2D g = observable_from_modes(1u << 8, {{1, "0.5", ""}, {-1, "0.5", ""}});
    Observable2D h = observable_from_modes(1u << 8, {{0, "cos(2*pi*x)", ""}});
    CorrelationSeries s = correlation_direct(sp, g, h, 5, 1u << 8, 1u << 5);
    for (const Complex& v : s.values) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("time-zero correlation is the covariance") {
    SkewProduct sp = example_skew_product("nonlinear");
    std::size_t N = 1u << 10, M = 1u << 6;
    Observable2D g = observable_from_modes(
        N, {{0, "0.2*sin(2*pi*x)", ""}, {1, "0.5*cos(2*pi*x)", ""}, {-1, "0.5*cos(2*pi*x)", ""}});
    CorrelationSeries s = correlation_direct(sp, g, g, 0, N, M);
    GridFunction h_nu = invariant_density(sp, N);
    double mg = g.mean(h_nu);
    KahanSum cov;
    for (std::size_t i = 0; i < N; ++i) {
        double x = (double(i) + 0.5) / double(N);
        for (std::size_t m = 0; m < M; ++m) {
            double u = (double(m) + 0.5) / double(M);
            double v = g.real_value(x, u);
            cov.add(v * v * h_nu[i].real());
        }
    }
    double expected = cov.value() / double(N * M) - mg * mg;
    CHECK(s.values[0].real() == Catch::Approx(expected).margin(1e-12));
    CHECK(std::fabs(s.values[0].imag()) <= 1e-12);
}

TEST_CASE("fibre-Fourier estimator matches the direct one after locking") {
    SkewProduct sp = example_skew_product("nonlinear");
    std::size_t N = 1u << 10;
    Observable2D g = observable_from_modes(
        N, {{0, "0.1", ""},
            {1, "0.4*cos(2*pi*x)", "0.1*sin(2*pi*x)"},
            {-1, "0.4*cos(2*pi*x)", "0 - 0.1*sin(2*pi*x)"}});
    Observable2D h = observable_from_modes(
        N, {{1, "0.3", "0.2"}, {-1, "0.3", "0 - 0.2"}});
    CorrelationSeries four = correlation_fourier(sp, g, h, 6, N);
    CorrelationSeries dir = correlation_direct(sp, g, h, 6, N, 1u << 6);
    REQUIRE(four.values.size() == dir.values.size());
    for (std::size_t n = 0; n < four.values.size(); ++n) {
        INFO("n=" << n << " convention=" << four.convention);
        CHECK(std::abs(four.values[n] - dir.values[n]) <= 1e-10);
    }
    CHECK_FALSE(four.convention.empty());
    CHECK(four.tail_bound == 0.0);
}

TEST_CASE("correlations decay for the tripling example") {
    SkewProduct sp = example_skew_product("tripling_cos");
    std::size_t N = 1u << 12;
    Observable2D g = observable_from_modes(
        N, {{1, "0.5*cos(2*pi*x)", ""}, {-1, "0.5*cos(2*pi*x)", ""}});
    CorrelationSeries s = correlation_fourier(sp, g, g, 10, N);
    // the series reaches the fibre-bandwidth quadrature floor around n = 6,
    // so the rate is fitted on the fully resolved head of the series
    fit_series(s, 0, 4);
    CHECK(s.fit_zeta > 0.05);
    CHECK(s.fit_r2 >= 0.9);
    CHECK(std::abs(s.values[10]) < std::abs(s.values[2]));
}

TEST_CASE("correlations of the weakly coupled example fit a clean rate") {
    SkewProduct sp = example_skew_product("weak_coupling");
    std::size_t N = 1u << 14;
    Observable2D g = observable_from_modes(
        N, {{1, "0.5*cos(2*pi*x)", ""}, {-1, "0.5*cos(2*pi*x)", ""}});
    CorrelationSeries s = correlation_fourier(sp, g, g, 10, N);
    fit_series(s, 2, 10);
    CHECK(s.fit_zeta > 0.05);
    CHECK(s.fit_r2 >= 0.9);
}

TEST_CASE("eigenfunction observable on the cohomologous example keeps its correlations") {
    SkewProduct sp = example_skew_product("cohomologous");
    std::size_t N = 1u << 10;
    Observable2D g = observable_from_modes(
        N, {{1, "0.5", ""}, {-1, "0.5", ""}});
    CorrelationSeries s = correlation_fourier(sp, g, g, 30, N);
    fit_series(s, 0, 30);
    // the fibre translation by a constant only rotates the phase: no decay
    CHECK(s.fit_zeta <= 0.01);
    // after the transient dies off, |Cor(n)| = A |cos(2 pi n c)| exactly
    double c = kCohomologousConstant;
    double A = std::abs(s.values[2]) / std::fabs(std::cos(2.0 * kPi * 2.0 * c));
    for (std::size_t n = 2; n < s.values.size(); ++n) {
        double law = A * std::fabs(std::cos(2.0 * kPi * double(n) * c));
        CHECK(std::abs(s.values[n]) == Catch::Approx(law).margin(1e-4));
    }
    CHECK(A > 0.1);
}
