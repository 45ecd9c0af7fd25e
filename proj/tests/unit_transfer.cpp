#include <catch_amalgamated.hpp>

#include "skewmix/examples.hpp"
#include "skewmix/transfer.hpp"

using namespace skewmix;

namespace {
GridFunction smooth_probe(std::size_t N) {
    return GridFunction::sample(N, [](double x) {
        return Complex(1.0 + 0.5 * std::sin(2.0 * kPi * x), 0.3 * std::cos(4.0 * kPi * x));
    });
}
}  // namespace

TEST_CASE("untwisted operator conserves mass") {
    SkewProduct sp = example_skew_product("tripling_cos");
    GridFunction h = smooth_probe(1u << 10);
    GridFunction out = apply_twisted(sp, 0.0, h, 3);
    CHECK(std::abs(out.integral() - h.integral()) <= 1e-12);
}

TEST_CASE("twisted operator does not expand L1") {
    for (const char* name : {"tripling_cos", "nonlinear"}) {
        SkewProduct sp = example_skew_product(name);
        GridFunction h = smooth_probe(1u << 10);
        for (double b : {0.0, 5.0, 40.0}) {
            GridFunction out = apply_twisted(sp, b, h, 2);
            CHECK(out.l1() <= h.l1() * (1.0 + 1e-6));
        }
    }
}

TEST_CASE("Lebesgue is invariant for the linear base") {
    SkewProduct sp = example_skew_product("tripling_cos");
    GridFunction h = invariant_density(sp, 1u << 12);
    for (std::size_t i = 0; i < h.size(); i += 101)
        CHECK(std::abs(h[i] - Complex(1.0)) <= 1e-11);
}

TEST_CASE("invariant density is a fixed point on the nonlinear base") {
    SkewProduct sp = example_skew_product("nonlinear");
    TransferTable table(sp, 1u << 12);
    GridFunction h = invariant_density_cached(sp, table);
    GridFunction again = table.apply(0.0, h);
    again *= 1.0 / again.l1();
    CHECK(l1_distance(again, h) <= 1e-10);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i].real() > 0.5);
}

TEST_CASE("duality against the composition operator") {
    SkewProduct sp = example_skew_product("tripling_cos");
    const std::size_t N = 1u << 12;
    GridFunction h = smooth_probe(N);
    auto g = [](double y) { return std::cos(2.0 * kPi * y); };
    double b = 7.0;
    GridFunction Lh = apply_twisted(sp, b, h, 1);
    KahanSum lhs_re, lhs_im, rhs_re, rhs_im;
    for (std::size_t i = 0; i < N; ++i) {
        double x = Lh.midpoint(i);
        Complex l = Lh[i] * g(x);
        Complex r = h[i] * std::polar(1.0, b * sp.tau.value(x)) * g(sp.f.value(x));
        lhs_re.add(l.real());
        lhs_im.add(l.imag());
        rhs_re.add(r.real());
        rhs_im.add(r.imag());
    }
    Complex lhs(lhs_re.value() / double(N), lhs_im.value() / double(N));
    Complex rhs(rhs_re.value() / double(N), rhs_im.value() / double(N));
    CHECK(std::abs(lhs - rhs) <= 5e-3);  // collocation vs quadrature error
}

TEST_CASE("exact-evaluation application matches the table on cell constants") {
    SkewProduct sp = example_skew_product("nonlinear");
    TransferTable table(sp, 1u << 8);
    GridFunction h = smooth_probe(1u << 8);
    GridFunction a = table.apply(3.0, h);
    GridFunction b = table.apply_fn(3.0, [&](double x) { return h.at(x); });
    CHECK(l1_distance(a, b) <= 1e-14);
}

TEST_CASE("derived inequality constants for the linear base") {
    SkewProduct sp = example_skew_product("tripling_cos");
    LyConstants c = ly_constants(sp);
    CHECK(c.sup_J == Catch::Approx(1.0 / 3.0));
    CHECK(c.sup_Jprime == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.sup_tauJ == Catch::Approx(2.0 * kPi / 3.0).epsilon(1e-8));
    CHECK(c.sup_chop == Catch::Approx(2.0 / 3.0));
    CHECK(c.C_lambda == Catch::Approx(3.0 * c.C_LY));
    SchemeConstants sc = scheme_constants(sp, c);
    CHECK(sc.beta == Catch::Approx(1.5));
    CHECK(sc.rho1 == Catch::Approx(2.0 / std::log(3.0)));
    CHECK(sc.xi == Catch::Approx(std::log(1.5) / (2.0 * std::log(3.0))));
    CHECK(sc.xi < 0.5);
    CHECK(sc.n_of_b(80.0) == sc.n1(80.0) + sc.n2(80.0));
}

TEST_CASE("partition averaging is constant on the coarse intervals") {
    GridFunction h = smooth_probe(1u << 10);
    double b = 9.0, xi = 0.18;
    GridFunction avg = hl_average(h, b, xi);
    std::size_t L = hl_count(b, xi);
    for (std::size_t i = 0; i + 1 < avg.size(); ++i) {
        auto li = std::size_t(avg.midpoint(i) * double(L));
        auto lj = std::size_t(avg.midpoint(i + 1) * double(L));
        if (li == lj) CHECK(avg[i] == avg[i + 1]);
    }
    CHECK(std::abs(avg.integral() - h.integral()) <= 1e-12);
    CHECK_THROWS_AS(hl_average(smooth_probe(16), 100.0, 0.2), GridTooCoarse);
}

TEST_CASE("norm decay experiment rejects unresolvable grids") {
    SkewProduct sp = example_skew_product("tripling_cos");
    LyConstants ly = ly_constants(sp);
    SchemeConstants consts = scheme_constants(sp, ly);
    TransferTable table(sp, 1u << 6);
    CHECK_THROWS_AS(norm_decay_experiment(sp, table, 160.0, consts), GridTooCoarse);
}
