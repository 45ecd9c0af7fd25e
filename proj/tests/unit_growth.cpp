#include <catch_amalgamated.hpp>

#include "skewmix/examples.hpp"
#include "skewmix/growth.hpp"

using namespace skewmix;

TEST_CASE("initial partition is a single admissible interval") {
    SkewProduct sp = example_skew_product("tripling_cos");
    PartitionState st = initial_partition(0.2, 0.3, sp.delta);
    REQUIRE(st.pieces.size() == 1);
    CHECK(st.n == 0);
    CHECK(st.total_measure() == Catch::Approx(0.3).margin(1e-15));
    CHECK_THROWS_AS(initial_partition(0.2, 0.9, sp.delta), Error);
    CHECK_THROWS_AS(initial_partition(0.2, 0.0, sp.delta), Error);
}

TEST_CASE("refinement preserves the total measure") {
    for (const char* name : {"tripling_cos", "nonlinear"}) {
        SkewProduct sp = example_skew_product(name);
        PartitionState st = initial_partition(0.13, 0.11, sp.delta);
        double target = st.total_measure();
        for (int k = 0; k < 6; ++k) {
            st = refine(sp, st);
            CHECK(st.total_measure() == Catch::Approx(target).margin(1e-9));
        }
        CHECK(st.pieces.size() > 1);
    }
}

TEST_CASE("refined pieces have controlled image length") {
    SkewProduct sp = example_skew_product("nonlinear");
    PartitionState st = initial_partition(0.4, 0.2, sp.delta);
    for (int k = 0; k < 4; ++k) st = refine(sp, st);
    for (const PartitionPiece& p : st.pieces) {
        CHECK(p.len <= sp.delta + 1e-12);
        CHECK(p.d1 > p.d0);
        // the midpoint of the domain interval lands inside the image arc
        double mid = wrap01(0.5 * (p.d0 + p.d1));
        for (std::size_t j = 0; j < st.n; ++j) mid = sp.f.value(mid);
        double t = mid - p.a;
        t -= std::floor(t);
        CHECK(t <= p.len + 1e-9);
    }
}

TEST_CASE("boundary-neighbourhood measure is monotone in epsilon") {
    SkewProduct sp = example_skew_product("tripling_cos");
    PartitionState st = initial_partition(0.05, 0.12, sp.delta);
    for (int k = 0; k < 5; ++k) st = refine(sp, st);
    double prev = 0.0;
    for (double eps : {1e-5, 1e-4, 1e-3, 1e-2}) {
        double z = z_epsilon(sp, st, eps);
        CHECK(z >= prev - 1e-15);
        CHECK(z <= st.total_measure() + 1e-12);
        prev = z;
    }
}

TEST_CASE("growth bound holds on fixed cases") {
    SkewProduct lin = example_skew_product("tripling_cos");
    SkewProduct non = example_skew_product("nonlinear");
    CHECK(growth_bound_check(lin, 0.0, 0.05, 6, 1e-4).pass);
    CHECK(growth_bound_check(lin, 0.31, 0.2, 5, 1e-3).pass);
    CHECK(growth_bound_check(non, 0.62, 0.07, 6, 5e-4).pass);
    CHECK(growth_bound_check(non, 0.9, 0.15, 4, 1e-4).pass);
}

TEST_CASE("randomized growth checks with a seeded generator") {
    SkewProduct sp = example_skew_product("tripling_cos");
    Rng rng(123);
    for (int k = 0; k < 6; ++k) {
        double lo = rng.uniform();
        double len = rng.uniform(0.02, 0.12);
        double eps = std::pow(10.0, rng.uniform(-5.0, -3.0));
        auto n = std::size_t(3 + rng.below(4));
        GrowthCheck chk = growth_bound_check(sp, lo, len, n, eps);
        INFO("lo=" << lo << " len=" << len << " n=" << n << " eps=" << eps);
        CHECK(chk.pass);
    }
}
