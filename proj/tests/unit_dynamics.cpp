#include <catch_amalgamated.hpp>

#include "skewmix/dynamics.hpp"
#include "skewmix/examples.hpp"

using namespace skewmix;

TEST_CASE("tripling preimages carry exact cocycle data") {
    SkewProduct sp = example_skew_product("tripling_cos");
    PreimageTree tree = preimages(sp, 0.2, 3);
    REQUIRE(tree.nodes.size() == 27);

    KahanSum mass;
    for (const PreimageNode& node : tree.nodes) {
        CHECK(node.J_n == Catch::Approx(1.0 / 27.0).epsilon(1e-12));
        // itinerary decodes the orbit: f^j(x) lies in branch symbols[j]
        double z = node.x;
        double birkhoff = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(sp.f.branch_index(z) == node.word.symbols[j]);
            birkhoff += sp.tau.value(z);
            z = sp.f.value(z);
        }
        CHECK(z == Catch::Approx(0.2).margin(1e-10));
        CHECK(node.tau_n == Catch::Approx(birkhoff).margin(1e-12));
        mass.add(node.J_n);
    }
    CHECK(mass.value() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(std::is_sorted(tree.nodes.begin(), tree.nodes.end(),
                         [](const PreimageNode& a, const PreimageNode& b) {
                             return a.word.symbols < b.word.symbols;
                         }));
}

TEST_CASE("dtau_n matches a finite difference of the Birkhoff sum") {
    SkewProduct sp = example_skew_product("nonlinear");
    PreimageTree tree = preimages(sp, 0.41, 4);
    auto birkhoff = [&](double x) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
            s += sp.tau.value(x);
            x = sp.f.value(x);
        }
        return s;
    };
    for (std::size_t k = 0; k < tree.nodes.size(); k += 7) {
        const PreimageNode& node = tree.nodes[k];
        double h = 1e-7;
        double fd = (birkhoff(node.x + h) - birkhoff(node.x - h)) / (2.0 * h);
        CHECK(node.dtau_n == Catch::Approx(fd).margin(1e-4 * (1.0 + std::fabs(fd))));
    }
}

TEST_CASE("a target at a shared image boundary is counted once") {
    SkewProduct sp = example_skew_product("tripling_cos");
    std::vector<Step> steps = preimage_step(sp, 0.0);
    REQUIRE(steps.size() == 3);
    for (const Step& s : steps) CHECK(s.near_boundary);
    CHECK(steps[0].x == Catch::Approx(0.0).margin(1e-12));
    CHECK(steps[1].x == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(steps[2].x == Catch::Approx(2.0 / 3.0).margin(1e-12));

    std::vector<Step> interior = preimage_step(sp, 0.5);
    REQUIRE(interior.size() == 3);
    for (const Step& s : interior) CHECK_FALSE(s.near_boundary);
}

TEST_CASE("branch inverse solves to tight residuals") {
    SkewProduct sp = example_skew_product("nonlinear");
    for (double y : {0.05, 0.33, 0.71, 0.98}) {
        for (std::size_t i = 0; i < 3; ++i) {
            auto x = branch_inverse(sp.f, i, y);
            REQUIRE(x.has_value());
            CHECK(circle_dist(sp.f.value(*x), y) <= 1e-12);
        }
    }
}

TEST_CASE("depth cap guards the enumeration") {
    SkewProduct sp = example_skew_product("tripling_cos");
    CHECK_THROWS_AS(preimages(sp, 0.5, 15), CapExceeded);
    CHECK_THROWS_AS(preimages(sp, 0.5, 0), Error);
}

TEST_CASE("orbit accumulates the fibre modulo one") {
    SkewProduct sp = example_skew_product("tripling_cos");
    auto o = orbit(sp, 0.1, 0.9, 3);
    REQUIRE(o.size() == 4);
    CHECK(o[0] == std::make_pair(0.1, 0.9));
    double u = 0.9, x = 0.1;
    for (std::size_t k = 1; k < o.size(); ++k) {
        u = wrap01(u + sp.tau.value(x));
        x = sp.f.value(x);
        CHECK(o[k].first == Catch::Approx(x).margin(1e-12));
        CHECK(o[k].second == Catch::Approx(u).margin(1e-12));
    }
}
