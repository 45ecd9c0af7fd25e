#pragma once

#include <string>
#include <vector>

#include "skewmix/map.hpp"

namespace skewmix {

// Raw description of a bundled map, also usable to emit JSON configs.
struct ExampleSpec {
    std::string name;
    std::vector<double> f_breakpoints;
    std::vector<std::string> f_branches;
    std::vector<double> tau_breakpoints;
    std::vector<std::string> tau_branches;
};

inline const std::vector<ExampleSpec>& bundled_examples() {
    static const std::vector<ExampleSpec> specs = {
        // generic pair: linear tripling with a smooth fibre
        {"tripling_cos",
         {0.0, 1.0 / 3.0, 2.0 / 3.0},
         {"3*x", "3*x", "3*x"},
         {0.0},
         {"cos(2*pi*x)"}},
        // tau = theta o f - theta + c with theta = 0.1 sin(2 pi x), c = 1/sqrt(2)
        {"cohomologous",
         {0.0, 1.0 / 3.0, 2.0 / 3.0},
         {"3*x", "3*x", "3*x"},
         {0.0},
         {"0.1*sin(6*pi*x) - 0.1*sin(2*pi*x) + 0.7071067811865476"}},
        // nonlinear base, derivative in [3 - 0.3 pi, 3 + 0.3 pi]
        {"nonlinear",
         {0.0, 1.0 / 3.0, 2.0 / 3.0},
         {"3*x + 0.05*sin(6*pi*x)", "3*x + 0.05*sin(6*pi*x)", "3*x + 0.05*sin(6*pi*x)"},
         {0.0},
         {"cos(2*pi*x)"}},
        // weaker fibre coupling: correlations decay slowly enough that the
        // rate stays resolvable above the fibre-bandwidth quadrature floor
        // out to n = 14
        {"weak_coupling",
         {0.0, 1.0 / 3.0, 2.0 / 3.0},
         {"3*x", "3*x", "3*x"},
         {0.0},
         {"0.4*cos(2*pi*x)"}},
        // inf f' = 2 violates the expansion hypothesis; kept for failure tests
        {"doubling", {0.0, 0.5}, {"2*x", "2*x"}, {0.0}, {"cos(2*pi*x)"}},
    };
    return specs;
}

inline const ExampleSpec& example_spec(const std::string& name) {
    for (const ExampleSpec& s : bundled_examples())
        if (s.name == name) return s;
    throw Error("unknown example '" + name + "'");
}

inline SkewProduct example_skew_product(const std::string& name, BuildOptions options = {}) {
    const ExampleSpec& s = example_spec(name);
    return build_skew_product(make_map(s.f_breakpoints, s.f_branches, MapKind::Circle),
                              make_map(s.tau_breakpoints, s.tau_branches, MapKind::Real),
                              options);
}

// The transfer function and constant used by the "cohomologous" example.
inline constexpr double kCohomologousConstant = 0.7071067811865476;
inline double cohomologous_theta(double x) { return 0.1 * std::sin(2.0 * kPi * x); }

}  // namespace skewmix
