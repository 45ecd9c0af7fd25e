#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/map.hpp"

namespace skewmix {

// An n-symbol branch itinerary, innermost first: symbols[j] is the branch of
// f containing f^j(x).
struct BranchWord {
    std::vector<std::uint32_t> symbols;

    std::size_t length() const { return symbols.size(); }
    bool operator<(const BranchWord& o) const { return symbols < o.symbols; }
    bool operator==(const BranchWord& o) const { return symbols == o.symbols; }
};

// One point of f^{-n}(y) with the cocycle data accumulated along its orbit.
struct PreimageNode {
    double x = 0.0;
    BranchWord word;
    double J_n = 1.0;     // 1/|(f^n)'(x)|
    double tau_n = 0.0;   // sum_{j<n} tau(f^j x)
    double dtau_n = 0.0;  // sum_{j<n} tau'(f^j x) (f^j)'(x)
    bool near_image_boundary = false;
};

struct PreimageTree {
    std::vector<PreimageNode> nodes;  // lexicographic in word
    double max_cocycle_ratio = 0.0;   // max |J_n dtau_n| / (C1/2) over nodes
};

namespace detail {

// Solve expr(x) = target on [lo, hi] for a monotone branch: bisection
// bracketing refined by Newton, tolerance 1e-13 in residual.
inline double solve_monotone(const Expr& expr, double lo, double hi, double target) {
    double flo = eval_value(expr, lo) - target;
    double fhi = eval_value(expr, hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw NoConvergence("target not bracketed by branch");
    bool rising = fhi > 0.0;
    double a = lo, b = hi;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
        Jet2 j = eval_jet2(expr, x);
        double r = j.v - target;
        if (std::fabs(r) <= 1e-13) return x;
        if ((r > 0.0) == rising)
            b = x;
        else
            a = x;
        double step = (j.d1 != 0.0) ? x - r / j.d1 : a - 1.0;
        x = (step > a && step < b) ? step : 0.5 * (a + b);
    }
    Jet2 j = eval_jet2(expr, x);
    if (std::fabs(j.v - target) <= 1e-12) return x;
    throw NoConvergence("branch inverse did not converge");
}

}  // namespace detail

// All x within branch i of f with f(x) = y (mod 1 for circle maps).
// Image-interval endpoints are nudged 1e-12 inward so a y exactly at a
// branch-image boundary is never double counted; such y are flagged.
inline std::vector<std::pair<double, bool>> branch_preimages(const PiecewiseC2Map& f,
                                                             std::size_t i, double y) {
    const Branch& br = f.branch(i);
    std::vector<std::pair<double, bool>> out;
    double y0 = wrap01(y);
    // Lift targets y0 + k in [v_lo, v_hi - 1e-12).  The lower image endpoint
    // is included and the upper excluded so that a y exactly at a shared
    // image boundary is counted once; such y are flagged.
    double k_lo = std::ceil(br.v_lo - 1e-12 - y0);
    for (double k = k_lo; y0 + k < br.v_hi - 1e-12; k += 1.0) {
        double target = y0 + k;
        if (target < br.v_lo - 1e-12) continue;
        bool near = (target < br.v_lo + 1e-12) || (target > br.v_hi - 2e-12);
        double x;
        if (target <= br.v_lo) {
            x = br.increasing ? br.x_lo : br.x_hi;
        } else {
            x = detail::solve_monotone(*br.expr, br.x_lo, br.x_hi, target);
        }
        out.emplace_back(wrap01(x), near);
    }
    return out;
}

// The unique x in branch i with f(x) = y, if y lies in the branch image.
inline std::optional<double> branch_inverse(const PiecewiseC2Map& f, std::size_t i, double y) {
    auto v = branch_preimages(f, i, y);
    if (v.empty()) return std::nullopt;
    return v.front().first;
}

// Single-step preimages of y under the base map, ordered by branch index
// (then by position within a branch).
struct Step {
    double x;
    std::uint32_t branch;
    bool near_boundary;
};

inline std::vector<Step> preimage_step(const SkewProduct& sp, double y) {
    std::vector<Step> out;
    for (std::size_t i = 0; i < sp.f.branch_count(); ++i) {
        auto v = branch_preimages(sp.f, i, y);
        for (auto& [x, flag] : v) out.push_back({x, std::uint32_t(i), flag});
    }
    return out;
}

// All of f^{-n}(y) with J_n, tau_n, tau_n' accumulated along each itinerary.
inline PreimageTree preimages(const SkewProduct& sp, double y, std::size_t n) {
    if (n < 1) throw Error("preimages requires n >= 1");
    if (n > sp.preimage_cap)
        throw CapExceeded("preimage depth " + std::to_string(n) + " exceeds cap " +
                          std::to_string(sp.preimage_cap));
    double half_c1 = 0.5 * sp.C1;

    PreimageTree tree;
    // depth 1 from y itself
    for (const Step& s : preimage_step(sp, y)) {
        PreimageNode node;
        node.x = s.x;
        node.word.symbols = {s.branch};
        double fp = sp.f.derivative(s.x);
        node.J_n = 1.0 / std::fabs(fp);
        node.tau_n = sp.tau.value(s.x);
        node.dtau_n = sp.tau.derivative(s.x);
        node.near_image_boundary = s.near_boundary;
        tree.nodes.push_back(std::move(node));
    }
    for (std::size_t depth = 2; depth <= n; ++depth) {
        std::vector<PreimageNode> next;
        next.reserve(tree.nodes.size() * sp.f.branch_count());
        for (const PreimageNode& parent : tree.nodes) {
            for (const Step& s : preimage_step(sp, parent.x)) {
                PreimageNode node;
                node.x = s.x;
                node.word.symbols.reserve(depth);
                node.word.symbols.push_back(s.branch);
                node.word.symbols.insert(node.word.symbols.end(), parent.word.symbols.begin(),
                                         parent.word.symbols.end());
                double fp = sp.f.derivative(s.x);
                node.J_n = parent.J_n / std::fabs(fp);
                node.tau_n = sp.tau.value(s.x) + parent.tau_n;
                node.dtau_n = sp.tau.derivative(s.x) + parent.dtau_n * fp;
                node.near_image_boundary = s.near_boundary || parent.near_image_boundary;
                next.push_back(std::move(node));
            }
        }
        tree.nodes = std::move(next);
        if (tree.nodes.size() > (1u << 24))
            throw CapExceeded("preimage tree too large");
    }
    std::sort(tree.nodes.begin(), tree.nodes.end(),
              [](const PreimageNode& a, const PreimageNode& b) {
                  if (a.word.symbols != b.word.symbols) return a.word.symbols < b.word.symbols;
                  return a.x < b.x;
              });
    if (half_c1 > 0.0) {
        for (const PreimageNode& node : tree.nodes)
            tree.max_cocycle_ratio =
                std::max(tree.max_cocycle_ratio, std::fabs(node.J_n * node.dtau_n) / half_c1);
    }
    return tree;
}

// Forward orbit of F: (x,u) -> (f(x), u + tau(x)), fibre reduced mod 1.
// Returns n+1 entries starting with (x,u).
inline std::vector<std::pair<double, double>> orbit(const SkewProduct& sp, double x, double u,
                                                    std::size_t n) {
    std::vector<std::pair<double, double>> out;
    out.reserve(n + 1);
    double cx = wrap01(x), cu = wrap01(u);
    out.emplace_back(cx, cu);
    for (std::size_t k = 0; k < n; ++k) {
        cu = wrap01(cu + sp.tau.value(cx));
        cx = sp.f.value(cx);
        out.emplace_back(cx, cu);
    }
    return out;
}

}  // namespace skewmix
