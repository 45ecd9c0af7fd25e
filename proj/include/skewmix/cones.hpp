#pragma once

#include <algorithm>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/dynamics.hpp"
#include "skewmix/grid.hpp"

namespace skewmix {

// Slope interval of an image cone DF^n(x)K: [center - halfwidth, center + halfwidth].
struct ConeInterval {
    double center = 0.0;
    double halfwidth = 0.0;

    double lo() const { return center - halfwidth; }
    double hi() const { return center + halfwidth; }
    bool contains(double slope) const { return slope >= lo() && slope <= hi(); }
};

// Image of the standard cone under DF^n along the node's orbit.
inline ConeInterval cone_image(const PreimageNode& node, double C1) {
    return {node.dtau_n * node.J_n, C1 * node.J_n};
}

// Transversal iff the closed slope intervals are disjoint (tangency counts
// as non-transversal, matching the strict "intersection = {0}" reading).
inline bool transversal(const ConeInterval& a, const ConeInterval& b) {
    return a.hi() < b.lo() || b.hi() < a.lo();
}

namespace detail {

// For one y: max over x1 of the J_n-mass of preimages not transversal to x1.
// Non-overlap splits into the two disjoint events lo2 > hi1 and hi2 < lo1,
// so sorted prefix sums give the answer in O(K log K).
inline double phi_at(const std::vector<PreimageNode>& nodes, double C1) {
    std::size_t m = nodes.size();
    std::vector<double> los(m), his(m), j_by_lo(m), j_by_hi(m);
    std::vector<std::size_t> idx(m);
    std::vector<ConeInterval> cones(m);
    for (std::size_t i = 0; i < m; ++i) cones[i] = cone_image(nodes[i], C1);

    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return cones[a].lo() < cones[b].lo(); });
    for (std::size_t i = 0; i < m; ++i) {
        los[i] = cones[idx[i]].lo();
        j_by_lo[i] = nodes[idx[i]].J_n;
    }
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return cones[a].hi() < cones[b].hi(); });
    for (std::size_t i = 0; i < m; ++i) {
        his[i] = cones[idx[i]].hi();
        j_by_hi[i] = nodes[idx[i]].J_n;
    }
    // suffix sums over lo-sorted J, prefix sums over hi-sorted J
    std::vector<double> suf_lo(m + 1, 0.0), pre_hi(m + 1, 0.0);
    for (std::size_t i = m; i-- > 0;) suf_lo[i] = suf_lo[i + 1] + j_by_lo[i];
    for (std::size_t i = 0; i < m; ++i) pre_hi[i + 1] = pre_hi[i] + j_by_hi[i];
    double total = suf_lo[0];

    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const ConeInterval& c = cones[i];
        // mass with lo2 > hi1
        auto it_lo = std::upper_bound(los.begin(), los.end(), c.hi());
        double mass_right = suf_lo[std::size_t(it_lo - los.begin())];
        // mass with hi2 < lo1
        auto it_hi = std::lower_bound(his.begin(), his.end(), c.lo());
        double mass_left = pre_hi[std::size_t(it_hi - his.begin())];
        best = std::max(best, total - mass_right - mass_left);
    }
    return best;
}

inline std::vector<double> phi_sample_points(const SkewProduct& sp, std::size_t y_samples) {
    std::vector<double> ys;
    ys.reserve(y_samples + 2 * sp.merged_breakpoints.size());
    for (std::size_t k = 0; k < y_samples; ++k) ys.push_back((double(k) + 0.5) / double(y_samples));
    // one-sided images of every merged breakpoint
    for (double bp : sp.merged_breakpoints) {
        ys.push_back(sp.f.value(bp + 1e-9));
        ys.push_back(sp.f.value(bp - 1e-9));
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    return ys;
}

}  // namespace detail

// Grid-sup of the non-transversal mass phi(n) over a uniform y sample plus
// breakpoint images.
inline double phi(const SkewProduct& sp, std::size_t n, std::size_t y_samples = 64) {
    if (sp.verdict == BuildVerdict::TauPiecewiseConstant)
        throw Error("phi undefined for piecewise-constant tau (C1 = 0)");
    double best = 0.0;
    for (double y : detail::phi_sample_points(sp, y_samples)) {
        PreimageTree tree = preimages(sp, y, n);
        best = std::max(best, detail::phi_at(tree.nodes, sp.C1));
    }
    return best;
}

// phi-tilde(n, L, y): h_nu-weighted mass of preimages whose image cone
// contains the slope L.
inline double phi_tilde(const SkewProduct& sp, std::size_t n, double L_slope, double y,
                        const GridFunction& h_nu) {
    double hy = h_nu.real_at(y);
    if (!(hy > 0.0)) throw NonPositiveDensity("h_nu must be strictly positive");
    PreimageTree tree = preimages(sp, y, n);
    KahanSum s;
    for (const PreimageNode& node : tree.nodes) {
        double hx = h_nu.real_at(node.x);
        if (!(hx > 0.0)) throw NonPositiveDensity("h_nu must be strictly positive");
        if (cone_image(node, sp.C1).contains(L_slope)) s.add(node.J_n * hx / hy);
    }
    return s.value();
}

// sup over L of phi_tilde(n, L, y), the sup approximated over the candidate
// maximizers: the centers of all depth-n cones.
inline double phi_tilde_sup(const SkewProduct& sp, std::size_t n, double y,
                            const GridFunction& h_nu) {
    double hy = h_nu.real_at(y);
    if (!(hy > 0.0)) throw NonPositiveDensity("h_nu must be strictly positive");
    PreimageTree tree = preimages(sp, y, n);
    std::vector<ConeInterval> cones(tree.nodes.size());
    for (std::size_t i = 0; i < cones.size(); ++i) cones[i] = cone_image(tree.nodes[i], sp.C1);
    double best = 0.0;
    for (const ConeInterval& cand : cones) {
        KahanSum s;
        for (std::size_t i = 0; i < cones.size(); ++i)
            if (cones[i].contains(cand.center))
                s.add(tree.nodes[i].J_n * h_nu.real_at(tree.nodes[i].x) / hy);
        best = std::max(best, s.value());
    }
    return best;
}

}  // namespace skewmix
