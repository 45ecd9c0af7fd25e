#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/map.hpp"

namespace skewmix {

// One connected piece of Omega_n: the domain interval (d0, d1) in lift
// coordinates (circle position wrap01(d)) together with its image arc under
// f^n, stored as start point `a` and length `len` (positions a+t, t in [0,len]).
struct PartitionPiece {
    double d0 = 0.0;
    double d1 = 0.0;
    double a = 0.0;
    double len = 0.0;
    bool chopped = false;  // created by an artificial cut at this level
};

struct PartitionState {
    std::size_t n = 0;
    std::vector<PartitionPiece> pieces;

    double total_measure() const {
        KahanSum s;
        for (const auto& p : pieces) s.add(p.d1 - p.d0);
        return s.value();
    }
};

inline PartitionState initial_partition(double lo, double length, double delta) {
    if (!(length > 0.0) || length > delta + 1e-15)
        throw Error("Omega_0 must be a nonempty interval of length <= delta");
    PartitionState st;
    st.n = 0;
    st.pieces.push_back({lo, lo + length, wrap01(lo), length, false});
    return st;
}

namespace detail {

// arc parameter of the f^n-image of domain point d, relative to piece arc
inline double arc_param(const SkewProduct& sp, std::size_t n, const PartitionPiece& piece,
                        double d) {
    double p = wrap01(d);
    for (std::size_t k = 0; k < n; ++k) p = sp.f.value(p);
    double t = p - piece.a;
    t -= std::floor(t);
    if (t > piece.len) {
        // endpoint noise: snap to the nearer end of [0, len]
        t = (t - piece.len < 1.0 - t) ? piece.len : 0.0;
    }
    return t;
}

// domain point whose f^n-image sits at arc parameter t_target (bisection;
// the piece maps monotonically onto its arc)
inline double pull_back_param(const SkewProduct& sp, std::size_t n, const PartitionPiece& piece,
                              double t_target) {
    double lo = piece.d0, hi = piece.d1;
    double tlo = arc_param(sp, n, piece, lo);
    double thi = arc_param(sp, n, piece, hi);
    bool rising = thi > tlo;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double t = arc_param(sp, n, piece, mid);
        if ((t < t_target) == rising)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// One refinement step: split each image arc at the breakpoints of f (at most
// one interior breakpoint by the delta choice), push forward through the
// containing branch, and artificially chop image intervals longer than delta
// into equal parts of length in [delta/2, delta].
inline PartitionState refine(const SkewProduct& sp, const PartitionState& state) {
    PartitionState next;
    next.n = state.n + 1;
    const PiecewiseC2Map& f = sp.f;

    for (const PartitionPiece& piece : state.pieces) {
        // stage 1: arc parameters where the arc crosses a breakpoint of f
        std::vector<double> splits{0.0};
        for (double bp : f.breakpoints()) {
            double c = bp - piece.a;
            c -= std::floor(c);
            if (c > 1e-12 && c < piece.len - 1e-12) splits.push_back(c);
        }
        splits.push_back(piece.len);
        std::sort(splits.begin(), splits.end());

        for (std::size_t s = 0; s + 1 < splits.size(); ++s) {
            double t0 = splits[s], t1 = splits[s + 1];
            if (t1 - t0 < 1e-14) continue;
            double tm = 0.5 * (t0 + t1);
            std::size_t bi = f.branch_index(wrap01(piece.a + tm));
            const Branch& br = f.branch(bi);
            double xm = f.lift_into(bi, wrap01(piece.a + tm));
            double x0 = xm - (tm - t0);
            double x1 = xm + (t1 - tm);
            double v0 = eval_value(*br.expr, x0);
            double v1 = eval_value(*br.expr, x1);
            double vlo = std::min(v0, v1), vhi = std::max(v0, v1);
            double image_len = vhi - vlo;

            // domain endpoints of this sub-arc
            double e0 = (s == 0) ? piece.d0 : detail::pull_back_param(sp, state.n, piece, t0);
            double e1 = (s + 2 == splits.size())
                            ? piece.d1
                            : detail::pull_back_param(sp, state.n, piece, t1);
            if (e0 > e1) std::swap(e0, e1);

            // stage 2: artificial chop into equal image parts of length <= delta
            auto parts = std::size_t(std::ceil(image_len / sp.delta - 1e-12));
            if (parts < 1) parts = 1;
            bool chopped = parts > 1;

            // pull chop boundaries back to the domain through the lift value
            auto eval_v = [&](double d) {
                double t = detail::arc_param(sp, state.n, piece, d);
                return eval_value(*br.expr, xm + (t - tm));
            };
            double ve0 = eval_v(e0);
            bool v_rising = eval_v(e1) > ve0;
            std::vector<double> cuts(parts + 1);
            cuts[0] = e0;
            cuts[parts] = e1;
            for (std::size_t j = 1; j < parts; ++j) {
                double target = vlo + image_len * double(j) / double(parts);
                if (!v_rising) target = vhi - image_len * double(j) / double(parts);
                double lo = e0, hi = e1;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if ((eval_v(mid) < target) == v_rising)
                        lo = mid;
                    else
                        hi = mid;
                }
                cuts[j] = 0.5 * (lo + hi);
            }
            for (std::size_t j = 0; j < parts; ++j) {
                double slo = vlo + image_len * double(j) / double(parts);
                double shi = vlo + image_len * double(j + 1) / double(parts);
                PartitionPiece np;
                np.d0 = cuts[j];
                np.d1 = cuts[j + 1];
                // with a decreasing branch the j-th domain part lands on the
                // j-th image part counted from the top
                np.a = v_rising ? wrap01(slo)
                                : wrap01(vhi - image_len * double(j + 1) / double(parts));
                np.len = shi - slo;
                np.chopped = chopped;
                next.pieces.push_back(np);
            }
        }
    }
    return next;
}

// Z_eps: Lebesgue measure of x in Omega_n whose f^n-image is within eps of
// the image of the partition boundary.  With own_endpoints_only the distance
// is taken to the piece's own image endpoints (the per-piece reading).
inline double z_epsilon(const SkewProduct& sp, const PartitionState& state, double eps,
                        bool own_endpoints_only = false) {
    if (!(eps > 0.0)) throw Error("eps must be positive");
    // boundary-image points
    std::vector<double> boundary;
    if (!own_endpoints_only) {
        boundary.reserve(2 * state.pieces.size());
        for (const auto& p : state.pieces) {
            boundary.push_back(wrap01(p.a));
            boundary.push_back(wrap01(p.a + p.len));
        }
        std::sort(boundary.begin(), boundary.end());
    }

    KahanSum total;
    for (const PartitionPiece& piece : state.pieces) {
        std::vector<std::pair<double, double>> t_hits;  // intervals in [0,len]
        auto add_point = [&](double q) {
            double c = q - piece.a;
            c -= std::floor(c);
            // candidate centers c and c-1 cover the wrap
            for (double center : {c, c - 1.0}) {
                double lo = std::max(center - eps, 0.0);
                double hi = std::min(center + eps, piece.len);
                if (hi > lo) t_hits.emplace_back(lo, hi);
            }
        };
        if (own_endpoints_only) {
            add_point(wrap01(piece.a));
            add_point(wrap01(piece.a + piece.len));
        } else {
            for (double q : boundary) add_point(q);
        }
        if (t_hits.empty()) continue;
        std::sort(t_hits.begin(), t_hits.end());
        // merge and pull back
        double cur_lo = t_hits[0].first, cur_hi = t_hits[0].second;
        std::vector<std::pair<double, double>> merged;
        for (std::size_t i = 1; i < t_hits.size(); ++i) {
            if (t_hits[i].first <= cur_hi) {
                cur_hi = std::max(cur_hi, t_hits[i].second);
            } else {
                merged.emplace_back(cur_lo, cur_hi);
                cur_lo = t_hits[i].first;
                cur_hi = t_hits[i].second;
            }
        }
        merged.emplace_back(cur_lo, cur_hi);
        for (auto [lo, hi] : merged) {
            if (lo <= 1e-15 && hi >= piece.len - 1e-15) {
                total.add(piece.d1 - piece.d0);
                continue;
            }
            double a_d = detail::pull_back_param(sp, state.n, piece, lo);
            double b_d = detail::pull_back_param(sp, state.n, piece, hi);
            total.add(std::fabs(b_d - a_d));
        }
    }
    return total.value();
}

struct GrowthCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    std::size_t pieces = 0;
};

// Check Z_eps Omega_n <= beta^{-n} lambda^n Z_{eps/lambda^n} Omega_0
//                        + eps C_beta |Omega_0|   with slack 1.05.
inline GrowthCheck growth_bound_check(const SkewProduct& sp, double omega0_lo,
                                      double omega0_len, std::size_t n, double eps,
                                      bool own_endpoints_only = true) {
    double lambda = sp.lambda_tilde;
    double beta = lambda / 2.0;
    double C_beta = 4.0 * sp.Lambda * beta / (sp.delta * lambda * (beta - 1.0));

    PartitionState st = initial_partition(omega0_lo, omega0_len, sp.delta);
    for (std::size_t k = 0; k < n; ++k) st = refine(sp, st);

    GrowthCheck chk;
    chk.pieces = st.pieces.size();
    chk.lhs = (n == 0) ? std::min(2.0 * eps, omega0_len)
                       : z_epsilon(sp, st, eps, own_endpoints_only);
    double eps0 = eps / std::pow(lambda, double(n));
    double z0 = std::min(2.0 * eps0, omega0_len);  // single interval at level 0
    chk.rhs = std::pow(beta, -double(n)) * std::pow(lambda, double(n)) * z0 +
              eps * C_beta * omega0_len;
    chk.pass = chk.lhs <= 1.05 * chk.rhs;
    return chk;
}

}  // namespace skewmix
