#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/dynamics.hpp"
#include "skewmix/grid.hpp"

namespace skewmix {

enum class Verdict { Cohomologous, NotCohomologous };

struct CohomologyReport {
    GridFunction ell;
    GridFunction theta;
    GridFunction chi;
    Verdict verdict = Verdict::NotCohomologous;
    double deviation = 0.0;  // max over smoothness pieces of (max chi - min chi)
    double tol_chi = 0.0;
    std::vector<std::pair<double, double>> pieces;  // delimited by merged breakpoints
};

// Deterministic inverse-branch selection: the preimage through the
// lowest-indexed branch whose image interval contains y.
inline double inverse_selection(const SkewProduct& sp, double y) {
    for (std::size_t i = 0; i < sp.f.branch_count(); ++i) {
        auto v = branch_preimages(sp.f, i, y);
        if (!v.empty()) return v.front().first;
    }
    throw NoConvergence("no branch image contains y; map is not covering");
}

// Truncation order so the series tail of ell is below tol.
inline std::size_t ell_truncation(const SkewProduct& sp, double tol) {
    if (sp.sup_tau_prime == 0.0) return 1;
    double m = std::log(sp.sup_tau_prime / ((sp.lambda_tilde - 1.0) * tol)) /
               std::log(sp.lambda_tilde);
    return m <= 1.0 ? 1 : std::size_t(std::ceil(m));
}

// ell(y) = sum_{m>=1} (tau' / (f^m)') o g^m (y), truncated when the tail is
// below tol; g is the fixed lowest-branch selection above.
inline double invariant_slope_at(const SkewProduct& sp, double y, std::size_t M) {
    KahanSum s;
    double z = y;
    double P = 1.0;
    for (std::size_t m = 1; m <= M; ++m) {
        z = inverse_selection(sp, z);
        P /= sp.f.derivative(z);
        s.add(sp.tau.derivative(z) * P);
    }
    return s.value();
}

inline GridFunction invariant_slope(const SkewProduct& sp, std::size_t grid_N,
                                    double tol = 1e-10) {
    if (!(tol > 0.0)) throw Error("tol must be positive");
    std::size_t M = ell_truncation(sp, tol);
    return GridFunction::sample_real(
        grid_N, [&](double y) { return invariant_slope_at(sp, y, M); });
}

// Primitive of a piecewise-constant ell, evaluated exactly at arbitrary
// points via cumulative cell sums.
class ThetaPrimitive {
public:
    explicit ThetaPrimitive(const GridFunction& ell) : ell_(&ell), prefix_(ell.size() + 1, 0.0) {
        double h = 1.0 / double(ell.size());
        KahanSum s;
        for (std::size_t j = 0; j < ell.size(); ++j) {
            s.add(ell[j].real() * h);
            prefix_[j + 1] = s.value();
        }
    }

    // theta(y) = int_0^y ell
    double operator()(double y) const {
        double x = wrap01(y);
        std::size_t n = ell_->size();
        auto full = std::size_t(x * double(n));
        if (full >= n) full = n - 1;
        return prefix_[full] + (*ell_)[full].real() * (x - double(full) / double(n));
    }

private:
    const GridFunction* ell_;
    std::vector<double> prefix_;
};

inline double theta_eval(const GridFunction& ell, double y) { return ThetaPrimitive(ell)(y); }

// Cumulative midpoint-rule primitive at the grid midpoints, theta(0) = 0.
inline GridFunction primitive_theta(const GridFunction& ell) {
    std::size_t n = ell.size();
    GridFunction theta(n);
    double h = 1.0 / double(n);
    KahanSum s;
    for (std::size_t i = 0; i < n; ++i) {
        theta[i] = s.value() + ell[i].real() * 0.5 * h;
        s.add(ell[i].real() * h);
    }
    return theta;
}

// chi = tau - theta o f + theta sampled at grid midpoints; the verdict is
// rendered from the per-piece oscillation of chi.
inline CohomologyReport extract_chi(const SkewProduct& sp, const GridFunction& ell,
                                    double tol_chi = -1.0) {
    if (tol_chi < 0.0) tol_chi = 1e-6 * (1.0 + sp.sup_tau_abs);
    std::size_t n = ell.size();
    CohomologyReport rep;
    rep.ell = ell;
    rep.theta = primitive_theta(ell);
    rep.tol_chi = tol_chi;
    rep.chi = GridFunction(n);
    ThetaPrimitive theta(ell);
    for (std::size_t i = 0; i < n; ++i) {
        double x = (double(i) + 0.5) / double(n);
        rep.chi[i] = sp.tau.value(x) - theta(sp.f.value(x)) + theta(x);
    }

    // pieces delimited by the merged breakpoints of f and tau
    const auto& bps = sp.merged_breakpoints;
    for (std::size_t k = 0; k < bps.size(); ++k) {
        double lo = bps[k];
        double hi = (k + 1 < bps.size()) ? bps[k + 1] : bps.front() + 1.0;
        rep.pieces.emplace_back(lo, hi);
    }
    double dev = 0.0;
    for (auto [lo, hi] : rep.pieces) {
        double mn = 1e300, mx = -1e300;
        for (std::size_t i = 0; i < n; ++i) {
            double x = (double(i) + 0.5) / double(n);
            double xl = (x < lo) ? x + 1.0 : x;
            if (xl <= lo || xl >= hi) continue;
            // exclusion window around piece boundaries: chi is sampled on a
            // grid and the cells straddling a breakpoint mix two branches
            if (xl - lo < 1.0 / double(n) || hi - xl < 1.0 / double(n)) continue;
            double v = rep.chi[i].real();
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mx >= mn) dev = std::max(dev, mx - mn);
    }
    rep.deviation = dev;
    rep.verdict = (dev <= tol_chi) ? Verdict::Cohomologous : Verdict::NotCohomologous;
    return rep;
}

inline CohomologyReport cohomology_report(const SkewProduct& sp, std::size_t grid_N,
                                          double tol = 1e-10, double tol_chi = -1.0) {
    if (sp.verdict == BuildVerdict::TauPiecewiseConstant) {
        // tau' = 0: ell = 0, theta = 0, chi = tau
        GridFunction ell(grid_N, 0.0);
        CohomologyReport rep = extract_chi(sp, ell, tol_chi);
        rep.verdict = Verdict::Cohomologous;
        return rep;
    }
    return extract_chi(sp, invariant_slope(sp, grid_N, tol), tol_chi);
}

}  // namespace skewmix
