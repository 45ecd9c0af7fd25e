#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/expr.hpp"

namespace skewmix {

enum class MapKind { Circle, Real };

// One smoothness branch of a piecewise map.  The branch lives on the lift
// interval [x_lo, x_hi]; for the wrap-around branch x_hi may exceed 1.
// Expressions are evaluated at the lift coordinate.
struct Branch {
    ExprPtr expr;
    double x_lo = 0.0;
    double x_hi = 0.0;
    // lift image [v_lo, v_hi] over the closed branch interval (sorted);
    // meaningful for monotone branches of the base map.
    double v_lo = 0.0;
    double v_hi = 0.0;
    bool increasing = true;
};

// A circle map (or real-valued fibre map) given by breakpoints in [0,1) and
// one C^2 expression per branch.
class PiecewiseC2Map {
public:
    PiecewiseC2Map() = default;

    PiecewiseC2Map(std::vector<double> breakpoints, std::vector<ExprPtr> branch_exprs,
                   MapKind kind)
        : breakpoints_(std::move(breakpoints)), kind_(kind) {
        if (breakpoints_.empty() || branch_exprs.size() != breakpoints_.size())
            throw Error("need one branch expression per breakpoint");
        for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
            if (!(breakpoints_[i] < breakpoints_[i + 1]))
                throw Error("breakpoints must be strictly increasing");
        if (breakpoints_.front() < 0.0 || breakpoints_.back() >= 1.0)
            throw Error("breakpoints must lie in [0,1)");
        std::size_t j = breakpoints_.size();
        branches_.resize(j);
        for (std::size_t i = 0; i < j; ++i) {
            branches_[i].expr = std::move(branch_exprs[i]);
            branches_[i].x_lo = breakpoints_[i];
            branches_[i].x_hi = (i + 1 < j) ? breakpoints_[i + 1] : breakpoints_.front() + 1.0;
        }
    }

    MapKind kind() const { return kind_; }
    std::size_t branch_count() const { return branches_.size(); }
    const Branch& branch(std::size_t i) const { return branches_[i]; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    // Branch index containing the circle point x; points exactly at a
    // breakpoint belong to the branch on their right.
    std::size_t branch_index(double x) const {
        double y = wrap01(x);
        // wrap branch covers [back, 1) u [0, front)
        if (y < breakpoints_.front() || y >= breakpoints_.back()) return branches_.size() - 1;
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
        return std::size_t(it - breakpoints_.begin()) - 1;
    }

    // Lift coordinate of circle point x within branch i.
    double lift_into(std::size_t i, double x) const {
        double y = wrap01(x);
        if (y < branches_[i].x_lo) y += 1.0;
        return y;
    }

    double value(double x) const {
        std::size_t i = branch_index(x);
        double v = eval_value(*branches_[i].expr, lift_into(i, x));
        return kind_ == MapKind::Circle ? wrap01(v) : v;
    }

    // Jet of the branch expression at x (value not reduced mod 1).
    Jet2 jet(double x) const {
        std::size_t i = branch_index(x);
        return eval_jet2(*branches_[i].expr, lift_into(i, x));
    }

    double derivative(double x) const { return jet(x).d1; }

    // mutable access used by the builder
    Branch& branch_mut(std::size_t i) { return branches_[i]; }

private:
    std::vector<double> breakpoints_;
    std::vector<Branch> branches_;
    MapKind kind_ = MapKind::Real;
};

enum class BuildVerdict { Ok, TauPiecewiseConstant };

struct BuildOptions {
    std::size_t validation_grid = 10000;  // samples per branch closure
};

// The validated pair (f, tau) with the derived constants.
struct SkewProduct {
    PiecewiseC2Map f;
    PiecewiseC2Map tau;
    double lambda_tilde = 0.0;    // inf f'
    double Lambda = 0.0;          // sup |f'|
    double C1 = 0.0;              // 2 sup|tau'| / (lambda_tilde - 1)
    double delta = 0.0;
    double sup_tau_prime = 0.0;   // sup |tau'|
    double sup_tau_second = 0.0;  // sup |tau''|
    double sup_tau_abs = 0.0;     // sup |tau|
    double sup_f_second = 0.0;    // sup |f''|
    std::vector<double> merged_breakpoints;
    BuildVerdict verdict = BuildVerdict::Ok;
    std::size_t validation_grid = 10000;
    std::size_t preimage_cap = 14;

    std::size_t branch_count() const { return f.branch_count(); }
};

namespace detail {

struct GridStats {
    double min_d1 = 0.0, max_abs_d1 = 0.0, max_abs_d2 = 0.0, max_abs_v = 0.0;
    bool sign_change = false;
};

inline GridStats scan_branch(const Branch& br, std::size_t samples) {
    GridStats s;
    s.min_d1 = 1e300;
    bool first = true;
    int sign = 0;
    for (std::size_t k = 0; k <= samples; ++k) {
        double t = double(k) / double(samples);
        double x = br.x_lo + t * (br.x_hi - br.x_lo);
        Jet2 j = eval_jet2(*br.expr, x);
        if (!std::isfinite(j.v) || !std::isfinite(j.d1) || !std::isfinite(j.d2))
            throw EvalDomainError("branch expression is not finite on branch closure");
        s.min_d1 = std::min(s.min_d1, std::fabs(j.d1));
        s.max_abs_d1 = std::max(s.max_abs_d1, std::fabs(j.d1));
        s.max_abs_d2 = std::max(s.max_abs_d2, std::fabs(j.d2));
        s.max_abs_v = std::max(s.max_abs_v, std::fabs(j.v));
        int sg = (j.d1 > 0.0) ? 1 : (j.d1 < 0.0 ? -1 : 0);
        if (first) {
            sign = sg;
            first = false;
        } else if (sg != 0 && sign != 0 && sg != sign) {
            s.sign_change = true;
        }
        if (sg == 0) s.sign_change = true;
    }
    return s;
}

}  // namespace detail

// Validate hypotheses and derive the scheme constants.  Throws NotExpanding,
// NotCovering or NonMonotoneBranch; a piecewise-constant tau is reported as a
// verdict on the result, not as a failure.
inline SkewProduct build_skew_product(PiecewiseC2Map f, PiecewiseC2Map tau,
                                      BuildOptions options = {}) {
    if (f.kind() != MapKind::Circle) throw Error("base map must be circle-valued");
    SkewProduct sp;
    sp.validation_grid = options.validation_grid;

    double lam = 1e300, Lam = 0.0, sup_f2 = 0.0;
    for (std::size_t i = 0; i < f.branch_count(); ++i) {
        Branch& br = f.branch_mut(i);
        auto s = detail::scan_branch(br, options.validation_grid);
        if (s.sign_change) throw NonMonotoneBranch("base branch " + std::to_string(i));
        double va = eval_value(*br.expr, br.x_lo);
        double vb = eval_value(*br.expr, br.x_hi);
        br.increasing = vb > va;
        br.v_lo = std::min(va, vb);
        br.v_hi = std::max(va, vb);
        lam = std::min(lam, s.min_d1);
        Lam = std::max(Lam, s.max_abs_d1);
        sup_f2 = std::max(sup_f2, s.max_abs_d2);
    }
    if (!(lam > 2.0))
        throw NotExpanding("inf |f'| = " + std::to_string(lam) + " is not > 2");

    // covering: branch lift images, viewed as circle arcs, must cover T^1
    {
        std::vector<std::pair<double, double>> arcs;  // [start, end) with end <= start+1
        for (std::size_t i = 0; i < f.branch_count(); ++i) {
            const Branch& br = f.branch(i);
            double len = br.v_hi - br.v_lo;
            if (len >= 1.0) {
                arcs.emplace_back(0.0, 1.0);
            } else {
                double a = wrap01(br.v_lo);
                arcs.emplace_back(a, a + len);
            }
        }
        // unfold to [0,2) and sweep
        std::vector<std::pair<double, double>> segs;
        for (auto [a, b] : arcs) {
            if (b >= 1.0 && a > 0.0) {
                segs.emplace_back(a, 1.0);
                segs.emplace_back(0.0, b - 1.0);
            } else {
                segs.emplace_back(a, std::min(b, 1.0));
            }
        }
        std::sort(segs.begin(), segs.end());
        double covered = 0.0;
        bool gap = segs.empty() || segs.front().first > 1e-12;
        for (auto [a, b] : segs) {
            if (a > covered + 1e-12) gap = true;
            covered = std::max(covered, b);
        }
        if (gap || covered < 1.0 - 1e-12)
            throw NotCovering("branch images do not cover the circle");
    }

    double sup_t1 = 0.0, sup_t2 = 0.0, sup_t0 = 0.0;
    for (std::size_t i = 0; i < tau.branch_count(); ++i) {
        auto s = detail::scan_branch(tau.branch(i), options.validation_grid);
        sup_t1 = std::max(sup_t1, s.max_abs_d1);
        sup_t2 = std::max(sup_t2, s.max_abs_d2);
        sup_t0 = std::max(sup_t0, s.max_abs_v);
    }

    sp.lambda_tilde = lam;
    sp.Lambda = Lam;
    sp.sup_f_second = sup_f2;
    sp.sup_tau_prime = sup_t1;
    sp.sup_tau_second = sup_t2;
    sp.sup_tau_abs = sup_t0;
    sp.C1 = 2.0 * sup_t1 / (lam - 1.0);
    sp.verdict = (sup_t1 == 0.0) ? BuildVerdict::TauPiecewiseConstant : BuildVerdict::Ok;

    // delta: shortest branch of f, capped at 0.45; an interval shorter than
    // the shortest branch meets at most one breakpoint of f.
    double min_branch = 1e300;
    for (std::size_t i = 0; i < f.branch_count(); ++i)
        min_branch = std::min(min_branch, f.branch(i).x_hi - f.branch(i).x_lo);
    sp.delta = std::min(min_branch, 0.45);

    // merged breakpoint set of f and tau
    std::vector<double> merged = f.breakpoints();
    for (double b : tau.breakpoints()) merged.push_back(b);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
                 merged.end());
    sp.merged_breakpoints = std::move(merged);

    sp.f = std::move(f);
    sp.tau = std::move(tau);
    return sp;
}

// Convenience: build a map from expression strings.
inline PiecewiseC2Map make_map(const std::vector<double>& breakpoints,
                               const std::vector<std::string>& exprs, MapKind kind) {
    std::vector<ExprPtr> parsed;
    parsed.reserve(exprs.size());
    for (const auto& s : exprs) parsed.push_back(parse_expression(s));
    return PiecewiseC2Map(breakpoints, std::move(parsed), kind);
}

}  // namespace skewmix
