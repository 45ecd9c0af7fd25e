#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/dynamics.hpp"
#include "skewmix/grid.hpp"

namespace skewmix {

// int_J K(x) e^{i b theta(x)} dx with amplitude K, phase theta and a
// certified positive lower bound kappa on |theta'| over J.
struct OscillatoryProblem {
    double j_lo = 0.0;
    double j_hi = 1.0;
    std::function<Jet2(double)> K;      // amplitude with derivatives
    std::function<Jet2(double)> theta;  // phase with derivatives
    double b = 1.0;
    double kappa = 0.0;  // inf |theta'| over J (grid + endpoint estimate)

    double length() const { return j_hi - j_lo; }
};

inline std::function<Jet2(double)> jet_fn(ExprPtr e) {
    return [e = std::move(e)](double x) { return eval_jet2(*e, x); };
}

// Estimate kappa = inf |theta'| by dense grid plus endpoints.
inline double estimate_kappa(const OscillatoryProblem& p, std::size_t grid = 10000) {
    double k = 1e300;
    for (std::size_t i = 0; i <= grid; ++i) {
        double x = p.j_lo + p.length() * double(i) / double(grid);
        k = std::min(k, std::fabs(p.theta(x).d1));
    }
    return k;
}

namespace detail {

inline Complex simpson(const std::function<Complex(double)>& f, double a, double m, double b,
                       Complex fa, Complex fm, Complex fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b,
                                Complex fa, Complex fm, Complex fb, Complex whole, double tol,
                                std::size_t& panels, std::size_t panel_cap) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Complex flm = f(lm), frm = f(rm);
    Complex left = simpson(f, a, lm, m, fa, flm, fm);
    Complex right = simpson(f, m, rm, b, fm, frm, fb);
    Complex delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (++panels > panel_cap) throw PanelCapExceeded("adaptive Simpson panel cap exceeded");
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, panels, panel_cap) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, panels, panel_cap);
}

}  // namespace detail

inline Complex integrate_adaptive(const std::function<Complex(double)>& f, double a, double b,
                                  double tol, std::size_t panel_cap = (1u << 20)) {
    if (!(tol > 0.0)) throw Error("tol must be positive");
    // seed with a few panels so oscillation is not missed by the first probe
    const int seed_panels = 8;
    Complex total = 0.0;
    std::size_t panels = 0;
    for (int s = 0; s < seed_panels; ++s) {
        double lo = a + (b - a) * double(s) / seed_panels;
        double hi = a + (b - a) * double(s + 1) / seed_panels;
        double mid = 0.5 * (lo + hi);
        Complex flo = f(lo), fmid = f(mid), fhi = f(hi);
        Complex whole = detail::simpson(f, lo, mid, hi, flo, fmid, fhi);
        total += detail::adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole,
                                          tol / seed_panels, panels, panel_cap);
    }
    return total;
}

inline Complex oscillatory_integral(const OscillatoryProblem& p, double tol = 1e-12) {
    auto f = [&](double x) -> Complex {
        return Complex(p.K(x).v, 0.0) * std::polar(1.0, p.b * p.theta(x).v);
    };
    return integrate_adaptive(f, p.j_lo, p.j_hi, tol);
}

struct VdcBound {
    double corrected = 0.0;  // boundary term doubled
    double paper = 0.0;      // literal constant from the integration by parts
    double sup_K = 0.0;
    double sup_Kprime = 0.0;
    double sup_theta2 = 0.0;
};

// Integration-by-parts bound.  The boundary term |[K/theta' e^{ib theta}]_J|
// is at most 2 sup|K|/kappa, which the literal statement undercounts; both
// values are reported.
inline VdcBound vdc_bound(const OscillatoryProblem& p, std::size_t grid = 10000) {
    if (p.b == 0.0) throw Error("vdc bound requires b != 0");
    if (!(p.kappa > 0.0)) throw Error("kappa must be positive");
    VdcBound out;
    for (std::size_t i = 0; i <= grid; ++i) {
        double x = p.j_lo + p.length() * double(i) / double(grid);
        out.sup_K = std::max(out.sup_K, std::fabs(p.K(x).v));
        out.sup_Kprime = std::max(out.sup_Kprime, std::fabs(p.K(x).d1));
        out.sup_theta2 = std::max(out.sup_theta2, std::fabs(p.theta(x).d2));
    }
    double kap = p.kappa, len = p.length(), ab = std::fabs(p.b);
    double tail = out.sup_K * out.sup_theta2 * len / (kap * kap) + out.sup_Kprime * len / kap;
    out.paper = (out.sup_K / kap + tail) / ab;
    out.corrected = (2.0 * out.sup_K / kap + tail) / ab;
    return out;
}

// ---- phase differences between inverse branches ------------------------------

// Jets of f^n and of the Birkhoff sums tau_n, accumulated forward along the
// orbit of u; everything is evaluated at the starting point u.
struct ForwardJets {
    double fn_d1 = 1.0;   // (f^n)'(u)
    double fn_d2 = 0.0;   // (f^n)''(u)
    double tau_d1 = 0.0;  // tau_n'(u)
    double tau_d2 = 0.0;  // tau_n''(u)
};

inline ForwardJets forward_jets(const SkewProduct& sp, double u, std::size_t n) {
    ForwardJets out;
    double v = wrap01(u);
    double d1 = 1.0, d2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        Jet2 jt = sp.tau.jet(v);
        out.tau_d1 += jt.d1 * d1;
        out.tau_d2 += jt.d2 * d1 * d1 + jt.d1 * d2;
        Jet2 jf = sp.f.jet(v);
        double nd1 = jf.d1 * d1;
        double nd2 = jf.d2 * d1 * d1 + jf.d1 * d2;
        v = wrap01(jf.v);
        d1 = nd1;
        d2 = nd2;
    }
    out.fn_d1 = d1;
    out.fn_d2 = d2;
    return out;
}

// Derivatives of tau_n o h at x, where h is the depth-n inverse branch with
// h(x) = u (chain rule through h' = 1/(f^n)'(u)).
struct InverseBranchJets {
    double u = 0.0;       // h(x)
    double J_n = 0.0;     // 1/|(f^n)'(u)|
    double phase_d1 = 0;  // (tau_n o h)'(x)
    double phase_d2 = 0;  // (tau_n o h)''(x)
};

inline InverseBranchJets inverse_branch_jets(const SkewProduct& sp, double u, std::size_t n) {
    ForwardJets fj = forward_jets(sp, u, n);
    InverseBranchJets out;
    out.u = wrap01(u);
    double hp = 1.0 / fj.fn_d1;                  // signed h'
    double hpp = -fj.fn_d2 * hp * hp * hp;       // h''
    out.J_n = std::fabs(hp);
    out.phase_d1 = fj.tau_d1 * hp;
    out.phase_d2 = fj.tau_d2 * hp * hp + fj.tau_d1 * hpp;
    return out;
}

// theta_{j,k} = tau_n o h_j - tau_n o h_k evaluated through the preimages
// u_j = h_j(x), u_k = h_k(x); K_{j,k} = J_n o h_j * J_n o h_k.
struct PhaseDifference {
    double d1 = 0.0;         // theta'_{j,k}(x)
    double d2 = 0.0;         // theta''_{j,k}(x)
    double K = 0.0;          // K_{j,k}(x)
    double K_d1 = 0.0;       // K'_{j,k}(x)
    double short_d1 = 0.0;   // (tau_{n2}' J_{n2}) o g_j - same o g_k
    double J_n2_sum = 0.0;   // (J_{n2} o g_j + J_{n2} o g_k)(x)
};

inline PhaseDifference phase_difference(const SkewProduct& sp, double u_j, double u_k,
                                        std::size_t n1, std::size_t n2) {
    std::size_t n = n1 + n2;
    ForwardJets fj = forward_jets(sp, u_j, n);
    ForwardJets fk = forward_jets(sp, u_k, n);
    auto inv = [](const ForwardJets& f) {
        InverseBranchJets o;
        double hp = 1.0 / f.fn_d1;
        double hpp = -f.fn_d2 * hp * hp * hp;
        o.J_n = std::fabs(hp);
        o.phase_d1 = f.tau_d1 * hp;
        o.phase_d2 = f.tau_d2 * hp * hp + f.tau_d1 * hpp;
        return o;
    };
    InverseBranchJets aj = inv(fj), ak = inv(fk);
    PhaseDifference out;
    out.d1 = aj.phase_d1 - ak.phase_d1;
    out.d2 = aj.phase_d2 - ak.phase_d2;
    out.K = aj.J_n * ak.J_n;
    // (J_n o h)'(x) = d/dx |h'(x)| = sign(h') h'' = -(f^n)'' h'^2 |h'|
    {
        double hpj = 1.0 / fj.fn_d1, hpk = 1.0 / fk.fn_d1;
        double dJj = -fj.fn_d2 * hpj * hpj * std::fabs(hpj);
        double dJk = -fk.fn_d2 * hpk * hpk * std::fabs(hpk);
        out.K_d1 = dJj * ak.J_n + aj.J_n * dJk;
    }
    // split form: the n2-scale part evaluated at g_j = f^{n1} o h_j
    double gj = wrap01(u_j), gk = wrap01(u_k);
    for (std::size_t k = 0; k < n1; ++k) {
        gj = sp.f.value(gj);
        gk = sp.f.value(gk);
    }
    InverseBranchJets bj = inverse_branch_jets(sp, gj, n2);
    InverseBranchJets bk = inverse_branch_jets(sp, gk, n2);
    out.short_d1 = bj.phase_d1 - bk.phase_d1;
    out.J_n2_sum = bj.J_n + bk.J_n;
    return out;
}

// Depth-n inverse branch point h_w(x) for the itinerary word w (innermost
// first).  Throws DomainMismatch if x is not in the image of the branch chain.
inline double inverse_point(const SkewProduct& sp, const BranchWord& word, double x) {
    double u = wrap01(x);
    for (std::size_t j = word.length(); j-- > 0;) {
        auto v = branch_inverse(sp.f, word.symbols[j], u);
        if (!v) throw DomainMismatch("point not in image of inverse branch chain");
        u = *v;
    }
    return u;
}

inline PhaseDifference phase_difference(const SkewProduct& sp, const BranchWord& word_j,
                                        const BranchWord& word_k, std::size_t n1,
                                        std::size_t n2, double x) {
    if (word_j.length() != n1 + n2 || word_k.length() != n1 + n2)
        throw Error("word length must equal n1 + n2");
    return phase_difference(sp, inverse_point(sp, word_j, x), inverse_point(sp, word_k, x),
                            n1, n2);
}

// Seeded randomized problem family: K = a0 + a1 sin(2 pi x + p),
// theta = c1 x + c2 x^2 + (c3 / 2 pi) sin(2 pi x), coefficients chosen so the
// measured kappa stays >= 0.2; |b| in [5, 500].
inline std::vector<OscillatoryProblem> vdc_default_suite(std::size_t count = 50,
                                                         std::uint64_t seed = 42) {
    std::vector<OscillatoryProblem> out;
    Rng rng(seed);
    while (out.size() < count) {
        OscillatoryProblem p;
        p.j_lo = 0.0;
        p.j_hi = rng.uniform(0.3, 1.0);
        double a0 = rng.uniform(-1.0, 1.0), a1 = rng.uniform(-1.0, 1.0);
        double ph = rng.uniform(0.0, 1.0);
        double c1 = rng.uniform(1.2, 3.0), c2 = rng.uniform(-0.3, 0.3);
        double c3 = rng.uniform(-0.3, 0.3);
        double b = rng.uniform(5.0, 500.0);
        if (rng.below(2)) b = -b;
        p.b = b;
        const double w = 2.0 * kPi;
        p.K = [a0, a1, ph, w](double x) {
            double s = std::sin(w * (x + ph)), c = std::cos(w * (x + ph));
            return Jet2{a0 + a1 * s, a1 * w * c, -a1 * w * w * s};
        };
        p.theta = [c1, c2, c3, w](double x) {
            return Jet2{c1 * x + c2 * x * x + (c3 / w) * std::sin(w * x),
                        c1 + 2.0 * c2 * x + c3 * std::cos(w * x),
                        2.0 * c2 - c3 * w * std::sin(w * x)};
        };
        p.kappa = estimate_kappa(p);
        if (p.kappa >= 0.2) out.push_back(std::move(p));
    }
    return out;
}

// C6 = sup|f''| / (lambda_tilde - 1), the uniform bound on J_n'.
inline double distortion_c6(const SkewProduct& sp) {
    return sp.sup_f_second / (sp.lambda_tilde - 1.0);
}

// C7 bound on |theta_{j,k}''|.
inline double distortion_c7(const SkewProduct& sp) {
    double c6 = distortion_c6(sp);
    return (sp.sup_tau_second + sp.sup_tau_prime * c6) / (1.0 - 1.0 / sp.lambda_tilde);
}

}  // namespace skewmix
