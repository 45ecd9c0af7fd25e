#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/dynamics.hpp"
#include "skewmix/expr.hpp"
#include "skewmix/grid.hpp"
#include "skewmix/transfer.hpp"

namespace skewmix {

// Observable on the 2-torus stored by fibre Fourier modes:
//   g(x,u) = sum_{|b| <= B} mode_b(x) e^{2 pi i b u}.
// Modes are grid functions; when built from expressions the exact mode
// functions are kept alongside for quadrature-free evaluation.
struct Observable2D {
    int B = 0;
    std::map<int, GridFunction> modes;
    std::map<int, std::function<Complex(double)>> mode_fns;
    std::map<int, double> tail_bv;  // BV norms of modes discarded by the cutoff
    bool real_symmetric = false;    // conj symmetry mode_{-b} = conj(mode_b)

    bool has_mode(int b) const { return modes.count(b) != 0; }

    Complex mode_at(int b, double x) const {
        auto f = mode_fns.find(b);
        if (f != mode_fns.end()) return f->second(x);
        auto m = modes.find(b);
        return (m == modes.end()) ? Complex(0.0) : m->second.at(x);
    }

    Complex value(double x, double u) const {
        Complex acc = 0.0;
        for (const auto& [b, m] : modes)
            acc += mode_at(b, x) * std::polar(1.0, 2.0 * kPi * double(b) * u);
        return acc;
    }

    double real_value(double x, double u) const { return value(x, u).real(); }

    // mean against the product measure nu x Leb: only the zero mode survives
    double mean(const GridFunction& h_nu) const {
        auto m = modes.find(0);
        if (m == modes.end()) return 0.0;
        KahanSum s;
        for (std::size_t i = 0; i < h_nu.size(); ++i)
            s.add((mode_at(0, h_nu.midpoint(i)) * h_nu[i]).real());
        return s.value() / double(h_nu.size());
    }

    // cutoff truncation error contribution: sum over discarded modes
    double tail_norm() const {
        double t = 0.0;
        for (const auto& [b, v] : tail_bv) t += v;
        return t;
    }
};

struct ModeSpec {
    int b = 0;
    std::string re;
    std::string im;  // empty means 0
};

// Build from explicit mode expressions; the expressions are kept for exact
// evaluation, the grid holds midpoint samples.
inline Observable2D observable_from_modes(std::size_t N, const std::vector<ModeSpec>& specs) {
    Observable2D g;
    for (const ModeSpec& s : specs) {
        if (g.has_mode(s.b)) throw Error("duplicate mode " + std::to_string(s.b));
        ExprPtr re = parse_expression(s.re);
        ExprPtr im = s.im.empty() ? nullptr : parse_expression(s.im);
        auto fn = [re, im](double x) -> Complex {
            return {eval_value(*re, x), im ? eval_value(*im, x) : 0.0};
        };
        g.modes.emplace(s.b, GridFunction::sample(N, fn));
        g.mode_fns.emplace(s.b, fn);
        g.B = std::max(g.B, std::abs(s.b));
    }
    // conjugate-symmetry check on the grid samples
    g.real_symmetric = true;
    for (const auto& [b, m] : g.modes) {
        auto other = g.modes.find(-b);
        if (other == g.modes.end()) {
            if (m.l1() > 1e-15) g.real_symmetric = false;
            continue;
        }
        for (std::size_t i = 0; i < m.size() && g.real_symmetric; ++i)
            if (std::abs(m[i] - std::conj(other->second[i])) > 1e-12) g.real_symmetric = false;
    }
    return g;
}

// Build by sampling a function on an N x M torus grid and transforming in the
// fibre coordinate; modes beyond the cutoff are recorded in tail_bv.
inline Observable2D observable_from_function(std::size_t N, std::size_t M, int B,
                                             const std::function<double(double, double)>& fn) {
    if (M < 2 * std::size_t(B) + 2) throw GridTooCoarse("fibre grid cannot resolve the cutoff");
    Observable2D g;
    g.B = B;
    g.real_symmetric = true;
    int half = int(M) / 2;
    std::vector<GridFunction> all;
    for (int b = -half + 1; b < half; ++b) all.emplace_back(N);
    for (std::size_t i = 0; i < N; ++i) {
        double x = (double(i) + 0.5) / double(N);
        for (int b = -half + 1; b < half; ++b) {
            KahanSum re, im;
            for (std::size_t m = 0; m < M; ++m) {
                double u = (double(m) + 0.5) / double(M);
                double v = fn(x, u);
                double ph = -2.0 * kPi * double(b) * u;
                re.add(v * std::cos(ph));
                im.add(v * std::sin(ph));
            }
            all[std::size_t(b + half - 1)][i] = Complex(re.value(), im.value()) / double(M);
        }
    }
    for (int b = -half + 1; b < half; ++b) {
        GridFunction& m = all[std::size_t(b + half - 1)];
        if (std::abs(b) <= B) {
            g.modes.emplace(b, std::move(m));
        } else {
            double bvn = m.bv();
            if (bvn > 1e-14) g.tail_bv.emplace(b, bvn);
        }
    }
    return g;
}

// ---- correlation series -------------------------------------------------------

struct CorrelationSeries {
    std::vector<Complex> values;  // Cor(n) for n = 0..n_max
    double fit_zeta = 0.0;
    double fit_r2 = 0.0;
    std::size_t fit_lo = 0, fit_hi = 0;
    std::size_t fit_used = 0;
    double tail_bound = 0.0;
    std::string convention;  // pairing locked against the direct estimator
};

struct RateFit {
    double zeta = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;
};

// Least squares of log|Cor(n)| vs n over [n_lo, n_hi], skipping entries at or
// below the 1e-13 floor.
inline RateFit fit_rate(const std::vector<Complex>& values, std::size_t n_lo, std::size_t n_hi) {
    std::vector<double> xs, ys;
    for (std::size_t n = n_lo; n <= n_hi && n < values.size(); ++n) {
        double a = std::abs(values[n]);
        if (a > 1e-13) {
            xs.push_back(double(n));
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() < 4) throw InsufficientData("need >= 4 usable correlation values");
    double n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (icept + slope * xs[i]);
        ss_res += e * e;
        double d = ys[i] - mean;
        ss_tot += d * d;
    }
    RateFit fit;
    fit.zeta = -slope;
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    fit.used = xs.size();
    return fit;
}

// ---- direct estimator ----------------------------------------------------------

// Cor(n) = int g . (h o F^n) h_nu dx du - mean(g) mean(h) on an N x M midpoint
// grid; F^n by forward orbit.
inline CorrelationSeries correlation_direct(const SkewProduct& sp, const Observable2D& g,
                                            const Observable2D& h, std::size_t n_max,
                                            std::size_t N = 1u << 12, std::size_t M = 1u << 10) {
    GridFunction h_nu = invariant_density(sp, N);
    double mg = g.mean(h_nu), mh = h.mean(h_nu);

    CorrelationSeries out;
    out.values.assign(n_max + 1, 0.0);
    std::vector<KahanSum> acc_re(n_max + 1), acc_im(n_max + 1);

    std::vector<double> us(M);
    for (std::size_t m = 0; m < M; ++m) us[m] = (double(m) + 0.5) / double(M);

    for (std::size_t i = 0; i < N; ++i) {
        double x = (double(i) + 0.5) / double(N);
        double w = h_nu[i].real();
        // forward orbit of x with accumulated fibre shift
        std::vector<double> xs(n_max + 1), ts(n_max + 1, 0.0);
        xs[0] = x;
        for (std::size_t n = 0; n < n_max; ++n) {
            ts[n + 1] = ts[n] + sp.tau.value(xs[n]);
            xs[n + 1] = sp.f.value(xs[n]);
        }
        std::vector<Complex> gs(M);
        for (std::size_t m = 0; m < M; ++m) gs[m] = g.value(x, us[m]);
        for (std::size_t n = 0; n <= n_max; ++n) {
            for (std::size_t m = 0; m < M; ++m) {
                Complex v = gs[m] * h.value(xs[n], us[m] + ts[n]) * w;
                acc_re[n].add(v.real());
                acc_im[n].add(v.imag());
            }
        }
    }
    double scale = 1.0 / (double(N) * double(M));
    for (std::size_t n = 0; n <= n_max; ++n)
        out.values[n] = Complex(acc_re[n].value(), acc_im[n].value()) * scale - mg * mh;
    out.convention = "direct";
    return out;
}

// ---- fibre-Fourier estimator -----------------------------------------------------

namespace detail {

// The four candidate pairings of the mode formula, all with twist -2 pi b:
//   0: sum_b  int L^n(g_b h_nu) . h_b          (inner density, same index)
//   1: sum_b  int L^n(g_b h_nu) . h_{-b}       (inner density, opposite index)
//   2: sum_b  int L^n(g_b) . h_b  h_nu         (outer density, same index)
//   3: sum_b  int L^n(g_b) . h_{-b} h_nu       (outer density, opposite index)
// Each integral is evaluated exactly by change of variables along forward
// orbits of the quadrature nodes:
//   int L_c^n(phi) psi dy = int phi(x) e^{i c tau_n(x)} psi(f^n x) dx.
inline std::array<Complex, 4> fourier_candidates(const SkewProduct& sp, const Observable2D& g,
                                                 const Observable2D& h, const GridFunction& h_nu,
                                                 std::size_t n) {
    std::size_t N = h_nu.size();
    std::array<KahanSum, 4> re, im;
    for (std::size_t i = 0; i < N; ++i) {
        double x = (double(i) + 0.5) / double(N);
        double xn = x, tn = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            tn += sp.tau.value(xn);
            xn = sp.f.value(xn);
        }
        double w_in = h_nu[i].real();
        double w_out = h_nu.real_at(xn);
        for (const auto& [b, m] : g.modes) {
            Complex gb = g.mode_at(b, x) * std::polar(1.0, -2.0 * kPi * double(b) * tn);
            Complex hp = h.mode_at(b, xn);
            Complex hm = h.mode_at(-b, xn);
            Complex c[4] = {gb * hp * w_in, gb * hm * w_in, gb * hp * w_out, gb * hm * w_out};
            for (int k = 0; k < 4; ++k) {
                re[std::size_t(k)].add(c[k].real());
                im[std::size_t(k)].add(c[k].imag());
            }
        }
    }
    std::array<Complex, 4> out;
    for (int k = 0; k < 4; ++k)
        out[std::size_t(k)] =
            Complex(re[std::size_t(k)].value(), im[std::size_t(k)].value()) / double(N);
    return out;
}

inline const char* convention_name(int k) {
    static const char* names[4] = {"inner/same", "inner/opposite", "outer/same",
                                   "outer/opposite"};
    return names[std::size_t(k)];
}

}  // namespace detail

// Fibre-Fourier correlation.  The pairing convention (mode index of h, and
// whether the invariant density multiplies the inner or the outer factor) is
// fixed by matching the direct estimator at n = 0..2 to 1e-8; each locked-in
// value int L_{-2 pi b}^n (g_b h_nu) . h_pair dy is evaluated by change of
// variables along forward orbits, which is exact up to the x-quadrature.
inline CorrelationSeries correlation_fourier(const SkewProduct& sp, const Observable2D& g,
                                             const Observable2D& h, std::size_t n_max,
                                             std::size_t N = 1u << 12,
                                             std::size_t M_lock = 1u << 8) {
    GridFunction h_nu = invariant_density(sp, N);
    double mg = g.mean(h_nu), mh = h.mean(h_nu);
    double mean_product = mg * mh;

    // lock the convention against the direct estimator on short times
    std::size_t n_lock = std::min<std::size_t>(2, n_max);
    std::size_t m_lock = M_lock;
    std::size_t need = 2 * std::size_t(g.B + h.B) + 2;
    while (m_lock < need) m_lock *= 2;
    CorrelationSeries direct = correlation_direct(sp, g, h, n_lock, N, m_lock);
    std::array<double, 4> err{0.0, 0.0, 0.0, 0.0};
    for (std::size_t n = 0; n <= n_lock; ++n) {
        auto cand = detail::fourier_candidates(sp, g, h, h_nu, n);
        for (int k = 0; k < 4; ++k)
            err[std::size_t(k)] = std::max(
                err[std::size_t(k)],
                std::abs(cand[std::size_t(k)] - mean_product - direct.values[n]));
    }
    int locked = -1;
    for (int k = 0; k < 4; ++k)
        if (err[std::size_t(k)] <= 1e-8 && (locked < 0 || err[std::size_t(k)] < err[std::size_t(locked)]))
            locked = k;
    if (locked < 0)
        throw ConventionMismatch("no mode pairing matches the direct estimator (best err " +
                                 std::to_string(*std::min_element(err.begin(), err.end())) + ")");

    CorrelationSeries out;
    out.convention = detail::convention_name(locked);
    out.tail_bound = 0.0;
    for (const auto& [b, v] : g.tail_bv) {
        auto it = h.tail_bv.find(-b);
        if (it != h.tail_bv.end()) out.tail_bound += v * it->second;
    }
    out.values.assign(n_max + 1, 0.0);
    for (std::size_t n = 0; n <= n_max; ++n) {
        auto cand = detail::fourier_candidates(sp, g, h, h_nu, n);
        out.values[n] = cand[std::size_t(locked)] - mean_product;
    }
    return out;
}

// Fit and record the exponential rate over [n_lo, n_hi].
inline void fit_series(CorrelationSeries& s, std::size_t n_lo, std::size_t n_hi) {
    RateFit f = fit_rate(s.values, n_lo, n_hi);
    s.fit_zeta = f.zeta;
    s.fit_r2 = f.r2;
    s.fit_lo = n_lo;
    s.fit_hi = n_hi;
    s.fit_used = f.used;
}

}  // namespace skewmix
