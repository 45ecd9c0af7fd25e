#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "skewmix/common.hpp"
#include "skewmix/dynamics.hpp"
#include "skewmix/grid.hpp"

namespace skewmix {

// Single-step preimage data of every cell midpoint; one table serves all
// twist frequencies on the same grid.
class TransferTable {
public:
    struct Entry {
        double x;
        std::uint32_t cell;
        double J;
        double tau;
    };

    TransferTable(const SkewProduct& sp, std::size_t n_cells) : n_(n_cells) {
        offsets_.reserve(n_cells + 1);
        offsets_.push_back(0);
        for (std::size_t i = 0; i < n_cells; ++i) {
            double y = (double(i) + 0.5) / double(n_cells);
            for (const Step& s : preimage_step(sp, y)) {
                Entry e;
                e.x = s.x;
                e.cell = std::uint32_t(std::min(std::size_t(wrap01(s.x) * double(n_cells)),
                                                n_cells - 1));
                e.J = 1.0 / std::fabs(sp.f.derivative(s.x));
                e.tau = sp.tau.value(s.x);
                entries_.push_back(e);
            }
            offsets_.push_back(entries_.size());
        }
    }

    std::size_t cells() const { return n_; }

    // one application of L_b with piecewise-constant lookup of h
    GridFunction apply(double b, const GridFunction& h) const {
        if (h.size() != n_) throw Error("grid size mismatch");
        GridFunction out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            Complex acc = 0.0;
            for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
                const Entry& e = entries_[k];
                Complex w = (b == 0.0) ? Complex(e.J, 0.0)
                                       : Complex(e.J, 0.0) * std::polar(1.0, b * e.tau);
                acc += w * h[e.cell];
            }
            out[i] = acc;
        }
        return out;
    }

    // Precompute complex weights for a fixed b; repeated applications are
    // then sparse mat-vecs.
    std::vector<Complex> weights(double b) const {
        std::vector<Complex> w(entries_.size());
        for (std::size_t k = 0; k < entries_.size(); ++k)
            w[k] = Complex(entries_[k].J, 0.0) * std::polar(1.0, b * entries_[k].tau);
        return w;
    }

    GridFunction apply_weights(const std::vector<Complex>& w, const GridFunction& h) const {
        GridFunction out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            Complex acc = 0.0;
            for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
                acc += w[k] * h[entries_[k].cell];
            out[i] = acc;
        }
        return out;
    }

    // apply with exact evaluation of h at the true preimages
    GridFunction apply_fn(double b, const std::function<Complex(double)>& h) const {
        GridFunction out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            Complex acc = 0.0;
            for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
                const Entry& e = entries_[k];
                acc += Complex(e.J, 0.0) * std::polar(1.0, b * e.tau) * h(e.x);
            }
            out[i] = acc;
        }
        return out;
    }

private:
    std::size_t n_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> offsets_;
};

// L_b^n h by n repeated collocation steps.
inline GridFunction apply_twisted(const SkewProduct& sp, double b, const GridFunction& h,
                                  std::size_t n = 1) {
    TransferTable table(sp, h.size());
    GridFunction out = h;
    auto w = table.weights(b);
    for (std::size_t k = 0; k < n; ++k) out = table.apply_weights(w, out);
    return out;
}

// Invariant density of the base map by power iteration of L_0 from h = 1.
inline GridFunction invariant_density(const SkewProduct& sp, std::size_t N,
                                      std::size_t iters = 200, double tol = 1e-12) {
    TransferTable table(sp, N);
    GridFunction h(N, 1.0);
    double residual = 1.0;
    for (std::size_t k = 0; k < iters; ++k) {
        GridFunction next = table.apply(0.0, h);
        double mass = next.l1();
        if (!(mass > 0.0)) throw NotConverged("density mass vanished");
        next *= 1.0 / mass;
        residual = l1_distance(next, h);
        h = next;
        if (residual < tol) return h;
    }
    throw NotConverged("invariant density residual " + std::to_string(residual));
}

inline GridFunction invariant_density_cached(const SkewProduct& sp, const TransferTable& table,
                                             std::size_t iters = 200, double tol = 1e-12) {
    GridFunction h(table.cells(), 1.0);
    double residual = 1.0;
    for (std::size_t k = 0; k < iters; ++k) {
        GridFunction next = table.apply(0.0, h);
        double mass = next.l1();
        if (!(mass > 0.0)) throw NotConverged("density mass vanished");
        next *= 1.0 / mass;
        residual = l1_distance(next, h);
        h = next;
        if (residual < tol) return h;
    }
    throw NotConverged("invariant density residual " + std::to_string(residual));
}

// ---- Lasota-Yorke constants -------------------------------------------------

struct LyConstants {
    double sup_J = 0.0;       // sup 1/|f'|
    double sup_Jprime = 0.0;  // sup |J'|
    double sup_tauJ = 0.0;    // sup |tau' J|
    double sup_chop = 0.0;    // bound on |phi'| of the chopping function
    double C_LY = 0.0;        // sup_Jprime + sup_tauJ + sup_chop
    double C_lambda = 0.0;    // max(1, C_LY / (1 - 2 sup_J))
};

inline LyConstants ly_constants(const SkewProduct& sp, std::size_t grid = 10000) {
    LyConstants c;
    double min_image = 1e300;
    for (std::size_t i = 0; i < sp.f.branch_count(); ++i) {
        const Branch& br = sp.f.branch(i);
        min_image = std::min(min_image, std::min(br.v_hi - br.v_lo, 1.0));
        for (std::size_t k = 0; k <= grid; ++k) {
            double x = br.x_lo + (br.x_hi - br.x_lo) * double(k) / double(grid);
            Jet2 jf = eval_jet2(*br.expr, x);
            double J = 1.0 / std::fabs(jf.d1);
            // J' = -f'' / (f')^2 * sign(f') / |f'| -> |J'| = |f''| / f'^2 * J
            double Jp = std::fabs(jf.d2) * J * J / std::fabs(jf.d1);
            c.sup_J = std::max(c.sup_J, J);
            c.sup_Jprime = std::max(c.sup_Jprime, Jp);
            double tp = sp.tau.derivative(wrap01(x));
            c.sup_tauJ = std::max(c.sup_tauJ, std::fabs(tp) * J);
        }
    }
    if (min_image < 1e-9) throw DegenerateImage("smoothness piece with tiny image");
    c.sup_chop = 2.0 * c.sup_J / min_image;
    c.C_LY = c.sup_Jprime + c.sup_tauJ + c.sup_chop;
    c.C_lambda = std::max(1.0, c.C_LY / (1.0 - 2.0 * c.sup_J));
    return c;
}

// Empirical check of ||L_b^n h||_BV <= C_l lam^{-n} ||h||_BV + C_l (1+|b|) ||h||_L1
// on the discretized quantities, slack 1.05.
inline bool empirical_ly_check(const SkewProduct& sp, const TransferTable& table, double b,
                               const GridFunction& h, std::size_t n, const LyConstants& c) {
    GridFunction out = h;
    auto w = table.weights(b);
    for (std::size_t k = 0; k < n; ++k) out = table.apply_weights(w, out);
    double lhs = out.bv();
    double rhs = c.C_lambda * std::pow(sp.lambda_tilde, -double(n)) * h.bv() +
                 c.C_lambda * (1.0 + std::fabs(b)) * h.l1();
    return lhs <= 1.05 * rhs;
}

// ---- two-time-scale scheme constants ----------------------------------------

struct SchemeConstants {
    double lambda = 0.0;  // identified with lambda_tilde
    double beta = 0.0;    // lambda / 2
    double rho1 = 0.0;
    double xi = 0.0;
    double rho2 = 0.0;
    double C_lambda = 0.0;
    double C_beta = 0.0;
    std::size_t n0 = 0;
    double b0 = 0.0;

    std::size_t n1(double b) const {
        return std::size_t(std::ceil(rho1 * std::log(std::fabs(b))));
    }
    std::size_t n2(double b) const {
        return std::size_t(std::ceil(rho2 * std::log(std::fabs(b))));
    }
    std::size_t n_of_b(double b) const { return n1(b) + n2(b); }
};

inline SchemeConstants scheme_constants(const SkewProduct& sp, const LyConstants& ly,
                                        std::size_t N_max = 1u << 20) {
    SchemeConstants c;
    c.lambda = sp.lambda_tilde;
    c.beta = sp.lambda_tilde / 2.0;
    c.rho1 = 2.0 / std::log(c.lambda);
    c.xi = std::log(c.beta) / (2.0 * std::log(c.lambda));
    c.rho2 = c.xi / (2.0 * std::log(sp.Lambda));
    c.C_lambda = ly.C_lambda;
    c.C_beta = 4.0 * sp.Lambda * c.beta / (sp.delta * c.lambda * (c.beta - 1.0));
    c.n0 = std::size_t(std::ceil(std::log(4.0 * ly.C_lambda) / std::log(c.lambda)));
    // smallest |b| whose H_l partition is resolvable on the largest grid
    c.b0 = std::pow(double(N_max) / 4.0, 1.0 / (1.0 + c.xi));
    return c;
}

// ---- H_l partition and averaging --------------------------------------------

// number of equal intervals with |H_l| in [|b|^-(1+xi), 2|b|^-(1+xi)]
inline std::size_t hl_count(double b, double xi) {
    auto L = std::size_t(std::floor(std::pow(std::fabs(b), 1.0 + xi)));
    return std::max<std::size_t>(L, 1);
}

// Piecewise-constant average of h over the H_l partition.
inline GridFunction hl_average(const GridFunction& h, double b, double xi) {
    std::size_t L = hl_count(b, xi);
    std::size_t N = h.size();
    if (N < 4 * L) throw GridTooCoarse("need >= 4 cells per H_l interval");
    std::vector<Complex> sum(L, 0.0);
    std::vector<std::size_t> cnt(L, 0);
    for (std::size_t i = 0; i < N; ++i) {
        auto l = std::size_t(h.midpoint(i) * double(L));
        if (l >= L) l = L - 1;
        sum[l] += h[i];
        cnt[l] += 1;
    }
    GridFunction out(N);
    for (std::size_t i = 0; i < N; ++i) {
        auto l = std::size_t(h.midpoint(i) * double(L));
        if (l >= L) l = L - 1;
        out[i] = sum[l] / double(cnt[l]);
    }
    return out;
}

// ---- norm decay experiment ---------------------------------------------------

struct DecayProbe {
    std::string id;
    double ratio = 0.0;
};

struct DecayResult {
    std::size_t n_b = 0;
    double max_ratio = 0.0;
    double gamma2_est = 0.0;  // -log(max_ratio)/n_b
    std::vector<DecayProbe> probes;
};

// Probe estimate of ||L_b^{n(b)}||_(b): maximize the (b)-norm ratio over the
// H_l indicator family plus seeded random BV probes.
inline DecayResult norm_decay_experiment(const SkewProduct& sp, const TransferTable& table,
                                         double b, const SchemeConstants& consts,
                                         std::size_t random_probes = 20,
                                         std::uint64_t seed = 42) {
    std::size_t N = table.cells();
    double needed = 4.0 * std::pow(std::fabs(b), 1.0 + consts.xi);
    if (double(N) < needed)
        throw GridTooCoarse("grid " + std::to_string(N) + " < 4 |b|^(1+xi)");

    DecayResult res;
    res.n_b = consts.n_of_b(b);
    auto w = table.weights(b);

    auto run_probe = [&](const GridFunction& p, const std::string& id) {
        double denom = p.bnorm(b);
        if (!(denom > 0.0)) return;
        GridFunction out = p;
        for (std::size_t k = 0; k < res.n_b; ++k) out = table.apply_weights(w, out);
        double r = out.bnorm(b) / denom;
        res.probes.push_back({id, r});
        res.max_ratio = std::max(res.max_ratio, r);
    };

    std::size_t L = hl_count(b, consts.xi);
    for (std::size_t l = 0; l < L; ++l) {
        GridFunction ind(N);
        double lo = double(l) / double(L), hi = double(l + 1) / double(L);
        for (std::size_t i = 0; i < N; ++i) {
            double m = ind.midpoint(i);
            ind[i] = (m >= lo && m < hi) ? 1.0 : 0.0;
        }
        run_probe(ind, "H" + std::to_string(l));
    }

    Rng rng(seed);
    for (std::size_t r = 0; r < random_probes; ++r) {
        GridFunction p(N);
        // random piecewise constant with a few jumps plus a smooth part
        std::size_t jumps = 4 + rng.below(28);
        std::vector<double> pos(jumps);
        std::vector<Complex> lvl(jumps);
        for (std::size_t j = 0; j < jumps; ++j) {
            pos[j] = rng.uniform();
            lvl[j] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
        std::sort(pos.begin(), pos.end());
        double a1 = rng.uniform(-1.0, 1.0);
        double ph = rng.uniform(0.0, 1.0);
        for (std::size_t i = 0; i < N; ++i) {
            double m = p.midpoint(i);
            auto it = std::upper_bound(pos.begin(), pos.end(), m);
            std::size_t j = (it == pos.begin()) ? jumps - 1 : std::size_t(it - pos.begin()) - 1;
            p[i] = lvl[j] + a1 * std::sin(2.0 * kPi * (m + ph));
        }
        run_probe(p, "R" + std::to_string(r));
    }

    res.gamma2_est = -std::log(res.max_ratio) / double(res.n_b);
    return res;
}

}  // namespace skewmix
