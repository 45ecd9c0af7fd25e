#pragma once

#include <cmath>

#include "skewmix/common.hpp"

namespace skewmix {

// Second-order forward-mode jet: value together with first and second
// derivative with respect to a single independent variable.
struct Jet2 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;

    static Jet2 constant(double c) { return {c, 0.0, 0.0}; }
    static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.d1, -a.d2}; }

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.v == 0.0) throw EvalDomainError("division by zero");
    double q = a.v / b.v;
    double q1 = (a.d1 - q * b.d1) / b.v;
    double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
    return {q, q1, q2};
}

// Composition with a scalar function g given g(v), g'(v), g''(v).
inline Jet2 compose(double g, double g1, double g2, const Jet2& a) {
    return {g, g1 * a.d1, g2 * a.d1 * a.d1 + g1 * a.d2};
}

inline Jet2 sin(const Jet2& a) {
    double s = std::sin(a.v), c = std::cos(a.v);
    return compose(s, c, -s, a);
}

inline Jet2 cos(const Jet2& a) {
    double s = std::sin(a.v), c = std::cos(a.v);
    return compose(c, -s, -c, a);
}

inline Jet2 exp(const Jet2& a) {
    double e = std::exp(a.v);
    return compose(e, e, e, a);
}

inline Jet2 log(const Jet2& a) {
    if (!(a.v > 0.0)) throw EvalDomainError("log of non-positive value");
    return compose(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v), a);
}

// a^k for integer k, valid for any base.
inline Jet2 powi(const Jet2& a, long k) {
    if (k == 0) return Jet2::constant(1.0);
    if (k < 0) return Jet2::constant(1.0) / powi(a, -k);
    Jet2 r = a;
    for (long i = 1; i < k; ++i) r = r * a;
    return r;
}

// General power via exp(b log a); requires a > 0 unless b is an integer jet
// with zero derivatives (handled by the caller through powi).
inline Jet2 pow(const Jet2& a, const Jet2& b) {
    if (b.d1 == 0.0 && b.d2 == 0.0) {
        double bi = std::round(b.v);
        if (bi == b.v && std::fabs(bi) <= 64.0) return powi(a, long(bi));
    }
    return exp(b * log(a));
}

}  // namespace skewmix
