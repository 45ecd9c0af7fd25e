#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "skewmix/common.hpp"

namespace skewmix {

using Complex = std::complex<double>;

// Complex values on a uniform N-cell grid, interpreted as piecewise constant
// on the cells [i/N, (i+1)/N).  Stored values are the cell-midpoint samples.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::size_t n, Complex fill = 0.0) : values_(n, fill) {
        if (n == 0 || (n & (n - 1)) != 0) throw Error("grid size must be a power of two");
    }

    static GridFunction sample(std::size_t n, const std::function<Complex(double)>& fn) {
        GridFunction g(n);
        for (std::size_t i = 0; i < n; ++i) g.values_[i] = fn(g.midpoint(i));
        return g;
    }

    static GridFunction sample_real(std::size_t n, const std::function<double(double)>& fn) {
        GridFunction g(n);
        for (std::size_t i = 0; i < n; ++i) g.values_[i] = fn(g.midpoint(i));
        return g;
    }

    std::size_t size() const { return values_.size(); }
    double midpoint(std::size_t i) const { return (double(i) + 0.5) / double(size()); }

    Complex& operator[](std::size_t i) { return values_[i]; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }

    std::size_t cell_of(double x) const {
        double y = wrap01(x);
        auto i = std::size_t(y * double(size()));
        return (i >= size()) ? size() - 1 : i;
    }

    // piecewise-constant lookup
    Complex at(double x) const { return values_[cell_of(x)]; }
    double real_at(double x) const { return values_[cell_of(x)].real(); }

    double l1() const {
        KahanSum s;
        for (const Complex& v : values_) s.add(std::abs(v));
        return s.value() / double(size());
    }

    double variation() const {
        KahanSum s;
        std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) s.add(std::abs(values_[(i + 1) % n] - values_[i]));
        return s.value();
    }

    double bv() const { return variation() + l1(); }

    // (b)-norm: (1+|b|)^{-1} BV + L1
    double bnorm(double b) const { return bv() / (1.0 + std::fabs(b)) + l1(); }

    Complex integral() const {
        KahanSum re, im;
        for (const Complex& v : values_) {
            re.add(v.real());
            im.add(v.imag());
        }
        double n = double(size());
        return {re.value() / n, im.value() / n};
    }

    GridFunction& operator*=(Complex c) {
        for (Complex& v : values_) v *= c;
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        if (o.size() != size()) throw Error("grid size mismatch");
        for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }

private:
    std::vector<Complex> values_;
};

inline double l1_distance(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw Error("grid size mismatch");
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(std::abs(a[i] - b[i]));
    return s.value() / double(a.size());
}

}  // namespace skewmix
