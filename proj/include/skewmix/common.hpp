#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace skewmix {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---- error types ----------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

struct EvalDomainError : Error {
    using Error::Error;
};

struct NotExpanding : Error {
    using Error::Error;
};
struct NotCovering : Error {
    using Error::Error;
};
struct NonMonotoneBranch : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct GridTooCoarse : Error {
    using Error::Error;
};
struct DegenerateImage : Error {
    using Error::Error;
};
struct NonPositiveDensity : Error {
    using Error::Error;
};
struct DomainMismatch : Error {
    using Error::Error;
};
struct PanelCapExceeded : Error {
    using Error::Error;
};
struct InsufficientData : Error {
    using Error::Error;
};
struct ConventionMismatch : Error {
    using Error::Error;
};

// ---- circle arithmetic -----------------------------------------------------

// Reduce to [0,1).
inline double wrap01(double x) {
    double y = x - std::floor(x);
    return (y >= 1.0) ? 0.0 : y;
}

// Circle distance min(|a-b|, 1-|a-b|).
inline double circle_dist(double a, double b) {
    double d = std::fabs(wrap01(a) - wrap01(b));
    return std::min(d, 1.0 - d);
}

// ---- compensated summation -------------------------------------------------

class KahanSum {
public:
    void add(double v) {
        double y = v - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// ---- deterministic RNG -----------------------------------------------------

// splitmix64; gives identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace skewmix
