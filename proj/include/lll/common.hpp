#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lll {

// Error taxonomy. CLI maps parameter/validation errors to exit code 2,
// computational failures (capacity, nonconvergence, infeasibility) to 1.
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct nonconvergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct incomplete_assignment_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Always-on invariant check; these guard contracts that must hold on every
// run, not just in debug builds.
#define LLL_CHECK(cond, msg)                                                   \
    do {                                                                       \
        if (!(cond)) throw ::lll::internal_error(std::string("invariant: ") + (msg)); \
    } while (0)

inline double log2d(double x) { return std::log2(x); }

// Iterated log2: number of times log2 can be applied before the value drops
// to <= 1.
inline int log2_star(double n) {
    int k = 0;
    double x = n;
    while (x > 1.0) {
        x = std::log2(x);
        ++k;
        if (k > 64) break;
    }
    return k;
}

// Smallest integer s with s^lambda >= n, i.e. ceil(n^(1/lambda)).
inline std::uint64_t ceil_nth_root(std::uint64_t n, int lambda) {
    if (lambda < 1) throw parameter_error("ceil_nth_root: lambda must be >= 1");
    if (n <= 1) return n;
    auto pow_ge = [&](std::uint64_t s) {
        std::uint64_t acc = 1;
        for (int i = 0; i < lambda; ++i) {
            if (s != 0 && acc > n / s + 1) return true;
            acc *= s;
            if (acc >= n) return true;
        }
        return acc >= n;
    };
    auto s = static_cast<std::uint64_t>(std::floor(std::pow(double(n), 1.0 / lambda)));
    if (s < 1) s = 1;
    while (pow_ge(s - 1) && s > 1) --s;
    while (!pow_ge(s)) ++s;
    return s;
}

// Radius bound for ball carving: ceil(n^(1/lambda) * log2 n), floored at 1 so
// the B_{-1} convention (r* >= 1) stays consistent for degenerate n.
inline std::uint64_t carve_radius_cap(std::uint64_t n, int lambda) {
    if (n <= 1) return 1;
    double v = std::pow(double(n), 1.0 / lambda) * std::log2(double(n));
    auto cap = static_cast<std::uint64_t>(std::ceil(v - 1e-12));
    return cap < 1 ? 1 : cap;
}

}  // namespace lll
