#pragma once

// Shared helpers for the test binaries. Oracles here deliberately avoid the
// library's operator/coefficient algebra: integrals go through adaptive
// Gauss-Kronrod quadrature on pointwise eval, so that closed-form paths in
// the library are checked against an independent computation.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nusrec/signal.hpp"

namespace testsup {

inline constexpr double kPi = 3.14159265358979323846;

// Adaptive quadrature of f over [a, b], absolute tolerance ~1e-13 relative.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 12, 1e-13);
}

// Gaps drawn U(lo, hi) and rescaled so exactly `count` instants spread over
// one period; keeps the minimum gap bounded away from zero, which the
// quadrature/iteration tests rely on.
inline std::vector<double> quasi_uniform_instants(double period, std::size_t count,
                                                  std::uint64_t seed,
                                                  double lo = 0.6, double hi = 1.4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> gaps(count);
    double sum = 0.0;
    for (auto& g : gaps) {
        g = unif(rng);
        sum += g;
    }
    std::vector<double> out(count);
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        acc += gaps[k] * (period / sum);
        out[k] = std::min(acc, period * (1.0 - 1e-12));
    }
    out.back() = std::min(out.back(), period - 1e-9);
    return out;
}

// One-sample Kolmogorov-Smirnov statistic against U(lo, hi).
inline double ks_uniform(std::vector<double> xs, double lo, double hi) {
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double cdf = (xs[i] - lo) / (hi - lo);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
    }
    return d;
}

inline double rel_err(const nusrec::Signal& got, const nusrec::Signal& want) {
    double denom = nusrec::norm_l2(want);
    double num = nusrec::norm_l2(nusrec::subtract(got, want));
    return denom > 0.0 ? num / denom : num;
}

} // namespace testsup
