#include "nusrec/kernels.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_expint.h>

#include "nusrec/common.hpp"

namespace nusrec {

using detail::require;

namespace {

constexpr double kPi = std::numbers::pi;

// Fourier coefficient (1/T) integral_a^b exp(-leak (b - t)) exp(-i w_m t) dt
// of the (possibly leaky) indicator window; leak = 0 gives the plain
// indicator. Valid for any real interval [a, b], b > a.
std::complex<double> window_coef(double period, double a, double b,
                                 double leak, std::size_t m) {
    double wm = 2.0 * kPi * static_cast<double>(m) / period;
    std::complex<double> w(leak, -wm);
    if (std::abs(w) == 0.0) return {(b - a) / period, 0.0};
    std::complex<double> num =
        std::exp(std::complex<double>(0.0, -wm * b)) -
        std::exp(-leak * (b - a)) * std::exp(std::complex<double>(0.0, -wm * a));
    return num / (w * period);
}

} // namespace

KernelFamily KernelFamily::make(KernelKind kind, double period,
                                std::vector<double> instants, double leak) {
    max_harmonic(period); // validates the period
    require(!instants.empty(), "kernel family needs at least one instant");
    for (std::size_t k = 0; k < instants.size(); ++k) {
        require(std::isfinite(instants[k]), "instants must be finite");
        require(instants[k] >= 0.0 && instants[k] < period,
                "instants must lie in [0, period)");
        if (k > 0)
            require(instants[k] > instants[k - 1],
                    "instants must be strictly increasing");
    }
    require(std::isfinite(leak) && leak >= 0.0, "leak must be finite and >= 0");
    require(leak == 0.0 || kind == KernelKind::LeakyExp,
            "leak applies only to LeakyExp kernels");
    require(kind != KernelKind::Ramp || instants.size() >= 2,
            "first differences need at least two instants");
    KernelFamily fam;
    fam.kind = kind;
    fam.period = period;
    fam.instants = std::move(instants);
    fam.leak = leak;
    return fam;
}

std::pair<double, double> KernelFamily::interval(std::size_t k) const {
    require(k < instants.size(), "kernel index out of range");
    double a = (k == 0) ? instants.back() - period : instants[k - 1];
    return {a, instants[k]};
}

double si(double x) {
    gsl_sf_result res;
    int status = gsl_sf_Si_e(x, &res);
    require(status == GSL_SUCCESS, "sine integral evaluation failed");
    return res.val;
}

double f_kernel(double t) {
    double s = std::sin(kPi * t / 2.0);
    // 1 - cos(pi t) = 2 sin^2(pi t / 2), stable near t = 0
    return t * si(kPi * t) / kPi - 2.0 * s * s / (kPi * kPi);
}

FKernelTable::FKernelTable(double t_max, double step) : t_max_(t_max), step_(step) {
    require(std::isfinite(t_max) && t_max > 0.0, "table range must be positive");
    require(std::isfinite(step) && step > 0.0 && step <= t_max,
            "table step must be in (0, t_max]");
    std::size_t n = static_cast<std::size_t>(std::ceil(t_max / step)) + 1;
    values_.resize(n + 1);
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i] = f_kernel(static_cast<double>(i) * step);
}

double FKernelTable::operator()(double t) const {
    double x = std::abs(t);
    require(x <= t_max_, "argument outside the tabulated range");
    double pos = x / step_;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= values_.size()) i = values_.size() - 2;
    double frac = pos - static_cast<double>(i);
    return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double f_pair_inner(double a1, double b1, double a2, double b2) {
    require(b1 > a1 && b2 > a2, "intervals must have positive length");
    return f_kernel(b1 - a2) - f_kernel(a1 - a2) - f_kernel(b1 - b2) +
           f_kernel(a1 - b2);
}

Signal projected_kernel(const KernelFamily& fam, std::size_t k) {
    require(k < fam.size(), "kernel index out of range");
    Signal g = zero_signal(fam.period);
    std::size_t m_max = g.coef.size() - 1;

    switch (fam.kind) {
    case KernelKind::Indicator:
    case KernelKind::LeakyExp: {
        auto [a, b] = fam.interval(k);
        for (std::size_t m = 0; m <= m_max; ++m)
            g.coef[m] = window_coef(fam.period, a, b, fam.leak, m);
        g.coef[0] = {g.coef[0].real(), 0.0};
        break;
    }
    case KernelKind::Ramp: {
        // Representer of u(t_k) - u(t_{k-1}) in the Sobolev pairing: its
        // derivative is the projected indicator of the interval, so divide
        // the indicator coefficients by i w_m and drop the mean.
        auto [a, b] = fam.interval(k);
        for (std::size_t m = 1; m <= m_max; ++m) {
            double wm = 2.0 * kPi * static_cast<double>(m) / fam.period;
            g.coef[m] = window_coef(fam.period, a, b, 0.0, m) /
                        std::complex<double>(0.0, wm);
        }
        break;
    }
    case KernelKind::Sinc: {
        double tau = fam.instants[k];
        for (std::size_t m = 0; m <= m_max; ++m) {
            double wm = 2.0 * kPi * static_cast<double>(m) / fam.period;
            g.coef[m] = std::exp(std::complex<double>(0.0, -wm * tau)) / fam.period;
        }
        g.coef[0] = {1.0 / fam.period, 0.0};
        break;
    }
    }
    return g;
}

double kernel_weight(const KernelFamily& fam, std::size_t k) {
    require(k < fam.size(), "kernel index out of range");
    switch (fam.kind) {
    case KernelKind::Indicator:
    case KernelKind::Ramp: {
        auto [a, b] = fam.interval(k);
        return b - a;
    }
    case KernelKind::LeakyExp: {
        auto [a, b] = fam.interval(k);
        double dt = b - a;
        if (fam.leak == 0.0) return dt;
        return (1.0 - std::exp(-2.0 * fam.leak * dt)) / (2.0 * fam.leak);
    }
    case KernelKind::Sinc:
        return static_cast<double>(2 * max_harmonic(fam.period) + 1) / fam.period;
    }
    detail::fail("unreachable kernel kind");
}

std::vector<double> kernel_weights(const KernelFamily& fam) {
    std::vector<double> w(fam.size());
    for (std::size_t k = 0; k < fam.size(); ++k) w[k] = kernel_weight(fam, k);
    return w;
}

GramMatrix gram_matrix(const KernelFamily& fam, GramPath path) {
    std::size_t n = fam.size();
    GramMatrix gm;
    gm.w = kernel_weights(fam);
    gm.h.resize(n, n);

    if (path == GramPath::ClosedFormLine) {
        require(fam.kind == KernelKind::Indicator,
                "the closed-form Gram applies to indicator kernels only");
        for (std::size_t k = 0; k < n; ++k) {
            auto [ak, bk] = fam.interval(k);
            for (std::size_t kp = k; kp < n; ++kp) {
                auto [ap, bp] = fam.interval(kp);
                // Fold the pair to its nearest periodic displacement; the
                // remaining error is the line-vs-circle kernel tail, O(1/T).
                double shift = std::round((0.5 * (ak + bk) - 0.5 * (ap + bp)) /
                                          fam.period) *
                               fam.period;
                double inner = f_pair_inner(ak, bk, ap + shift, bp + shift);
                gm.h(k, kp) = inner / gm.w[kp];
                gm.h(kp, k) = inner / gm.w[k];
            }
        }
        return gm;
    }

    std::vector<Signal> proj;
    proj.reserve(n);
    for (std::size_t k = 0; k < n; ++k) proj.push_back(projected_kernel(fam, k));
    bool sob = fam.sobolev();
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t kp = k; kp < n; ++kp) {
            double inner = sob ? inner_sobolev(proj[kp], proj[k])
                               : inner_l2(proj[kp], proj[k]);
            gm.h(k, kp) = inner / gm.w[kp];
            gm.h(kp, k) = inner / gm.w[k];
        }
    }
    return gm;
}

} // namespace nusrec
