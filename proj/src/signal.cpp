#include "nusrec/signal.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include <fftw3.h>

#include "nusrec/common.hpp"

namespace nusrec {

using detail::require;

namespace {

constexpr double kPi = std::numbers::pi;

double power(const Signal& u) {
    double p = u.coef[0].real() * u.coef[0].real();
    for (std::size_t m = 1; m < u.coef.size(); ++m) p += 2.0 * std::norm(u.coef[m]);
    return p;
}

void check_pair(const Signal& u, const Signal& v) {
    validate(u);
    validate(v);
    require(u.period == v.period, "signal periods differ");
}

} // namespace

std::size_t max_harmonic(double period) {
    require(std::isfinite(period) && period > 2.0, "period must be finite and > 2");
    return static_cast<std::size_t>(std::floor((period - 1e-9) / 2.0));
}

Signal zero_signal(double period) {
    Signal u;
    u.period = period;
    u.coef.assign(max_harmonic(period) + 1, {0.0, 0.0});
    return u;
}

void validate(const Signal& u) {
    require(u.coef.size() == max_harmonic(u.period) + 1,
            "signal must carry exactly max_harmonic(period)+1 coefficients");
    require(u.coef[0].imag() == 0.0, "mean coefficient must be real");
    for (const auto& c : u.coef)
        require(std::isfinite(c.real()) && std::isfinite(c.imag()),
                "signal coefficients must be finite");
}

Signal random_bandlimited(double period, double rms, std::uint64_t seed) {
    require(std::isfinite(rms) && rms >= 0.0, "rms must be finite and >= 0");
    Signal u = zero_signal(period);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    u.coef[0] = {gauss(rng), 0.0};
    for (std::size_t m = 1; m < u.coef.size(); ++m) {
        double re = gauss(rng);
        double im = gauss(rng);
        u.coef[m] = {re, im};
    }
    double p = power(u);
    if (rms == 0.0 || p == 0.0) return zero_signal(period);
    double s = rms / std::sqrt(p);
    for (auto& c : u.coef) c *= s;
    return u;
}

double eval(const Signal& u, double t) {
    validate(u);
    double base = 2.0 * kPi * (t / u.period);
    double acc = u.coef[0].real();
    for (std::size_t m = 1; m < u.coef.size(); ++m) {
        double ang = base * static_cast<double>(m);
        acc += 2.0 * (u.coef[m].real() * std::cos(ang) - u.coef[m].imag() * std::sin(ang));
    }
    return acc;
}

std::vector<double> eval(const Signal& u, const std::vector<double>& ts) {
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(eval(u, t));
    return out;
}

Signal derivative(const Signal& u) {
    validate(u);
    Signal d = zero_signal(u.period);
    for (std::size_t m = 1; m < u.coef.size(); ++m) {
        double w = 2.0 * kPi * static_cast<double>(m) / u.period;
        d.coef[m] = u.coef[m] * std::complex<double>(0.0, w);
    }
    return d;
}

double inner_l2(const Signal& u, const Signal& v) {
    check_pair(u, v);
    double acc = u.coef[0].real() * v.coef[0].real();
    for (std::size_t m = 1; m < u.coef.size(); ++m)
        acc += 2.0 * (u.coef[m].real() * v.coef[m].real() +
                      u.coef[m].imag() * v.coef[m].imag());
    return u.period * acc;
}

double norm_l2(const Signal& u) {
    validate(u);
    return std::sqrt(u.period * power(u));
}

double inner_sobolev(const Signal& u, const Signal& v) {
    check_pair(u, v);
    double acc = 0.0;
    for (std::size_t m = 1; m < u.coef.size(); ++m) {
        double w = 2.0 * kPi * static_cast<double>(m) / u.period;
        acc += 2.0 * w * w *
               (u.coef[m].real() * v.coef[m].real() +
                u.coef[m].imag() * v.coef[m].imag());
    }
    return u.period * acc;
}

double sobolev_seminorm(const Signal& u) {
    validate(u);
    double s = inner_sobolev(u, u);
    return std::sqrt(std::max(s, 0.0));
}

Signal add(const Signal& u, const Signal& v) {
    check_pair(u, v);
    Signal out = u;
    for (std::size_t m = 0; m < out.coef.size(); ++m) out.coef[m] += v.coef[m];
    return out;
}

Signal subtract(const Signal& u, const Signal& v) {
    check_pair(u, v);
    Signal out = u;
    for (std::size_t m = 0; m < out.coef.size(); ++m) out.coef[m] -= v.coef[m];
    return out;
}

Signal scale(const Signal& u, double factor) {
    validate(u);
    Signal out = u;
    for (auto& c : out.coef) c *= factor;
    return out;
}

GridFunction sample_on_grid(const Signal& u, std::size_t n) {
    validate(u);
    require(n >= 1, "grid size must be positive");
    GridFunction g;
    g.period = u.period;
    g.values.resize(n);
    double h = u.period / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
        g.values[j] = eval(u, static_cast<double>(j) * h);
    return g;
}

Signal project_bandlimited(const GridFunction& g) {
    std::size_t n = g.values.size();
    std::size_t m_max = max_harmonic(g.period);
    require(n >= 2 * m_max + 1, "grid too coarse for the bandlimited space");
    for (double v : g.values)
        require(std::isfinite(v), "grid values must be finite");

    std::vector<double> in(g.values);
    std::vector<std::complex<double>> out(n / 2 + 1);

    // FFTW plan creation/destruction is not thread safe; execution of a
    // freshly planned transform is serialized along with it for simplicity
    // (this path is not performance critical).
    static std::mutex fftw_mu;
    {
        std::lock_guard<std::mutex> lock(fftw_mu);
        fftw_plan plan = fftw_plan_dft_r2c_1d(
            static_cast<int>(n), in.data(),
            reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        require(plan != nullptr, "fftw plan creation failed");
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    Signal u = zero_signal(g.period);
    double inv_n = 1.0 / static_cast<double>(n);
    u.coef[0] = {out[0].real() * inv_n, 0.0};
    for (std::size_t m = 1; m <= m_max; ++m) u.coef[m] = out[m] * inv_n;
    return u;
}

Eigen::VectorXd l2_coords(const Signal& u) {
    validate(u);
    std::size_t m_max = u.coef.size() - 1;
    Eigen::VectorXd a(2 * m_max + 1);
    double rt = std::sqrt(u.period);
    double r2t = std::sqrt(2.0 * u.period);
    a(0) = rt * u.coef[0].real();
    for (std::size_t m = 1; m <= m_max; ++m) {
        a(2 * m - 1) = r2t * u.coef[m].real();
        a(2 * m) = -r2t * u.coef[m].imag();
    }
    return a;
}

Signal signal_from_l2_coords(const Eigen::VectorXd& a, double period) {
    std::size_t m_max = max_harmonic(period);
    require(a.size() == static_cast<Eigen::Index>(2 * m_max + 1),
            "coordinate vector has the wrong dimension");
    Signal u = zero_signal(period);
    double rt = std::sqrt(period);
    double r2t = std::sqrt(2.0 * period);
    u.coef[0] = {a(0) / rt, 0.0};
    for (std::size_t m = 1; m <= m_max; ++m)
        u.coef[m] = {a(2 * m - 1) / r2t, -a(2 * m) / r2t};
    return u;
}

Eigen::VectorXd sobolev_coords(const Signal& u) {
    validate(u);
    std::size_t m_max = u.coef.size() - 1;
    Eigen::VectorXd s(2 * m_max);
    double r2t = std::sqrt(2.0 * u.period);
    for (std::size_t m = 1; m <= m_max; ++m) {
        double w = 2.0 * kPi * static_cast<double>(m) / u.period;
        s(2 * (m - 1)) = w * r2t * u.coef[m].real();
        s(2 * (m - 1) + 1) = -w * r2t * u.coef[m].imag();
    }
    return s;
}

Signal signal_from_sobolev_coords(const Eigen::VectorXd& s, double period,
                                  double mean) {
    std::size_t m_max = max_harmonic(period);
    require(s.size() == static_cast<Eigen::Index>(2 * m_max),
            "coordinate vector has the wrong dimension");
    Signal u = zero_signal(period);
    double r2t = std::sqrt(2.0 * period);
    u.coef[0] = {mean, 0.0};
    for (std::size_t m = 1; m <= m_max; ++m) {
        double w = 2.0 * kPi * static_cast<double>(m) / period;
        u.coef[m] = {s(2 * (m - 1)) / (w * r2t), -s(2 * (m - 1) + 1) / (w * r2t)};
    }
    return u;
}

} // namespace nusrec
