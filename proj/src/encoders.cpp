#include "nusrec/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nusrec/common.hpp"

namespace nusrec {

using detail::require;

namespace {

double quad(const Signal& x, double a, double b,
            const std::function<double(double)>& weight = nullptr) {
    if (a == b) return 0.0;
    auto f = [&](double t) {
        double v = eval(x, t);
        return weight ? weight(t) * v : v;
    };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 12, 1e-13);
}

double grid_max_abs(const Signal& x) {
    std::size_t n = 64 * static_cast<std::size_t>(std::ceil(x.period));
    double m = 0.0;
    double h = x.period / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j)
        m = std::max(m, std::abs(eval(x, static_cast<double>(j) * h)));
    return m;
}

} // namespace

SampleSequence integral_samples(const Signal& x, const KernelFamily& fam) {
    validate(x);
    require(x.period == fam.period, "signal and kernel periods differ");
    SampleSequence s;
    s.weights = kernel_weights(fam);
    s.values.resize(fam.size());
    for (std::size_t k = 0; k < fam.size(); ++k) {
        switch (fam.kind) {
        case KernelKind::Indicator: {
            auto [a, b] = fam.interval(k);
            s.values[k] = quad(x, a, b);
            break;
        }
        case KernelKind::LeakyExp: {
            auto [a, b] = fam.interval(k);
            double leak = fam.leak;
            s.values[k] = quad(x, a, b, [leak, b2 = b](double t) {
                return std::exp(-leak * (b2 - t));
            });
            break;
        }
        case KernelKind::Ramp: {
            auto [a, b] = fam.interval(k);
            s.values[k] = eval(x, b) - eval(x, a);
            break;
        }
        case KernelKind::Sinc:
            s.values[k] = eval(x, fam.instants[k]);
            break;
        }
    }
    return s;
}

FireResult fire_instants(const Signal& x, double bias, double threshold) {
    validate(x);
    require(std::isfinite(bias) && std::isfinite(threshold) && threshold > 0.0,
            "threshold must be positive and parameters finite");
    double amp = grid_max_abs(x);
    require(bias > amp, "bias must dominate the signal amplitude");

    // The integrator state F(t) = integral_{t_prev}^t (x + bias) is strictly
    // increasing with slope in [bias - amp, bias + amp], which brackets each
    // firing time; bisect on the quadrature of x.
    std::vector<double> spikes;
    double t_prev = 0.0;
    while (t_prev < x.period) {
        double lo = t_prev + threshold / (bias + amp);
        double hi = t_prev + threshold / (bias - amp);
        auto residual = [&](double t) {
            return quad(x, t_prev, t) + bias * (t - t_prev) - threshold;
        };
        // widen defensively: grid_max_abs may fractionally underestimate
        while (residual(hi) < 0.0) hi += threshold / (bias - amp);
        for (int it = 0; it < 200 && hi - lo > 1e-13 * x.period; ++it) {
            double mid = 0.5 * (lo + hi);
            (residual(mid) < 0.0 ? lo : hi) = mid;
        }
        double spike = 0.5 * (lo + hi);
        if (spike >= x.period) break;
        spikes.push_back(spike);
        t_prev = spike;
    }
    require(!spikes.empty(),
            "threshold too large: no spike inside one period");

    FireResult out;
    out.instants = spikes;
    KernelFamily fam =
        KernelFamily::make(KernelKind::Indicator, x.period, spikes);
    out.samples.weights = kernel_weights(fam);
    out.samples.values.resize(spikes.size());
    auto [wa, wb] = fam.interval(0);
    out.samples.values[0] = quad(x, wa, wb);
    for (std::size_t k = 1; k < spikes.size(); ++k)
        out.samples.values[k] =
            threshold - bias * (spikes[k] - spikes[k - 1]);
    return out;
}

CrossingSet level_crossings(const Signal& x, double spacing, double offset) {
    validate(x);
    require(std::isfinite(spacing) && spacing > 0.0, "level spacing must be positive");
    require(std::isfinite(offset), "level offset must be finite");

    std::size_t n = 64 * static_cast<std::size_t>(std::ceil(x.period));
    double h = x.period / static_cast<double>(n);
    std::vector<double> v(n + 1);
    for (std::size_t j = 0; j <= n; ++j) v[j] = eval(x, static_cast<double>(j) * h);

    CrossingSet out;
    for (std::size_t j = 0; j < n; ++j) {
        double va = v[j], vb = v[j + 1];
        if (va == vb) continue;
        double lolevel = std::min(va, vb), hilevel = std::max(va, vb);
        // levels strictly inside (lolevel, hilevel) are crossed in this cell
        long jlo = static_cast<long>(std::ceil((lolevel - offset) / spacing + 1e-12));
        long jhi = static_cast<long>(std::floor((hilevel - offset) / spacing - 1e-12));
        for (long idx = jlo; idx <= jhi; ++idx) {
            double level = offset + static_cast<double>(idx) * spacing;
            double a = static_cast<double>(j) * h, b = a + h;
            double fa = va - level;
            for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
                double mid = 0.5 * (a + b);
                double fm = eval(x, mid) - level;
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            out.times.push_back(0.5 * (a + b));
            out.values.push_back(level);
        }
    }

    // sort by time; drop duplicates that bisection may produce at cell seams
    std::vector<std::size_t> order(out.times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.times[a] < out.times[b];
    });
    CrossingSet sorted;
    for (std::size_t i : order) {
        if (!sorted.times.empty() && out.times[i] - sorted.times.back() < 1e-9)
            continue;
        sorted.times.push_back(out.times[i]);
        sorted.values.push_back(out.values[i]);
    }
    return sorted;
}

std::vector<double> generate_instants(const UniformGapSpec& spec, double period,
                                      std::uint64_t seed) {
    require(std::isfinite(spec.gap_min) && std::isfinite(spec.gap_max) &&
                spec.gap_min >= 0.0 && spec.gap_max > spec.gap_min,
            "gap bounds must satisfy 0 <= gap_min < gap_max");
    require(spec.gap_max < period, "gaps must be shorter than the period");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(spec.gap_min, spec.gap_max);
    std::vector<double> out;
    double t = 0.0;
    while (true) {
        t += gap(rng);
        if (t >= period) break;
        out.push_back(t);
    }
    require(!out.empty(), "no instant fell inside the period");
    return out;
}

std::vector<double> generate_instants(const ClusterSpec& spec, double period,
                                      std::uint64_t seed) {
    require(spec.per_cluster >= 1, "clusters need at least one instant");
    require(std::isfinite(spec.intra_gap) && spec.intra_gap > 0.0,
            "intra-cluster gap must be positive");
    require(std::isfinite(spec.oversampling) && spec.oversampling > 0.0,
            "oversampling must be positive");
    double target = spec.oversampling * period;
    std::size_t clusters = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(target / static_cast<double>(spec.per_cluster))));
    double lattice = period / static_cast<double>(clusters);
    double span = static_cast<double>(spec.per_cluster - 1) * spec.intra_gap;
    require(span <= 0.9 * lattice,
            "cluster span too large for the requested density");

    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        std::mt19937_64 rng(detail::split_seed(seed, attempt));
        std::uniform_real_distribution<double> jitter(-0.5, 0.5);
        std::vector<double> out;
        out.reserve(clusters * spec.per_cluster);
        for (std::size_t c = 0; c < clusters; ++c) {
            double anchor = static_cast<double>(c) * lattice + jitter(rng);
            for (std::size_t j = 0; j < spec.per_cluster; ++j) {
                double t = anchor + static_cast<double>(j) * spec.intra_gap;
                t = std::fmod(t, period);
                if (t < 0.0) t += period;
                out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        double min_gap = period - out.back() + out.front();
        for (std::size_t i = 1; i < out.size(); ++i)
            min_gap = std::min(min_gap, out[i] - out[i - 1]);
        if (min_gap > 1e-6) return out;
    }
    detail::fail("could not draw clusters with separated instants");
}

SampleSequence add_noise(const SampleSequence& s, double snr_db,
                         double input_power, std::uint64_t seed) {
    require(std::isfinite(snr_db), "snr must be finite");
    require(std::isfinite(input_power) && input_power > 0.0,
            "reference input power must be positive");
    double sigma = std::sqrt(input_power * std::pow(10.0, -snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    SampleSequence out = s;
    for (auto& v : out.values) v += gauss(rng);
    return out;
}

} // namespace nusrec
