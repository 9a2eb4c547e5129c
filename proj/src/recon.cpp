#include "nusrec/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nusrec/common.hpp"

namespace nusrec {

using detail::require;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void push_record(IterationHistory& hist, std::size_t iter, const Signal& u,
                 double step_norm, const Signal* truth) {
    IterationRecord row;
    row.iter = iter;
    row.step_norm = step_norm;
    if (truth) {
        Signal diff = subtract(u, *truth);
        double dl = norm_l2(*truth);
        double ds = sobolev_seminorm(*truth);
        row.err_l2_rel = dl > 0.0 ? norm_l2(diff) / dl : norm_l2(diff);
        row.err_sobolev_rel = ds > 0.0 ? sobolev_seminorm(diff) / ds : kNan;
    } else {
        row.err_l2_rel = kNan;
        row.err_sobolev_rel = kNan;
    }
    hist.rows.push_back(row);
}

void check_points(const std::vector<double>& times,
                  const std::vector<double>& values, double period) {
    require(times.size() == values.size(), "times and values must pair up");
    require(!times.empty(), "at least one sample point is required");
    for (std::size_t k = 0; k < times.size(); ++k) {
        require(std::isfinite(times[k]) && std::isfinite(values[k]),
                "sample points must be finite");
        require(times[k] >= 0.0 && times[k] < period,
                "sample times must lie in [0, period)");
        if (k > 0)
            require(times[k] > times[k - 1], "sample times must be increasing");
    }
}

} // namespace

RelaxationSchedule RelaxationSchedule::constant(double lambda) {
    return sequence({lambda});
}

RelaxationSchedule RelaxationSchedule::sequence(std::vector<double> lambdas) {
    require(!lambdas.empty(), "relaxation schedule must not be empty");
    for (double l : lambdas)
        require(std::isfinite(l), "relaxation parameters must be finite");
    RelaxationSchedule s;
    s.lambdas_ = std::move(lambdas);
    return s;
}

double RelaxationSchedule::operator()(std::size_t iter) const {
    return iter < lambdas_.size() ? lambdas_[iter] : lambdas_.back();
}

void IterationHistory::write_csv(std::ostream& os) const {
    os << "iter,err_l2_rel,err_sobolev_rel,step_norm\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.iter,
                      r.err_l2_rel, r.err_sobolev_rel, r.step_norm);
        os << buf;
    }
}

Signal pocs_step(const SamplingOperator& op, const SampleSequence& s,
                 const Signal& u, double lambda) {
    SampleSequence residual = op.apply(u);
    for (std::size_t k = 0; k < residual.values.size(); ++k)
        residual.values[k] = s.values[k] - residual.values[k];
    return add(u, scale(op.apply_adjoint(residual), lambda));
}

ReconResult pocs_run(const SamplingOperator& op, const SampleSequence& s,
                     const Signal& u0, const RelaxationSchedule& schedule,
                     const StopRule& stop, const Signal* truth) {
    ReconResult out;
    Signal u = u0;
    push_record(out.history, 0, u, 0.0, truth);
    for (std::size_t n = 0; n < stop.max_iters; ++n) {
        Signal next = pocs_step(op, s, u, schedule(n));
        double step = norm_l2(subtract(next, u));
        u = std::move(next);
        push_record(out.history, n + 1, u, step, truth);
        out.iterations = n + 1;
        if (stop.step_tol > 0.0 &&
            step <= stop.step_tol * std::max(1.0, norm_l2(u))) {
            out.converged = true;
            break;
        }
    }
    out.estimate = std::move(u);
    return out;
}

ReconResult pocs_discrete_run(const SamplingOperator& op, const SampleSequence& s,
                              const Signal& u0, const RelaxationSchedule& schedule,
                              std::size_t n_iters, const Signal* truth) {
    SampleSequence su0 = op.apply(u0);
    Eigen::VectorXd s0(op.sample_count());
    for (std::size_t k = 0; k < op.sample_count(); ++k)
        s0(k) = s.values[k] - su0.values[k];
    require(s.values.size() == op.sample_count() && s.weights == op.weights(),
            "sample sequence does not match the operator");

    GramMatrix gm = op.gram();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(op.sample_count());

    auto synthesize = [&](const Eigen::VectorXd& coefs) {
        SampleSequence cc;
        cc.values.assign(coefs.data(), coefs.data() + coefs.size());
        cc.weights = op.weights();
        return add(u0, op.apply_adjoint(cc));
    };

    ReconResult out;
    Signal u = u0;
    push_record(out.history, 0, u, 0.0, truth);
    for (std::size_t n = 0; n < n_iters; ++n) {
        c += schedule(n) * (s0 - gm.h * c);
        Signal next = synthesize(c);
        double step = norm_l2(subtract(next, u));
        u = std::move(next);
        push_record(out.history, n + 1, u, step, truth);
        out.iterations = n + 1;
    }
    out.estimate = std::move(u);
    return out;
}

ReconResult frame_algorithm_run(const SamplingOperator& op, const SampleSequence& s,
                                const Signal& u0, std::optional<double> lambda,
                                std::size_t n_iters, const Signal* truth) {
    require(op.family().kind == KernelKind::Sinc,
            "the frame algorithm is defined for point-sampling families");
    auto sb = op.spectral_bounds();
    double l = lambda ? *lambda : 2.0 / (sb.lower + sb.upper);
    StopRule stop;
    stop.max_iters = n_iters;
    ReconResult out = pocs_run(op, s, u0, RelaxationSchedule::constant(l), stop, truth);
    out.relaxation_in_range = l > 0.0 && l * sb.upper < 2.0;
    return out;
}

namespace {

struct PointRows {
    Eigen::MatrixXd rows; // l2 coordinates of the point kernels
    std::vector<double> w;
};

PointRows point_rows(const KernelFamily& fam) {
    require(fam.kind == KernelKind::Sinc,
            "row projections leave the bandlimited space unless the kernels "
            "are point kernels");
    PointRows pr;
    pr.w = kernel_weights(fam);
    pr.rows.resize(fam.size(), 2 * max_harmonic(fam.period) + 1);
    for (std::size_t k = 0; k < fam.size(); ++k)
        pr.rows.row(k) = l2_coords(projected_kernel(fam, k)).transpose();
    return pr;
}

void sweep_inplace(const PointRows& pr, const std::vector<double>& samples,
                   Eigen::VectorXd& a, const std::vector<std::size_t>& order) {
    for (std::size_t k : order) {
        double r = samples[k] - pr.rows.row(k).dot(a);
        a += (r / pr.w[k]) * pr.rows.row(k).transpose();
    }
}

std::vector<std::size_t> sweep_order(std::size_t n, SweepOrder order,
                                     std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < n; ++k) idx[k] = k;
    if (order == SweepOrder::RandomPermutation) {
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
    }
    return idx;
}

} // namespace

Signal kaczmarz_sweep(const KernelFamily& fam, const std::vector<double>& samples,
                      const Signal& u, SweepOrder order, std::uint64_t seed) {
    require(samples.size() == fam.size(),
            "sample count does not match the kernel count");
    PointRows pr = point_rows(fam);
    Eigen::VectorXd a = l2_coords(u);
    sweep_inplace(pr, samples, a, sweep_order(fam.size(), order, seed));
    return signal_from_l2_coords(a, fam.period);
}

ReconResult kaczmarz_run(const KernelFamily& fam, const std::vector<double>& samples,
                         const Signal& u0, SweepOrder order, std::size_t n_sweeps,
                         std::uint64_t seed, const Signal* truth) {
    require(samples.size() == fam.size(),
            "sample count does not match the kernel count");
    PointRows pr = point_rows(fam);
    Eigen::VectorXd a = l2_coords(u0);

    ReconResult out;
    push_record(out.history, 0, u0, 0.0, truth);
    for (std::size_t n = 0; n < n_sweeps; ++n) {
        Eigen::VectorXd prev = a;
        sweep_inplace(pr, samples, a,
                      sweep_order(fam.size(), order, detail::split_seed(seed, n)));
        Signal u = signal_from_l2_coords(a, fam.period);
        push_record(out.history, n + 1, u, (a - prev).norm(), truth);
        out.iterations = n + 1;
    }
    out.estimate = signal_from_l2_coords(a, fam.period);
    return out;
}

GridFunction linear_interpolant(const std::vector<double>& times,
                                const std::vector<double>& values, double period,
                                std::size_t grid_n) {
    check_points(times, values, period);
    require(grid_n >= 1, "grid size must be positive");
    std::size_t n = times.size();
    GridFunction g;
    g.period = period;
    g.values.resize(grid_n);
    double h = period / static_cast<double>(grid_n);
    for (std::size_t j = 0; j < grid_n; ++j) {
        double t = static_cast<double>(j) * h;
        // segment [t_k, t_{k+1}) containing t, with wrap on both sides
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - times.begin());
        double t0, v0, t1, v1;
        if (hi == 0) { // before the first node: wrap the last one back
            t0 = times[n - 1] - period;
            v0 = values[n - 1];
            t1 = times[0];
            v1 = values[0];
        } else if (hi == n) { // after the last node: wrap the first forward
            t0 = times[n - 1];
            v0 = values[n - 1];
            t1 = times[0] + period;
            v1 = values[0];
        } else {
            t0 = times[hi - 1];
            v0 = values[hi - 1];
            t1 = times[hi];
            v1 = values[hi];
        }
        double frac = n == 1 ? 0.0 : (t - t0) / (t1 - t0);
        g.values[j] = v0 + frac * (v1 - v0);
    }
    return g;
}

Signal pl_project(const std::vector<double>& times,
                  const std::vector<double>& values, double period) {
    check_points(times, values, period);
    std::size_t n = times.size();
    Signal out = zero_signal(period);

    if (n == 1) {
        out.coef[0] = {values[0], 0.0};
        return out;
    }

    // slopes on [t_k, t_{k+1}) with wrap, then slope changes at the nodes
    std::vector<double> slope(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t kn = (k + 1) % n;
        double dt = (kn == 0 ? times[0] + period : times[kn]) - times[k];
        slope[k] = (values[kn] - values[k]) / dt;
        mean += 0.5 * (values[k] + values[kn]) * dt;
    }
    out.coef[0] = {mean / period, 0.0};

    std::size_t m_max = out.coef.size() - 1;
    for (std::size_t m = 1; m <= m_max; ++m) {
        double wm = 2.0 * kPi * static_cast<double>(m) / period;
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double sigma = slope[k] - slope[(k + n - 1) % n];
            acc += sigma * std::exp(std::complex<double>(0.0, -wm * times[k]));
        }
        out.coef[m] = -acc * (period / (4.0 * kPi * kPi * static_cast<double>(m * m)));
    }
    return out;
}

namespace {

// Phase matrix E(m, k) = exp(-i 2 pi m t_k / T) shared by evaluation and
// projection inside the adaptive-weights iteration.
struct PhaseCache {
    Eigen::MatrixXcd e; // (M+1) x N
    double period;

    explicit PhaseCache(const std::vector<double>& times, double period_)
        : period(period_) {
        std::size_t m_max = max_harmonic(period);
        e.resize(m_max + 1, times.size());
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t m = 0; m <= m_max; ++m) {
                double ang = -2.0 * kPi * static_cast<double>(m) * times[k] / period;
                e(m, k) = std::polar(1.0, ang);
            }
    }

    // u(t_k) for all nodes
    Eigen::VectorXd evaluate(const Signal& u) const {
        Eigen::Map<const Eigen::VectorXcd> c(u.coef.data(), u.coef.size());
        Eigen::VectorXcd z = e.adjoint() * c;
        return 2.0 * z.real().array() - u.coef[0].real();
    }

    // pl_project of (times, residual) without re-deriving the phases
    Signal project(const std::vector<double>& times,
                   const Eigen::VectorXd& residual) const {
        std::size_t n = times.size();
        Signal out = zero_signal(period);
        std::vector<double> slope(n);
        double mean = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t kn = (k + 1) % n;
            double dt = (kn == 0 ? times[0] + period : times[kn]) - times[k];
            slope[k] = (residual(kn) - residual(k)) / dt;
            mean += 0.5 * (residual(k) + residual(kn)) * dt;
        }
        out.coef[0] = {mean / period, 0.0};
        Eigen::VectorXd sigma(n);
        for (std::size_t k = 0; k < n; ++k)
            sigma(k) = slope[k] - slope[(k + n - 1) % n];
        Eigen::VectorXcd acc = e * sigma.cast<std::complex<double>>();
        std::size_t m_max = out.coef.size() - 1;
        for (std::size_t m = 1; m <= m_max; ++m)
            out.coef[m] = -acc(m) * (period /
                          (4.0 * kPi * kPi * static_cast<double>(m * m)));
        return out;
    }
};

} // namespace

ReconResult grochenig_run(const std::vector<double>& times,
                          const std::vector<double>& values, double period,
                          const Signal& u0, const RelaxationSchedule& schedule,
                          std::size_t n_iters, const Signal* truth) {
    check_points(times, values, period);
    require(times.size() >= 2, "the adaptive-weights iteration needs >= 2 nodes");
    validate(u0);
    require(u0.period == period, "initializer period mismatch");
    PhaseCache cache(times, period);
    Eigen::Map<const Eigen::VectorXd> v(values.data(), values.size());

    ReconResult out;
    Signal u = u0;
    push_record(out.history, 0, u, 0.0, truth);
    for (std::size_t n = 0; n < n_iters; ++n) {
        Eigen::VectorXd residual = v - cache.evaluate(u);
        Signal corr = scale(cache.project(times, residual), schedule(n));
        u = add(u, corr);
        push_record(out.history, n + 1, u, norm_l2(corr), truth);
        out.iterations = n + 1;
    }
    out.estimate = std::move(u);
    return out;
}

Signal staircase_initializer(const std::vector<double>& times,
                             const std::vector<double>& values, double period) {
    check_points(times, values, period);
    std::size_t n = times.size();
    Signal out = zero_signal(period);
    std::size_t m_max = out.coef.size() - 1;
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double t0 = times[k];
        double t1 = k + 1 < n ? times[k + 1] : times[0] + period;
        mean += values[k] * (t1 - t0);
        for (std::size_t m = 1; m <= m_max; ++m) {
            double wm = 2.0 * kPi * static_cast<double>(m) / period;
            std::complex<double> window =
                (std::exp(std::complex<double>(0.0, -wm * t0)) -
                 std::exp(std::complex<double>(0.0, -wm * t1))) /
                std::complex<double>(0.0, wm * period);
            out.coef[m] += values[k] * window;
        }
    }
    out.coef[0] = {mean / period, 0.0};
    return out;
}

} // namespace nusrec
