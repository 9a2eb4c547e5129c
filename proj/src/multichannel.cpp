#include "nusrec/multichannel.hpp"

#include <cmath>
#include <utility>

#include "nusrec/common.hpp"
#include "nusrec/encoders.hpp"
#include "nusrec/operators.hpp"

namespace nusrec {

namespace {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    double cutoff = sv.size() > 0 ? 1e-12 * sv(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Rows of the flat coefficient matrix are the projected channel kernels in
// orthonormal coordinates, channel-major; parallel arrays carry the flat
// weights and the (channel, j) bookkeeping.
struct FlatKernels {
    Eigen::MatrixXd b;
    Eigen::VectorXd w;
    std::vector<std::pair<std::size_t, std::size_t>> index;
    std::vector<KernelFamily> families; // empty family for empty channels
};

FlatKernels flatten(const MultiChannelSamples& samples) {
    detail::require(samples.period > 2.0, "multichannel: period must exceed 2");
    FlatKernels out;
    std::size_t n = samples.total();
    std::size_t dim = 2 * max_harmonic(samples.period) + 1;
    out.b.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    out.w.resize(static_cast<Eigen::Index>(n));
    out.index.reserve(n);
    out.families.resize(samples.channels.size());
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < samples.channels.size(); ++i) {
        const ChannelSamples& ch = samples.channels[i];
        detail::require(ch.values.size() == ch.instants.size() &&
                            ch.weights.size() == ch.instants.size(),
                        "multichannel: channel arrays must have equal length");
        if (ch.instants.empty()) continue;
        out.families[i] = KernelFamily::make(KernelKind::Indicator,
                                             samples.period, ch.instants);
        for (std::size_t j = 0; j < ch.instants.size(); ++j) {
            out.b.row(row) = l2_coords(projected_kernel(out.families[i], j));
            out.w(row) = ch.weights[j];
            out.index.emplace_back(i, j);
            ++row;
        }
    }
    return out;
}

double stacked_norm(const std::vector<Signal>& u) {
    double acc = 0.0;
    for (const Signal& s : u) {
        double n = norm_l2(s);
        acc += n * n;
    }
    return std::sqrt(acc);
}

double stacked_sobolev(const std::vector<Signal>& u) {
    double acc = 0.0;
    for (const Signal& s : u) {
        double n = sobolev_seminorm(s);
        acc += n * n;
    }
    return std::sqrt(acc);
}

std::vector<Signal> stacked_diff(const std::vector<Signal>& a,
                                 const std::vector<Signal>& b) {
    std::vector<Signal> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out.push_back(subtract(a[i], b[i]));
    return out;
}

} // namespace

ChannelMatrix::ChannelMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {
    detail::require(a_.rows() > 0 && a_.cols() > 0,
                    "ChannelMatrix: matrix must be nonempty");
    pinv_ = pseudo_inverse(a_);
    range_proj_ = a_ * pinv_;
}

std::size_t MultiChannelSamples::total() const {
    std::size_t n = 0;
    for (const ChannelSamples& ch : channels) n += ch.instants.size();
    return n;
}

ChannelEncoder ChannelEncoder::integral(std::vector<double> instants) {
    ChannelEncoder e;
    e.kind = Kind::Integral;
    e.instants = std::move(instants);
    return e;
}

ChannelEncoder ChannelEncoder::fire(double bias, double threshold) {
    ChannelEncoder e;
    e.kind = Kind::Fire;
    e.bias = bias;
    e.threshold = threshold;
    return e;
}

std::vector<Signal> mix_signals(const Eigen::MatrixXd& m,
                                const std::vector<Signal>& in) {
    detail::require(!in.empty(), "mix_signals: empty input");
    detail::require(m.cols() == static_cast<Eigen::Index>(in.size()),
                    "mix_signals: column count must match input count");
    for (const Signal& s : in) {
        validate(s);
        detail::require(s.period == in.front().period,
                        "mix_signals: inputs must share a period");
    }
    std::vector<Signal> out(static_cast<std::size_t>(m.rows()),
                            zero_signal(in.front().period));
    for (Eigen::Index p = 0; p < m.rows(); ++p)
        for (Eigen::Index q = 0; q < m.cols(); ++q) {
            double a = m(p, q);
            if (a == 0.0) continue;
            const auto& src = in[static_cast<std::size_t>(q)].coef;
            auto& dst = out[static_cast<std::size_t>(p)].coef;
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += a * src[k];
        }
    return out;
}

MultiChannelSamples expand_and_encode(const std::vector<Signal>& y,
                                      const ChannelMatrix& A,
                                      const std::vector<ChannelEncoder>& encoders) {
    detail::require(y.size() == A.sources(),
                    "expand_and_encode: source count must match matrix columns");
    detail::require(encoders.size() == A.channels(),
                    "expand_and_encode: one encoder per channel required");
    std::vector<Signal> x = mix_signals(A.a(), y);
    MultiChannelSamples out;
    out.period = y.front().period;
    out.channels.resize(A.channels());
    for (std::size_t i = 0; i < encoders.size(); ++i) {
        const ChannelEncoder& enc = encoders[i];
        ChannelSamples& ch = out.channels[i];
        if (enc.kind == ChannelEncoder::Kind::Integral) {
            if (enc.instants.empty()) continue;
            KernelFamily fam = KernelFamily::make(KernelKind::Indicator,
                                                  out.period, enc.instants);
            SampleSequence s = integral_samples(x[i], fam);
            ch.instants = enc.instants;
            ch.values = std::move(s.values);
            ch.weights = std::move(s.weights);
        } else {
            FireResult fr = fire_instants(x[i], enc.bias, enc.threshold);
            ch.instants = std::move(fr.instants);
            ch.values = std::move(fr.samples.values);
            ch.weights = std::move(fr.samples.weights);
        }
    }
    return out;
}

std::vector<Signal> project_A(const std::vector<GridFunction>& u,
                              const ChannelMatrix& A) {
    detail::require(u.size() == A.channels(),
                    "project_A: one grid function per channel required");
    std::vector<Signal> band;
    band.reserve(u.size());
    for (const GridFunction& g : u) band.push_back(project_bandlimited(g));
    return mix_signals(A.range_proj(), band);
}

GramMatrix multichannel_gram(const MultiChannelSamples& samples,
                             const ChannelMatrix& A, GramPath path) {
    detail::require(samples.channels.size() == A.channels(),
                    "multichannel_gram: channel count must match matrix rows");
    FlatKernels flat = flatten(samples);
    std::size_t n = flat.index.size();
    GramMatrix out;
    out.w.assign(flat.w.data(), flat.w.data() + flat.w.size());
    out.h.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Eigen::MatrixXd& mask = A.range_proj();

    Eigen::MatrixXd scalar;
    if (path == GramPath::ExactPeriodic) {
        scalar = flat.b * flat.b.transpose();
    } else {
        scalar.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        double period = samples.period;
        for (std::size_t z = 0; z < n; ++z) {
            auto [i, j] = flat.index[z];
            auto [ak, bk] = flat.families[i].interval(j);
            for (std::size_t zp = 0; zp < n; ++zp) {
                auto [ip, jp] = flat.index[zp];
                auto [ap, bp] = flat.families[ip].interval(jp);
                double shift = std::round((0.5 * (ak + bk) - 0.5 * (ap + bp)) /
                                          period) *
                               period;
                scalar(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(zp)) =
                    f_pair_inner(ak, bk, ap + shift, bp + shift);
            }
        }
    }
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t zp = 0; zp < n; ++zp) {
            auto [i, j] = flat.index[z];
            auto [ip, jp] = flat.index[zp];
            (void)j;
            (void)jp;
            out.h(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(zp)) =
                mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip)) *
                scalar(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(zp)) /
                flat.w(static_cast<Eigen::Index>(zp));
        }
    return out;
}

MultiChannelResult reconstruct_multichannel(const MultiChannelSamples& samples,
                                            const ChannelMatrix& A,
                                            const std::vector<Signal>& u0,
                                            const RelaxationSchedule& schedule,
                                            std::size_t n_iters,
                                            const std::vector<Signal>* truth_sources) {
    std::size_t m_channels = A.channels();
    detail::require(samples.channels.size() == m_channels,
                    "reconstruct_multichannel: channel count mismatch");
    detail::require(samples.total() > 0,
                    "reconstruct_multichannel: no samples");
    std::vector<Signal> start = u0;
    if (start.empty())
        start.assign(m_channels, zero_signal(samples.period));
    detail::require(start.size() == m_channels,
                    "reconstruct_multichannel: u0 must have one signal per channel");
    for (const Signal& s : start)
        detail::require(s.period == samples.period,
                        "reconstruct_multichannel: u0 period mismatch");
    if (truth_sources != nullptr)
        detail::require(truth_sources->size() == A.sources(),
                        "reconstruct_multichannel: truth must have one signal per source");

    FlatKernels flat = flatten(samples);
    std::size_t n = flat.index.size();
    GramMatrix gram = multichannel_gram(samples, A);

    Eigen::VectorXd s(static_cast<Eigen::Index>(n));
    {
        Eigen::Index row = 0;
        for (const ChannelSamples& ch : samples.channels)
            for (double v : ch.values) s(row++) = v;
    }
    // s0 = s - S u0; <u, g> = <u, g~> for bandlimited u, so the flat rows
    // apply u0 exactly.
    Eigen::VectorXd s0 = s;
    std::vector<Eigen::VectorXd> start_coords(m_channels);
    for (std::size_t i = 0; i < m_channels; ++i)
        start_coords[i] = l2_coords(start[i]);
    for (std::size_t z = 0; z < n; ++z)
        s0(static_cast<Eigen::Index>(z)) -=
            flat.b.row(static_cast<Eigen::Index>(z))
                .dot(start_coords[flat.index[z].first]);

    // channel synthesis for a coefficient vector c: per channel the
    // zero-order-hold combination sum_j (c_ij / w_ij) g~^i_j, then the
    // cross-channel mix by A A^+ and the u0 offset
    auto synthesize = [&](const Eigen::VectorXd& c) {
        std::vector<Signal> pre(m_channels, zero_signal(samples.period));
        Eigen::VectorXd scaled = c.cwiseQuotient(flat.w);
        for (std::size_t i = 0; i < m_channels; ++i) {
            Eigen::VectorXd coords =
                Eigen::VectorXd::Zero(flat.b.cols());
            for (std::size_t z = 0; z < n; ++z)
                if (flat.index[z].first == i)
                    coords += scaled(static_cast<Eigen::Index>(z)) *
                              flat.b.row(static_cast<Eigen::Index>(z)).transpose();
            pre[i] = signal_from_l2_coords(coords, samples.period);
        }
        std::vector<Signal> mixed = mix_signals(A.range_proj(), pre);
        for (std::size_t i = 0; i < m_channels; ++i)
            mixed[i] = add(start[i], mixed[i]);
        return mixed;
    };

    MultiChannelResult res;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<Signal> x_hat = start;
    auto record = [&](std::size_t iter, double step) {
        IterationRecord rec;
        rec.iter = iter;
        rec.step_norm = step;
        if (truth_sources != nullptr) {
            std::vector<Signal> y_hat = mix_signals(A.pinv(), x_hat);
            std::vector<Signal> diff = stacked_diff(y_hat, *truth_sources);
            double denom_l2 = stacked_norm(*truth_sources);
            double denom_so = stacked_sobolev(*truth_sources);
            rec.err_l2_rel = denom_l2 > 0.0 ? stacked_norm(diff) / denom_l2
                                            : stacked_norm(diff);
            rec.err_sobolev_rel = denom_so > 0.0
                                      ? stacked_sobolev(diff) / denom_so
                                      : stacked_sobolev(diff);
        } else {
            rec.err_l2_rel = std::nan("");
            rec.err_sobolev_rel = std::nan("");
        }
        res.history.rows.push_back(rec);
    };
    record(0, 0.0);
    for (std::size_t iter = 1; iter <= n_iters; ++iter) {
        c += schedule(iter - 1) * (s0 - gram.h * c);
        std::vector<Signal> next = synthesize(c);
        double step = stacked_norm(stacked_diff(next, x_hat));
        x_hat = std::move(next);
        record(iter, step);
    }
    res.iterations = n_iters;
    res.channel_estimates = x_hat;
    res.source_estimates = mix_signals(A.pinv(), x_hat);

    SampleSequence flat_s{std::vector<double>(s.data(), s.data() + s.size()),
                          gram.w};
    SampleSequence resid = flat_s;
    for (std::size_t z = 0; z < n; ++z)
        resid.values[z] -= flat.b.row(static_cast<Eigen::Index>(z))
                               .dot(l2_coords(x_hat[flat.index[z].first]));
    double s_norm = d_norm(flat_s);
    res.sample_residual = s_norm > 0.0 ? d_norm(resid) / s_norm : d_norm(resid);
    return res;
}

} // namespace nusrec
