#include "nusrec/operators.hpp"

#include <cmath>
#include <mutex>

#include "nusrec/common.hpp"

namespace nusrec {

using detail::require;

namespace {
constexpr double kRankCutoff = 1e-10; // relative singular value cutoff
std::mutex svd_mu;
} // namespace

double d_inner(const SampleSequence& a, const SampleSequence& b) {
    require(a.values.size() == b.values.size() &&
                a.weights.size() == a.values.size() &&
                b.weights.size() == b.values.size(),
            "sample sequences must share their length");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        require(a.weights[k] > 0.0 && a.weights[k] == b.weights[k],
                "sample sequences must share positive weights");
        acc += a.values[k] * b.values[k] / a.weights[k];
    }
    return acc;
}

double d_norm(const SampleSequence& a) {
    return std::sqrt(d_inner(a, a));
}

// Whitened SVD: singular values of diag(1/sqrt(w)) B give the frame bounds
// of S between the d-metric on sequences and the signal-space metric.
struct SamplingOperator::Svd {
    Eigen::MatrixXd u;      // sample side, whitened
    Eigen::MatrixXd v;      // coordinate side
    Eigen::VectorXd sigma;
    std::size_t rank = 0;
};

SamplingOperator::SamplingOperator(KernelFamily fam) : fam_(std::move(fam)) {
    w_ = kernel_weights(fam_);
    std::size_t n = fam_.size();
    bool sob = fam_.sobolev();
    std::size_t dim = 2 * max_harmonic(fam_.period) + (sob ? 0 : 1);
    b_.resize(n, dim);
    for (std::size_t k = 0; k < n; ++k) {
        Signal g = projected_kernel(fam_, k);
        b_.row(k) = sob ? sobolev_coords(g).transpose() : l2_coords(g).transpose();
    }
    inv_sqrt_w_.resize(n);
    for (std::size_t k = 0; k < n; ++k) inv_sqrt_w_(k) = 1.0 / std::sqrt(w_[k]);
}

const SamplingOperator::Svd& SamplingOperator::svd() const {
    std::lock_guard<std::mutex> lock(svd_mu);
    if (!svd_) {
        Eigen::MatrixXd whitened = inv_sqrt_w_.asDiagonal() * b_;
        Eigen::JacobiSVD<Eigen::MatrixXd> dec(
            whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
        auto out = std::make_shared<Svd>();
        out->u = dec.matrixU();
        out->v = dec.matrixV();
        out->sigma = dec.singularValues();
        double top = out->sigma.size() > 0 ? out->sigma(0) : 0.0;
        std::size_t r = 0;
        while (r < static_cast<std::size_t>(out->sigma.size()) &&
               out->sigma(r) > kRankCutoff * top && out->sigma(r) > 0.0)
            ++r;
        out->rank = r;
        svd_ = std::move(out);
    }
    return *svd_;
}

Eigen::VectorXd SamplingOperator::coords(const Signal& u) const {
    require(u.period == fam_.period, "signal period does not match the operator");
    return fam_.sobolev() ? sobolev_coords(u) : l2_coords(u);
}

Signal SamplingOperator::from_coords(const Eigen::VectorXd& a, double mean) const {
    return fam_.sobolev() ? signal_from_sobolev_coords(a, fam_.period, mean)
                          : signal_from_l2_coords(a, fam_.period);
}

void SamplingOperator::check_sequence(const SampleSequence& s) const {
    require(s.values.size() == fam_.size(),
            "sample sequence length does not match the kernel count");
    require(s.weights == w_, "sample sequence weights do not match the operator");
}

SampleSequence SamplingOperator::apply(const Signal& u) const {
    Eigen::VectorXd s = b_ * coords(u);
    SampleSequence out;
    out.values.assign(s.data(), s.data() + s.size());
    out.weights = w_;
    return out;
}

Signal SamplingOperator::apply_adjoint(const SampleSequence& c) const {
    check_sequence(c);
    Eigen::VectorXd scaled(fam_.size());
    for (std::size_t k = 0; k < fam_.size(); ++k)
        scaled(k) = c.values[k] / w_[k];
    return from_coords(b_.transpose() * scaled, 0.0);
}

GramMatrix SamplingOperator::gram() const {
    GramMatrix gm;
    gm.w = w_;
    gm.h = b_ * b_.transpose();
    for (std::size_t kp = 0; kp < fam_.size(); ++kp) gm.h.col(kp) /= w_[kp];
    return gm;
}

SamplingOperator::SpectralBounds SamplingOperator::spectral_bounds() const {
    const Svd& d = svd();
    SpectralBounds out;
    out.rank = d.rank;
    if (d.rank == 0) return out;
    out.upper = d.sigma(0) * d.sigma(0);
    out.lower = d.sigma(d.rank - 1) * d.sigma(d.rank - 1);
    return out;
}

Signal SamplingOperator::pseudo_inverse_apply(const SampleSequence& s) const {
    check_sequence(s);
    const Svd& d = svd();
    Eigen::VectorXd sw(fam_.size());
    for (std::size_t k = 0; k < fam_.size(); ++k)
        sw(k) = s.values[k] * inv_sqrt_w_(k);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(b_.cols());
    for (std::size_t r = 0; r < d.rank; ++r)
        a += (d.u.col(r).dot(sw) / d.sigma(r)) * d.v.col(r);
    return from_coords(a, 0.0);
}

SampleSequence SamplingOperator::project_range(const SampleSequence& s) const {
    check_sequence(s);
    const Svd& d = svd();
    Eigen::VectorXd sw(fam_.size());
    for (std::size_t k = 0; k < fam_.size(); ++k)
        sw(k) = s.values[k] * inv_sqrt_w_(k);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(sw.size());
    for (std::size_t r = 0; r < d.rank; ++r)
        proj += d.u.col(r).dot(sw) * d.u.col(r);
    SampleSequence out;
    out.values.resize(fam_.size());
    for (std::size_t k = 0; k < fam_.size(); ++k)
        out.values[k] = proj(k) / inv_sqrt_w_(k);
    out.weights = w_;
    return out;
}

Signal SamplingOperator::project_frame_subspace(const Signal& u) const {
    const Svd& d = svd();
    Eigen::VectorXd a = coords(u);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(a.size());
    for (std::size_t r = 0; r < d.rank; ++r)
        proj += d.v.col(r).dot(a) * d.v.col(r);
    return from_coords(proj, 0.0);
}

Signal SamplingOperator::pocs_limit(const SampleSequence& s, const Signal& u0) const {
    Signal unseen = subtract(u0, project_frame_subspace(u0));
    return add(pseudo_inverse_apply(s), unseen);
}

} // namespace nusrec
