#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "nusrec/kernels.hpp"
#include "nusrec/signal.hpp"

namespace nusrec {

// One scalar sample per kernel plus the kernel weights w_k = ||g_k||^2.
// Sequences pair through d_inner(c, d) = sum_k c_k d_k / w_k, the natural
// inner product under which the sampling operator's adjoint takes the
// closed form S* c = sum_k (c_k / w_k) P g_k.
struct SampleSequence {
    std::vector<double> values;
    std::vector<double> weights;
};

double d_inner(const SampleSequence& a, const SampleSequence& b);
double d_norm(const SampleSequence& a);

// The sampling operator S u = { <u, g_k> } of one kernel family, realized as
// a single dense matrix acting on orthonormal coordinates (L2 coordinates,
// or Sobolev coordinates for first-difference families). Every derived
// object (adjoint, Gram, spectral bounds, pseudo-inverse, projections) is
// computed from that one matrix, so the identities between them hold to
// rounding error by construction.
class SamplingOperator {
  public:
    explicit SamplingOperator(KernelFamily fam);

    const KernelFamily& family() const { return fam_; }
    double period() const { return fam_.period; }
    std::size_t sample_count() const { return fam_.size(); }
    const std::vector<double>& weights() const { return w_; }
    // Rows are projected-kernel coordinates; apply() is matrix() * coords.
    const Eigen::MatrixXd& matrix() const { return b_; }

    SampleSequence apply(const Signal& u) const;
    Signal apply_adjoint(const SampleSequence& c) const;

    // Same convention as kernels::gram_matrix (matrix of S S*).
    GramMatrix gram() const;

    // upper = ||S||^2 and lower = gamma(S)^2, the largest/smallest nonzero
    // squared singular values of S restricted to the span of the kernels;
    // the frame inequality lower ||u||^2 <= ||S u||_d^2 <= upper ||u||^2
    // holds for u in that span. rank counts singular values above
    // rel_cutoff * largest.
    struct SpectralBounds {
        double upper = 0.0;
        double lower = 0.0;
        std::size_t rank = 0;
    };
    SpectralBounds spectral_bounds() const;

    // Minimum-norm least-squares solve: argmin ||u|| over minimizers of
    // ||S u - s||_d. For Sobolev families the result has zero mean.
    Signal pseudo_inverse_apply(const SampleSequence& s) const;

    // d-orthogonal projection onto range(S).
    SampleSequence project_range(const SampleSequence& s) const;

    // Orthogonal projection onto span{P g_k} (for Sobolev families the mean
    // is annihilated: projections live in the zero-mean space).
    Signal project_frame_subspace(const Signal& u) const;

    // Limit of the relaxed iteration u <- u + lambda S*(s - S u) started at
    // u0 with any admissible relaxation: the pseudo-inverse solution plus
    // the part of u0 the samples never see.
    Signal pocs_limit(const SampleSequence& s, const Signal& u0) const;

  private:
    struct Svd;
    const Svd& svd() const;
    Eigen::VectorXd coords(const Signal& u) const;
    Signal from_coords(const Eigen::VectorXd& a, double mean) const;
    void check_sequence(const SampleSequence& s) const;

    KernelFamily fam_;
    std::vector<double> w_;
    Eigen::MatrixXd b_;
    Eigen::VectorXd inv_sqrt_w_;
    mutable std::shared_ptr<const Svd> svd_; // lazily computed, guarded
};

} // namespace nusrec
