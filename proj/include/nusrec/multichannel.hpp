#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nusrec/kernels.hpp"
#include "nusrec/recon.hpp"
#include "nusrec/signal.hpp"

namespace nusrec {

// Mixing matrix wiring N sources into M channels, with the Moore-Penrose
// pseudo-inverse and the range projector cached. Any shape or rank is
// accepted; rank deficiency only shrinks the recoverable subspace.
class ChannelMatrix {
  public:
    explicit ChannelMatrix(Eigen::MatrixXd a);

    const Eigen::MatrixXd& a() const { return a_; }
    const Eigen::MatrixXd& pinv() const { return pinv_; }
    // P = A A^+, the orthogonal projector onto the column space; its entries
    // are the cross-channel couplings in the reduced Gram.
    const Eigen::MatrixXd& range_proj() const { return range_proj_; }
    std::size_t channels() const { return static_cast<std::size_t>(a_.rows()); }
    std::size_t sources() const { return static_cast<std::size_t>(a_.cols()); }

  private:
    Eigen::MatrixXd a_;
    Eigen::MatrixXd pinv_;
    Eigen::MatrixXd range_proj_;
};

// Integral samples of one channel over consecutive intervals; weights are
// the interval lengths. A channel may be empty (dropped from acquisition).
struct ChannelSamples {
    std::vector<double> instants;
    std::vector<double> values;
    std::vector<double> weights;
};

// Flat index set runs channel-major: z = (i, j) with i the channel.
struct MultiChannelSamples {
    double period = 0.0;
    std::vector<ChannelSamples> channels;
    std::size_t total() const;
};

// Per-channel acquisition: plain integral sampling at chosen instants, or an
// integrate-and-fire encoder that picks its own spike times.
struct ChannelEncoder {
    enum class Kind { Integral, Fire };
    Kind kind = Kind::Integral;
    std::vector<double> instants; // Integral
    double bias = 0.0;            // Fire
    double threshold = 0.0;       // Fire

    static ChannelEncoder integral(std::vector<double> instants);
    static ChannelEncoder fire(double bias, double threshold);
};

// Forms the channel signals x = A y coefficient-wise and encodes each one.
// One encoder per channel (row of A).
MultiChannelSamples expand_and_encode(const std::vector<Signal>& y,
                                      const ChannelMatrix& A,
                                      const std::vector<ChannelEncoder>& encoders);

// out_p = sum_q m(p, q) in_q, coefficient-wise; all inputs share a period.
std::vector<Signal> mix_signals(const Eigen::MatrixXd& m,
                                const std::vector<Signal>& in);

// Projection onto the constraint set of the multichannel iteration:
// pointwise range(A) projection across channels composed with the
// per-channel bandlimited projection (the two commute, so the order does
// not matter).
std::vector<Signal> project_A(const std::vector<GridFunction>& u,
                              const ChannelMatrix& A);

// Reduced Gram over the flat index set: h[(i,j),(i',j')] =
// P_{i i'} <g~^{i'}_{j'}, g^i_j> / w_{i'j'}, with the scalar inner products
// taken between channel-wise Indicator kernels. The line path reuses the
// same four-term f formula as the single-channel Gram.
GramMatrix multichannel_gram(const MultiChannelSamples& samples,
                             const ChannelMatrix& A,
                             GramPath path = GramPath::ExactPeriodic);

struct MultiChannelResult {
    std::vector<Signal> channel_estimates; // x-hat, one per channel
    std::vector<Signal> source_estimates;  // y-hat = A^+ x-hat
    IterationHistory history;              // stacked-norm errors vs truth
    std::size_t iterations = 0;
    // ||s - S x-hat||_d / ||s||_d: stays O(1) when the samples cannot pin
    // down the sources, instead of raising.
    double sample_residual = 0.0;
};

// Discrete-time iteration c <- c + lambda (s0 - H c) with the reduced Gram,
// synthesized through the zero-order-hold form per channel and mixed by
// A A^+; sources come out through A^+. Empty u0 means the zero start.
MultiChannelResult reconstruct_multichannel(const MultiChannelSamples& samples,
                                            const ChannelMatrix& A,
                                            const std::vector<Signal>& u0,
                                            const RelaxationSchedule& schedule,
                                            std::size_t n_iters,
                                            const std::vector<Signal>* truth_sources = nullptr);

} // namespace nusrec
