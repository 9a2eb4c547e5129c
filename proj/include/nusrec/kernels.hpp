#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nusrec/signal.hpp"

namespace nusrec {

// Sampling kernel families over one period. All but Sinc are interval
// kernels: kernel k lives on [t_{k-1}, t_k], and k = 0 wraps around to
// [t_{N-1} - T, t_0] so the N intervals tile the circle exactly.
//
//   Indicator  g_k = 1 on the interval                  (running integrals)
//   LeakyExp   g_k = exp(-leak (t_k - t)) on it         (leaky integrator)
//   Ramp       first differences u(t_k) - u(t_{k-1}); lives in the Sobolev
//              pairing, its ambient-space weight is the interval length
//   Sinc       point evaluation at t_k via the periodic Dirichlet kernel
enum class KernelKind { Indicator, LeakyExp, Ramp, Sinc };

struct KernelFamily {
    KernelKind kind = KernelKind::Indicator;
    double period = 0.0;
    std::vector<double> instants; // strictly increasing, in [0, period)
    double leak = 0.0;            // LeakyExp only

    static KernelFamily make(KernelKind kind, double period,
                             std::vector<double> instants, double leak = 0.0);

    std::size_t size() const { return instants.size(); }
    // [t_{k-1}, t_k]; interval(0) = [t_{N-1} - period, t_0].
    std::pair<double, double> interval(std::size_t k) const;
    // True when samples pair against signals in the Sobolev inner product.
    bool sobolev() const { return kind == KernelKind::Ramp; }
};

// Sine integral si(x) = integral_0^x sin(u)/u du (odd, si(inf) = pi/2).
double si(double x);

// f(t) = t si(pi t)/pi - (1 - cos(pi t))/pi^2, the antiderivative pattern
// behind inner products of running integrals of the unit-band sinc on the
// line: d^2 f / dt^2 = sinc(t). Even; f(t) ~ t^2/2 near 0, ~ |t|/2 at infinity.
double f_kernel(double t);

// Uniformly tabulated f with linear interpolation. The interpolation error
// is bounded by max|f''| h^2 / 8 = h^2 / 8 (1.25e-7 at the default step).
class FKernelTable {
  public:
    explicit FKernelTable(double t_max, double step = 1e-3);
    double operator()(double t) const; // requires |t| <= t_max
    double step() const { return step_; }

  private:
    double t_max_;
    double step_;
    std::vector<double> values_;
};

// <P g_j, P g_j'> for unit-band line sinc running integrals over intervals
// [a1, b1] and [a2, b2]: f(b1-a2) - f(a1-a2) - f(b1-b2) + f(a1-b2).
double f_pair_inner(double a1, double b1, double a2, double b2);

// Orthogonal projection of kernel k onto the bandlimited space (for Ramp:
// the representer of the first difference under the Sobolev pairing, zero
// mean). Closed-form Fourier coefficients, no grid involved.
Signal projected_kernel(const KernelFamily& fam, std::size_t k);

// Squared ambient norm w_k = ||g_k||^2: interval length for Indicator/Ramp,
// (1 - exp(-2 leak dt)) / (2 leak) for LeakyExp, (2M+1)/T for Sinc.
double kernel_weight(const KernelFamily& fam, std::size_t k);
std::vector<double> kernel_weights(const KernelFamily& fam);

// h_{k,k'} = <P g_{k'}, g_k> / w_{k'} (the matrix of S S* acting on
// normalized sample sequences); w holds the kernel weights.
struct GramMatrix {
    Eigen::MatrixXd h;
    std::vector<double> w;
};

enum class GramPath {
    ExactPeriodic,  // Parseval sum over projected-kernel coefficients
    ClosedFormLine, // four-term f formula; Indicator only, line-setting
                    // approximation whose error decays like 1/period
};

GramMatrix gram_matrix(const KernelFamily& fam,
                       GramPath path = GramPath::ExactPeriodic);

} // namespace nusrec
