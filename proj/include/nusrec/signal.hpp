#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace nusrec {

// T-periodic real trigonometric polynomial stored as half-spectrum harmonics:
//
//   u(t) = c_0 + sum_{m=1}^{M} 2 Re( c_m exp(i 2 pi m t / T) ),
//
// with M = max_harmonic(T). Invariants: coef.size() == M + 1 and
// coef[0].imag() == 0, so every Signal of a given period carries the full
// (possibly zero-padded) band and arithmetic never has to align sizes.
struct Signal {
    double period = 0.0;
    std::vector<std::complex<double>> coef;
};

// Largest harmonic index that stays strictly below the Nyquist fold,
// floor((period - 1e-9) / 2); an odd integer period T gives (T-1)/2 and a
// bandlimited space of dimension exactly T.
std::size_t max_harmonic(double period);

Signal zero_signal(double period);

// Throws std::invalid_argument when the invariants above are violated.
void validate(const Signal& u);

// All harmonics drawn i.i.d. complex Gaussian (flat spectrum), then rescaled
// so the mean-square power c_0^2 + 2 sum |c_m|^2 equals rms^2 exactly
// (equivalently norm_l2(u)^2 == period * rms^2). Deterministic in seed.
Signal random_bandlimited(double period, double rms, std::uint64_t seed);

double eval(const Signal& u, double t);
std::vector<double> eval(const Signal& u, const std::vector<double>& ts);

Signal derivative(const Signal& u);

// L2 inner product over one period, period * (c0 c0' + 2 sum Re(cm conj(cm'))).
double inner_l2(const Signal& u, const Signal& v);
double norm_l2(const Signal& u);

// First-order Sobolev seminorm/inner product: the L2 pairing of derivatives.
// Constants are invisible to it.
double inner_sobolev(const Signal& u, const Signal& v);
double sobolev_seminorm(const Signal& u);

Signal add(const Signal& u, const Signal& v);
Signal subtract(const Signal& u, const Signal& v);
Signal scale(const Signal& u, double factor);

// Values on the uniform grid t_j = j * period / values.size().
struct GridFunction {
    double period = 0.0;
    std::vector<double> values;
};

GridFunction sample_on_grid(const Signal& u, std::size_t n);

// Orthogonal projection of grid data onto the bandlimited space via the DFT:
// c_m = (1/n) sum_j v_j exp(-i 2 pi j m / n). Requires n >= 2 M + 1 so the
// retained band is alias-free for bandlimited inputs (then it is exact); for
// general data the result is the least-squares trigonometric fit on the grid.
Signal project_bandlimited(const GridFunction& g);

// Coordinates in the orthonormal real basis of the bandlimited space
// (dimension 2M+1): entry 0 is sqrt(T) c_0, entry 2m-1 is sqrt(2T) Re c_m,
// entry 2m is -sqrt(2T) Im c_m. Euclidean inner products of coordinates equal
// inner_l2 of the signals.
Eigen::VectorXd l2_coords(const Signal& u);
Signal signal_from_l2_coords(const Eigen::VectorXd& a, double period);

// Sobolev coordinates (dimension 2M, the mean is dropped): entry 2(m-1) is
// (2 pi m / T) sqrt(2T) Re c_m, entry 2(m-1)+1 is -(2 pi m / T) sqrt(2T) Im c_m.
// Euclidean inner products equal inner_sobolev.
Eigen::VectorXd sobolev_coords(const Signal& u);
Signal signal_from_sobolev_coords(const Eigen::VectorXd& s, double period,
                                  double mean = 0.0);

} // namespace nusrec
