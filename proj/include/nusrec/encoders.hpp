#pragma once

#include <cstdint>
#include <vector>

#include "nusrec/operators.hpp"
#include "nusrec/signal.hpp"

namespace nusrec {

// Physical acquisition models. Everything here measures signals through
// pointwise evaluation and adaptive quadrature only, never through the
// operator matrix, so encoder output can cross-check the operator algebra.

// Exact samples <x, g_k> for every kernel of the family: interval integrals
// (plain or leaky) by adaptive quadrature, first differences and point
// values by evaluation.
SampleSequence integral_samples(const Signal& x, const KernelFamily& fam);

// Integrate-and-fire time encoder: y' = x + bias, a spike fires and resets
// the integrator whenever y reaches threshold. Requires bias > max |x| so
// spikes keep coming. Returns the spike times inside one period together
// with the interval samples of the induced Indicator family: between spikes
// integral x = threshold - bias * dt holds by construction; the wrap
// interval (from the last spike back around to the first) is completed by
// quadrature since the device never fires across the seam.
struct FireResult {
    std::vector<double> instants;
    SampleSequence samples;
};
FireResult fire_instants(const Signal& x, double bias, double threshold);

// Times and values where x crosses the levels offset + j * spacing covering
// its range. Crossings are located by a sign-change scan on a dense grid
// refined by bisection; grazing tangencies without a sign change at the scan
// resolution are not reported.
struct CrossingSet {
    std::vector<double> times;
    std::vector<double> values;
};
CrossingSet level_crossings(const Signal& x, double spacing, double offset = 0.0);

// Instants with i.i.d. U(gap_min, gap_max) gaps walked from a random start;
// the wrap gap absorbs the remainder.
struct UniformGapSpec {
    double gap_min = 0.0;
    double gap_max = 0.0;
};
// Bursts of `per_cluster` instants `intra_gap` apart, anchored on a jittered
// lattice sized so the total count is about oversampling * period (one
// Nyquist period per unit time); jitter is +-0.5 around the lattice so the
// largest hole stays bounded.
struct ClusterSpec {
    double intra_gap = 0.0;
    std::size_t per_cluster = 0;
    double oversampling = 0.0;
};
std::vector<double> generate_instants(const UniformGapSpec& spec, double period,
                                      std::uint64_t seed);
std::vector<double> generate_instants(const ClusterSpec& spec, double period,
                                      std::uint64_t seed);

// Adds i.i.d. Gaussian noise of variance input_power * 10^(-snr_db/10) to
// the sample values; input_power is the mean-square power of the clean
// signal the samples came from.
SampleSequence add_noise(const SampleSequence& s, double snr_db,
                         double input_power, std::uint64_t seed);

} // namespace nusrec
