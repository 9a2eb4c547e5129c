#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "nusrec/operators.hpp"
#include "nusrec/signal.hpp"

namespace nusrec {

// Relaxation parameters lambda_n; a sequence shorter than the run repeats
// its last value. Admissible range for convergence of the relaxed
// iterations is (0, 2 / ||S||^2).
class RelaxationSchedule {
  public:
    static RelaxationSchedule constant(double lambda);
    static RelaxationSchedule sequence(std::vector<double> lambdas);
    double operator()(std::size_t iter) const;

  private:
    std::vector<double> lambdas_;
};

struct IterationRecord {
    std::size_t iter = 0;
    double err_l2_rel = 0.0;      // ||u_n - truth|| / ||truth||, nan without truth
    double err_sobolev_rel = 0.0; // same in the Sobolev seminorm
    double step_norm = 0.0;       // ||u_n - u_{n-1}||, 0 at iter 0
};

struct IterationHistory {
    std::vector<IterationRecord> rows;
    // csv: iter, err_l2_rel, err_sobolev_rel, step_norm
    void write_csv(std::ostream& os) const;
};

struct ReconResult {
    Signal estimate;
    IterationHistory history;
    bool converged = false;      // stop rule met before the iteration budget
    std::size_t iterations = 0;  // steps actually taken
    bool relaxation_in_range = true;
};

struct StopRule {
    std::size_t max_iters = 100;
    // stop when ||step|| <= step_tol * max(1, ||u||); 0 disables early stop
    double step_tol = 0.0;
};

// One relaxed projection step u + lambda S*(s - S u).
Signal pocs_step(const SamplingOperator& op, const SampleSequence& s,
                 const Signal& u, double lambda);

// Runs pocs_step from u0; converges to op.pocs_limit(s, u0) for admissible
// relaxation. History errors are recorded against `truth` when given.
ReconResult pocs_run(const SamplingOperator& op, const SampleSequence& s,
                     const Signal& u0, const RelaxationSchedule& schedule,
                     const StopRule& stop, const Signal* truth = nullptr);

// Same fixed point reached purely in sample space: iterates coefficient
// sequences c_{n+1} = c_n + lambda (s - S u0 - H c_n) against the Gram
// matrix and synthesizes u_n = u0 + S* c_n. Matches pocs_run step for step.
ReconResult pocs_discrete_run(const SamplingOperator& op, const SampleSequence& s,
                              const Signal& u0, const RelaxationSchedule& schedule,
                              std::size_t n_iters, const Signal* truth = nullptr);

// Classic frame-algorithm iteration for point samples (Sinc families only);
// lambda defaults to the optimal 2 / (gamma^2 + ||S||^2). Sets
// relaxation_in_range = false when the supplied lambda falls outside
// (0, 2 / ||S||^2), in which case divergence is expected.
ReconResult frame_algorithm_run(const SamplingOperator& op, const SampleSequence& s,
                                const Signal& u0, std::optional<double> lambda,
                                std::size_t n_iters, const Signal* truth = nullptr);

enum class SweepOrder { Cyclic, RandomPermutation };

// One Kaczmarz sweep over point samples (Sinc families only: each row
// projection stays inside the bandlimited space). Cyclic order visits
// instants in time order; RandomPermutation shuffles with the given seed.
Signal kaczmarz_sweep(const KernelFamily& fam, const std::vector<double>& samples,
                      const Signal& u, SweepOrder order, std::uint64_t seed = 0);

// n_sweeps sweeps; one history row per sweep. Randomized order draws a
// fresh permutation per sweep, deterministically from seed.
ReconResult kaczmarz_run(const KernelFamily& fam, const std::vector<double>& samples,
                         const Signal& u0, SweepOrder order, std::size_t n_sweeps,
                         std::uint64_t seed = 0, const Signal* truth = nullptr);

// Periodic piecewise-linear interpolant of (times, values) on a uniform
// output grid.
GridFunction linear_interpolant(const std::vector<double>& times,
                                const std::vector<double>& values, double period,
                                std::size_t grid_n);

// Exact bandlimited projection of that interpolant, via its second
// derivative (a train of slope-change deltas at the nodes): no grid is
// involved, c_m = -(T / (4 pi^2 m^2)) sum_k sigma_k e^{-i 2 pi m t_k / T}.
Signal pl_project(const std::vector<double>& times,
                  const std::vector<double>& values, double period);

// Adaptive-weights iteration for point samples: u <- u + lambda P(L(v - u))
// with L the linear interpolant through the residuals. Contracts whenever
// the largest gap stays below one Nyquist period (then even with lambda = 1).
ReconResult grochenig_run(const std::vector<double>& times,
                          const std::vector<double>& values, double period,
                          const Signal& u0, const RelaxationSchedule& schedule,
                          std::size_t n_iters, const Signal* truth = nullptr);

// Bandlimited projection of the left-hold staircase through (times, values):
// the classic warm start for level-crossing data. Exact coefficients (the
// band restriction of the staircase Fourier series).
Signal staircase_initializer(const std::vector<double>& times,
                             const std::vector<double>& values, double period);

} // namespace nusrec
