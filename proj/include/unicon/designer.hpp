#pragma once
// Amplitude-set optimization for a fixed bit allocation (successive convex
// approximation over the epigraph form) and the bound-pruned search over bit
// allocations.

#include <cstdint>

#include "unicon/types.hpp"

namespace unicon {

struct DesignConfig {
  double epsilon_v = 1e-4;      // slack of the relaxed norm band 1-eps <= |u| <= 1
  double sca_tol = 1e-6;        // stop when the subproblem objective moves less
  int sca_max_iters = 100;
  int restarts = 16;
  double subproblem_tol = 1e-8;  // max constraint violation of returned points
  std::uint64_t seed = 0;

  void validate() const;
};

// Subproblem numerical failure; carries the best feasible iterate seen.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& msg, AmplitudeSet best, double t)
      : std::runtime_error(msg), best_point(std::move(best)), best_t(t) {}

  AmplitudeSet best_point;
  double best_t = 0.0;
};

// The convexified fixed-allocation design problem, linearized at an anchor
// amplitude set: maximize t subject to
//   - per-symbol and per-level energy caps (cap_rhs below) on every row,
//   - linearized pairwise-separation cuts between every pair of rows,
//   - a linearized norm lower bound and the exact norm upper bound,
//   - entrywise non-negativity (handled by projection in the solver).
struct ConvexSubproblem {
  int rows = 0;
  int dim = 0;
  double epsilon_v = 1e-4;
  double t_max = 1.0;  // largest t with every cap radicand non-negative

  struct EnergyCap {
    std::vector<int> indices;  // sum of u_i^2 over these columns <= cap_rhs(t, sin_sq)
    double sin_sq = 1.0;
  };
  std::vector<EnergyCap> caps;  // applied to every row

  struct PairCut {
    int a = 0, b = 0;  // alpha + grad_a.u_a + grad_b.u_b <= 1 - t
    double alpha = 0.0;
    std::vector<double> grad_a, grad_b;
  };
  std::vector<PairCut> pairs;

  std::vector<std::vector<double>> anchor;  // linearization rows, unit norm
  std::vector<double> norm_rhs;             // 2 * anchor_r . u_r >= norm_rhs[r]

  // (sqrt(1 - t/sin_sq) + 1) / 2, the cap right-hand side.
  static double cap_rhs(double t, double sin_sq);
};

struct SubproblemSolution {
  AmplitudeSet point;  // violation <= subproblem_tol; norms in [1-eps, 1]
  double t = 0.0;
};

ConvexSubproblem build_subproblem(const AmplitudeSet& linearization, const BitAllocation& alloc,
                                  const DesignConfig& cfg);

// Bisection on t with a projected-gradient feasibility search per probe.
// t_hint, when positive, is a value known (or believed) feasible and is
// probed first to shrink the bracket.
SubproblemSolution solve_subproblem(const ConvexSubproblem& sp, const DesignConfig& cfg,
                                    double t_hint = 0.0);

// Multi-start SCA. Restarts run independently (optionally in parallel) on
// substreams keyed by (seed, restart), so the result is bit-identical for
// any worker count. The returned codebook's achieved_mcd is recomputed from
// the final rows, never taken from the solver's t.
Codebook design_amplitude_set(const BitAllocation& alloc, const DesignConfig& cfg,
                              int threads = 1);

struct SearchEntry {
  BitAllocation alloc;
  Codebook codebook;
  double upper_bound = 0.0;
};

// Enumerates every allocation of total_bits over (amplitude, non-decreasing
// per-symbol phase orders), evaluates them in descending upper-bound order,
// and stops once the next bound cannot beat the best design found. Entries
// come back ranked by achieved MCD (ties within 1e-3 prefer fewer amplitude
// bits).
std::vector<SearchEntry> search_bit_allocations(int block_len, int total_bits,
                                                const DesignConfig& cfg, int threads = 1);

}  // namespace unicon
