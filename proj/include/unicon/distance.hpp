#pragma once
// Distance analytics: amplitude-pair distance, critical phase-difference
// subsets, closed-form and brute-force phase MCD, the decomposed MCD and the
// sphere-packing upper bound used to prune the allocation search.

#include "unicon/types.hpp"

namespace unicon {

// One candidate phase-difference vector that can attain the phase MCD.
struct CriticalDifference {
  enum class Kind { PerSymbol, PerLevel };
  Kind kind = Kind::PerSymbol;
  int index = 0;               // symbol index or modulation level
  std::vector<double> angles;  // radians, one per symbol, in [0, 2*pi)
};

// Chordal distance between two points whose amplitude rows differ; the
// phases align and drop out.
double amplitude_pair_distance(const std::vector<double>& a, const std::vector<double>& b);

// The reduced set of phase differences that must contain the minimizer:
// one per modulated symbol (its smallest step, zeros elsewhere) and one per
// modulation level (that level's step on every symbol of order >= level).
// Exact duplicates are removed.
std::vector<CriticalDifference> critical_phase_differences(const BitAllocation& alloc);

// Closed-form minimum chordal distance among points sharing amplitude row u.
double phase_mcd_closed_form(const std::vector<double>& u, const BitAllocation& alloc);

// Exhaustive minimum over all non-identity phase-difference tuples; the
// independent oracle for the closed form. Guarded at 2^16 tuples.
double phase_mcd_bruteforce(const std::vector<double>& u, const BitAllocation& alloc);

// min( min over amplitude pairs, min over rows of the phase MCD ).
double mcd_decomposed(const Codebook& cb);

// Which term attains mcd_decomposed; used for reporting.
struct McdBreakdown {
  double mcd = 0.0;
  bool from_amplitude_pair = false;
  int row_a = 0;  // amplitude pair (row_a, row_b), or the single row for a
  int row_b = 0;  // phase-limited minimum
};
McdBreakdown mcd_decomposed_breakdown(const Codebook& cb);

// min( sphere-packing cap on the amplitude distance, sin(pi / 2^max_order) ).
// The sine term is omitted when no symbol carries phase bits.
double mcd_upper_bound(const BitAllocation& alloc);

}  // namespace unicon
