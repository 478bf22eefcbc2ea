#pragma once
// Core domain types for amplitude-PSK unitary constellations.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace unicon {

using cplx = std::complex<double>;

// One transmitted block of unit-norm complex symbols.
using Signal = std::vector<cplx>;

// Message payload, one 0/1 value per bit.
using MessageBits = std::vector<std::uint8_t>;

// Enumeration guard exceeded (brute-force sizes, codebook cardinality).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Phase analysis requested on an allocation whose phase orders are all zero.
class EmptyPhaseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every restart of the amplitude design failed.
class DesignFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Split of the message bits into amplitude bits and per-symbol PSK bits.
//
// The symbol at index 0 carries the phase reference, so its PSK order is
// always zero, and the per-symbol orders are kept non-decreasing.
struct BitAllocation {
  int block_len = 0;            // symbols per fading block
  int amp_bits = 0;             // bits selecting the amplitude vector
  std::vector<int> phase_bits;  // PSK bits per symbol

  int total_bits() const;
  int phase_bit_total() const;
  int max_phase_bits() const;

  // Indices of symbols that carry PSK bits.
  std::vector<int> modulated_symbols() const;
  // Distinct non-zero PSK orders, ascending.
  std::vector<int> modulation_levels() const;

  // Throws std::invalid_argument on a malformed allocation.
  void validate() const;

  bool operator==(const BitAllocation&) const = default;
};

// The optimized set of non-negative unit-norm amplitude vectors.
struct AmplitudeSet {
  std::vector<std::vector<double>> rows;

  int count() const { return static_cast<int>(rows.size()); }
};

struct DesignMetadata {
  std::uint64_t seed = 0;
  int restarts = 0;
  int sca_iterations = 0;
};

// A bit allocation together with its designed amplitude set; fully
// determines the constellation.
struct Codebook {
  BitAllocation alloc;
  AmplitudeSet amplitudes;
  double achieved_mcd = 0.0;
  DesignMetadata metadata;

  std::size_t size() const;  // number of constellation points

  // Structural invariants: row count/shape, non-negative entries, unit
  // norms within 1e-12, pairwise distinct rows. Throws std::invalid_argument.
  void validate() const;
};

}  // namespace unicon
