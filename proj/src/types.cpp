#include "unicon/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace unicon {

int BitAllocation::total_bits() const { return amp_bits + phase_bit_total(); }

int BitAllocation::phase_bit_total() const {
  return std::accumulate(phase_bits.begin(), phase_bits.end(), 0);
}

int BitAllocation::max_phase_bits() const {
  return phase_bits.empty() ? 0 : *std::max_element(phase_bits.begin(), phase_bits.end());
}

std::vector<int> BitAllocation::modulated_symbols() const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(phase_bits.size()); ++k) {
    if (phase_bits[k] > 0) out.push_back(k);
  }
  return out;
}

std::vector<int> BitAllocation::modulation_levels() const {
  std::vector<int> out;
  for (int b : phase_bits) {
    if (b > 0) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void BitAllocation::validate() const {
  if (block_len < 1) throw std::invalid_argument("bit allocation: block length must be positive");
  if (amp_bits < 0) throw std::invalid_argument("bit allocation: negative amplitude bits");
  if (static_cast<int>(phase_bits.size()) != block_len) {
    throw std::invalid_argument("bit allocation: phase order list must have one entry per symbol");
  }
  if (phase_bits[0] != 0) {
    throw std::invalid_argument("bit allocation: symbol 0 is the phase reference and must carry 0 bits");
  }
  for (std::size_t k = 0; k < phase_bits.size(); ++k) {
    if (phase_bits[k] < 0) throw std::invalid_argument("bit allocation: negative phase bits");
    if (k > 0 && phase_bits[k] < phase_bits[k - 1]) {
      throw std::invalid_argument("bit allocation: phase orders must be non-decreasing");
    }
  }
  if (total_bits() < 1) throw std::invalid_argument("bit allocation: at least one bit required");
  if (amp_bits > 24 || max_phase_bits() > 24 || total_bits() > 48) {
    throw std::invalid_argument("bit allocation: bit counts out of supported range");
  }
}

std::size_t Codebook::size() const { return std::size_t{1} << alloc.total_bits(); }

void Codebook::validate() const {
  alloc.validate();
  const std::size_t want_rows = std::size_t{1} << alloc.amp_bits;
  if (amplitudes.rows.size() != want_rows) {
    throw std::invalid_argument("codebook: amplitude set must hold 2^amp_bits rows");
  }
  for (const auto& row : amplitudes.rows) {
    if (static_cast<int>(row.size()) != alloc.block_len) {
      throw std::invalid_argument("codebook: amplitude row length must equal block length");
    }
    double nsq = 0.0;
    for (double x : row) {
      if (!(x >= 0.0)) throw std::invalid_argument("codebook: amplitude entries must be non-negative");
      nsq += x * x;
    }
    if (std::abs(std::sqrt(nsq) - 1.0) > 1e-12) {
      throw std::invalid_argument("codebook: amplitude rows must be unit norm");
    }
  }
  for (std::size_t a = 0; a + 1 < amplitudes.rows.size(); ++a) {
    for (std::size_t b = a + 1; b < amplitudes.rows.size(); ++b) {
      if (amplitudes.rows[a] == amplitudes.rows[b]) {
        throw std::invalid_argument("codebook: duplicate amplitude rows");
      }
    }
  }
  if (!(achieved_mcd >= 0.0 && achieved_mcd <= 1.0 + 1e-12)) {
    throw std::invalid_argument("codebook: achieved MCD out of [0,1]");
  }
}

}  // namespace unicon
