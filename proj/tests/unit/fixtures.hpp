#pragma once
// Shared fixtures for the unit suite.

#include <cmath>
#include <vector>

#include "unicon/rng.hpp"
#include "unicon/types.hpp"

namespace unicon::testfx {

inline BitAllocation make_alloc(int block_len, int amp_bits, std::vector<int> phase_bits) {
  BitAllocation a;
  a.block_len = block_len;
  a.amp_bits = amp_bits;
  a.phase_bits = std::move(phase_bits);
  return a;
}

// Three-symbol two-row codebook with 4-PSK on the data symbols; a handy
// valid fixture that needs no optimizer run.
inline Codebook two_row_codebook() {
  Codebook cb;
  cb.alloc = make_alloc(3, 1, {0, 2, 2});
  cb.amplitudes.rows = {{2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0},
                        {0.5, 0.5, std::sqrt(2.0) / 2.0}};
  cb.achieved_mcd = 0.43096440627115074;  // its decomposed MCD
  return cb;
}

inline std::vector<double> random_unit_amplitude(rng::Stream& rs, int len) {
  std::vector<double> u(len);
  double nsq = 0.0;
  for (double& x : u) {
    x = std::abs(rs.gaussian());
    nsq += x * x;
  }
  const double inv = 1.0 / std::sqrt(nsq);
  for (double& x : u) x *= inv;
  return u;
}

inline Codebook random_codebook(std::uint64_t seed, const BitAllocation& alloc) {
  rng::Stream rs = rng::substream(seed, 0xF1F, 0);
  Codebook cb;
  cb.alloc = alloc;
  const int rows = 1 << alloc.amp_bits;
  for (int r = 0; r < rows; ++r) {
    cb.amplitudes.rows.push_back(random_unit_amplitude(rs, alloc.block_len));
  }
  return cb;
}

}  // namespace unicon::testfx
