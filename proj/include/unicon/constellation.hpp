#pragma once
// Bit/signal encoding, chordal distance, brute-force MCD and the Chernoff
// pairwise-error bound.

#include <cstdint>

#include "unicon/types.hpp"

namespace unicon {

// Reflected binary code used for the PSK labels.
inline std::uint32_t gray_encode(std::uint32_t n) { return n ^ (n >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t n = g;
  while (g >>= 1) n ^= g;
  return n;
}

// PSK point selected by index: angle 2*pi*idx / 2^order_bits.
double psk_angle(int idx, int order_bits);

// Maps a length-l_v bit string onto a transmit block: the leading amp_bits
// bits pick the amplitude row by natural binary value, then each symbol's
// phase_bits pick a Gray-labeled PSK point.
Signal encode(const Codebook& cb, const MessageBits& bits);

// Same constellation point addressed by indices instead of bits.
Signal signal_from_indices(const Codebook& cb, int amp_index, const std::vector<int>& phase_indices);

// Exact inverse of encode's index extraction.
MessageBits decode_indices_to_bits(const Codebook& cb, int amp_index,
                                   const std::vector<int>& phase_indices);

// sqrt(1 - |a^H b|^2), clamped at zero against rounding.
double chordal_distance(const Signal& a, const Signal& b);

// Minimum chordal distance over all pairs of distinct constellation points.
// Guarded at 2^20 points.
double mcd_bruteforce(const Codebook& cb);

// Chernoff bound on the pairwise error probability between two unitary
// signals at chordal distance d, noise variance sigma2, M receive antennas.
double pep_chernoff_bound(double d, double sigma2, int antennas);

}  // namespace unicon
