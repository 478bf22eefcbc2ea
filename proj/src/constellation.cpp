#include "unicon/constellation.hpp"

#include <cmath>

#include "unicon/kernels.hpp"

namespace unicon {

namespace {

// Reads `count` bits MSB-first starting at `pos`, advancing `pos`.
std::uint32_t take_bits(const MessageBits& bits, std::size_t& pos, int count) {
  std::uint32_t value = 0;
  for (int i = 0; i < count; ++i) {
    const std::uint8_t b = bits[pos++];
    if (b > 1) throw std::invalid_argument("encode: bits must be 0 or 1");
    value = (value << 1) | b;
  }
  return value;
}

void put_bits(MessageBits& bits, std::uint32_t value, int count) {
  for (int i = count - 1; i >= 0; --i) {
    bits.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
  }
}

}  // namespace

double psk_angle(int idx, int order_bits) {
  return 2.0 * M_PI * static_cast<double>(idx) / static_cast<double>(1u << order_bits);
}

Signal encode(const Codebook& cb, const MessageBits& bits) {
  const BitAllocation& al = cb.alloc;
  if (static_cast<int>(bits.size()) != al.total_bits()) {
    throw std::invalid_argument("encode: bit string length must equal the allocation's total bits");
  }
  std::size_t pos = 0;
  const std::uint32_t amp = take_bits(bits, pos, al.amp_bits);
  const auto& u = cb.amplitudes.rows.at(amp);
  Signal v(al.block_len);
  for (int k = 0; k < al.block_len; ++k) {
    const int lb = al.phase_bits[k];
    if (lb == 0) {
      v[k] = {u[k], 0.0};
      continue;
    }
    const std::uint32_t g = gray_decode(take_bits(bits, pos, lb));
    const double phi = psk_angle(static_cast<int>(g), lb);
    v[k] = u[k] * cplx{std::cos(phi), std::sin(phi)};
  }
  return v;
}

Signal signal_from_indices(const Codebook& cb, int amp_index, const std::vector<int>& phase_indices) {
  const BitAllocation& al = cb.alloc;
  if (amp_index < 0 || amp_index >= cb.amplitudes.count()) {
    throw std::invalid_argument("signal_from_indices: amplitude index out of range");
  }
  if (static_cast<int>(phase_indices.size()) != al.block_len) {
    throw std::invalid_argument("signal_from_indices: need one phase index per symbol");
  }
  const auto& u = cb.amplitudes.rows[amp_index];
  Signal v(al.block_len);
  for (int k = 0; k < al.block_len; ++k) {
    const int lb = al.phase_bits[k];
    const int idx = phase_indices[k];
    if (idx < 0 || idx >= (1 << lb)) {
      throw std::invalid_argument("signal_from_indices: phase index out of range");
    }
    const double phi = psk_angle(idx, lb);
    v[k] = u[k] * cplx{std::cos(phi), std::sin(phi)};
  }
  return v;
}

MessageBits decode_indices_to_bits(const Codebook& cb, int amp_index,
                                   const std::vector<int>& phase_indices) {
  const BitAllocation& al = cb.alloc;
  if (amp_index < 0 || amp_index >= (1 << al.amp_bits)) {
    throw std::invalid_argument("decode: amplitude index out of range");
  }
  if (static_cast<int>(phase_indices.size()) != al.block_len) {
    throw std::invalid_argument("decode: need one phase index per symbol");
  }
  MessageBits bits;
  bits.reserve(al.total_bits());
  put_bits(bits, static_cast<std::uint32_t>(amp_index), al.amp_bits);
  for (int k = 0; k < al.block_len; ++k) {
    const int lb = al.phase_bits[k];
    const int idx = phase_indices[k];
    if (idx < 0 || idx >= (1 << lb)) {
      throw std::invalid_argument("decode: phase index out of range");
    }
    if (lb > 0) put_bits(bits, gray_encode(static_cast<std::uint32_t>(idx)), lb);
  }
  return bits;
}

double chordal_distance(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("chordal_distance: signals must have equal length");
  }
  const cplx ip = kernels::dot_conj(a.data(), b.data(), a.size());
  const double radicand = 1.0 - std::norm(ip);
  return std::sqrt(radicand > 0.0 ? radicand : 0.0);
}

double mcd_bruteforce(const Codebook& cb) {
  const BitAllocation& al = cb.alloc;
  if (al.total_bits() > 20) {
    throw CapacityError("mcd_bruteforce: more than 2^20 constellation points");
  }
  // Enumerate every point once, odometer over the per-symbol phase indices.
  std::vector<Signal> points;
  points.reserve(cb.size());
  std::vector<int> idx(al.block_len, 0);
  for (int a = 0; a < cb.amplitudes.count(); ++a) {
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      points.push_back(signal_from_indices(cb, a, idx));
      int k = al.block_len - 1;
      while (k >= 0) {
        if (++idx[k] < (1 << al.phase_bits[k])) break;
        idx[k--] = 0;
      }
      if (k < 0) break;
    }
  }
  double mcd = 1.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = chordal_distance(points[i], points[j]);
      if (d < mcd) mcd = d;
    }
  }
  return points.size() > 1 ? mcd : 0.0;
}

double pep_chernoff_bound(double d, double sigma2, int antennas) {
  if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("pep bound: d must lie in [0,1]");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("pep bound: sigma2 must be positive");
  if (antennas < 1) throw std::invalid_argument("pep bound: antennas must be >= 1");
  const double base = 1.0 + d * d / (4.0 * sigma2 * (1.0 + sigma2));
  return 0.5 * std::pow(base, -static_cast<double>(antennas));
}

}  // namespace unicon
