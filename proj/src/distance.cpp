#include "unicon/distance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace unicon {

namespace {

double clamped_sqrt(double x) { return std::sqrt(x > 0.0 ? x : 0.0); }

void check_amplitude_vector(const std::vector<double>& u, int block_len, const char* who) {
  if (static_cast<int>(u.size()) != block_len) {
    throw std::invalid_argument(std::string(who) + ": amplitude vector length mismatch");
  }
}

// Shape-only check: the phase analytics are permutation-invariant, so they
// accept orders in any arrangement, unlike the canonical allocation.
void check_phase_orders(const BitAllocation& alloc, const char* who) {
  if (alloc.block_len < 1 ||
      static_cast<int>(alloc.phase_bits.size()) != alloc.block_len) {
    throw std::invalid_argument(std::string(who) + ": malformed allocation");
  }
  for (int b : alloc.phase_bits) {
    if (b < 0 || b > 24) throw std::invalid_argument(std::string(who) + ": bad phase order");
  }
}

}  // namespace

double amplitude_pair_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("amplitude_pair_distance: vectors must have equal length");
  }
  double ip = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ip += a[i] * b[i];
  return clamped_sqrt(1.0 - ip * ip);
}

std::vector<CriticalDifference> critical_phase_differences(const BitAllocation& alloc) {
  check_phase_orders(alloc, "critical_phase_differences");
  const auto symbols = alloc.modulated_symbols();
  if (symbols.empty()) {
    throw EmptyPhaseError("critical_phase_differences: no symbol carries phase bits");
  }
  std::vector<CriticalDifference> out;
  for (int k : symbols) {
    CriticalDifference cd;
    cd.kind = CriticalDifference::Kind::PerSymbol;
    cd.index = k;
    cd.angles.assign(alloc.block_len, 0.0);
    cd.angles[k] = 2.0 * M_PI / static_cast<double>(1u << alloc.phase_bits[k]);
    out.push_back(std::move(cd));
  }
  for (int level : alloc.modulation_levels()) {
    CriticalDifference cd;
    cd.kind = CriticalDifference::Kind::PerLevel;
    cd.index = level;
    cd.angles.assign(alloc.block_len, 0.0);
    const double step = 2.0 * M_PI / static_cast<double>(1u << level);
    for (int i = 0; i < alloc.block_len; ++i) {
      if (alloc.phase_bits[i] >= level) cd.angles[i] = step;
    }
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const CriticalDifference& x) {
      return x.angles == cd.angles;
    });
    if (!duplicate) out.push_back(std::move(cd));
  }
  return out;
}

double phase_mcd_closed_form(const std::vector<double>& u, const BitAllocation& alloc) {
  check_phase_orders(alloc, "phase_mcd_closed_form");
  check_amplitude_vector(u, alloc.block_len, "phase_mcd_closed_form");
  const auto symbols = alloc.modulated_symbols();
  if (symbols.empty()) {
    throw EmptyPhaseError("phase_mcd_closed_form: no symbol carries phase bits");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k : symbols) {
    const double s = std::sin(M_PI / static_cast<double>(1u << alloc.phase_bits[k]));
    const double x = u[k] * u[k];
    best = std::min(best, 4.0 * x * (1.0 - x) * s * s);
  }
  for (int level : alloc.modulation_levels()) {
    const double s = std::sin(M_PI / static_cast<double>(1u << level));
    double below = 0.0;  // energy on symbols of order < level
    for (int i = 0; i < alloc.block_len; ++i) {
      if (alloc.phase_bits[i] < level) below += u[i] * u[i];
    }
    best = std::min(best, 4.0 * below * (1.0 - below) * s * s);
  }
  return clamped_sqrt(best);
}

double phase_mcd_bruteforce(const std::vector<double>& u, const BitAllocation& alloc) {
  check_phase_orders(alloc, "phase_mcd_bruteforce");
  check_amplitude_vector(u, alloc.block_len, "phase_mcd_bruteforce");
  if (alloc.modulated_symbols().empty()) {
    throw EmptyPhaseError("phase_mcd_bruteforce: no symbol carries phase bits");
  }
  if (alloc.phase_bit_total() > 16) {
    throw CapacityError("phase_mcd_bruteforce: more than 2^16 phase differences");
  }
  const int K = alloc.block_len;
  std::vector<int> idx(K, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    // advance odometer first so the all-zero identity tuple is skipped
    int k = K - 1;
    while (k >= 0) {
      if (++idx[k] < (1 << alloc.phase_bits[k])) break;
      idx[k--] = 0;
    }
    if (k < 0) break;
    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i < K; ++i) {
      const double phi = 2.0 * M_PI * idx[i] / static_cast<double>(1u << alloc.phase_bits[i]);
      acc += u[i] * u[i] * std::complex<double>{std::cos(phi), std::sin(phi)};
    }
    best = std::min(best, 1.0 - std::norm(acc));
  }
  return clamped_sqrt(best);
}

McdBreakdown mcd_decomposed_breakdown(const Codebook& cb) {
  cb.alloc.validate();
  McdBreakdown out;
  out.mcd = std::numeric_limits<double>::infinity();
  const auto& rows = cb.amplitudes.rows;
  for (std::size_t a = 0; a + 1 < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      const double d = amplitude_pair_distance(rows[a], rows[b]);
      if (d < out.mcd) {
        out.mcd = d;
        out.from_amplitude_pair = true;
        out.row_a = static_cast<int>(a);
        out.row_b = static_cast<int>(b);
      }
    }
  }
  if (!cb.alloc.modulated_symbols().empty()) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double d = phase_mcd_closed_form(rows[r], cb.alloc);
      if (d < out.mcd) {
        out.mcd = d;
        out.from_amplitude_pair = false;
        out.row_a = static_cast<int>(r);
        out.row_b = static_cast<int>(r);
      }
    }
  }
  if (!std::isfinite(out.mcd)) {
    throw std::invalid_argument("mcd_decomposed: degenerate allocation with a single point");
  }
  return out;
}

double mcd_decomposed(const Codebook& cb) { return mcd_decomposed_breakdown(cb).mcd; }

double mcd_upper_bound(const BitAllocation& alloc) {
  alloc.validate();
  const int K = alloc.block_len;
  double amp_term = std::numeric_limits<double>::infinity();
  if (K >= 2) {
    // log-gamma route keeps this stable for any supported K
    const double log_c = 0.5 * std::log(M_PI) + std::lgamma(0.5 * (K + 1)) - std::lgamma(0.5 * K);
    amp_term = std::exp((log_c - alloc.amp_bits * std::log(2.0)) / (K - 1));
  }
  const int lmax = alloc.max_phase_bits();
  if (lmax == 0) return amp_term;
  const double sin_term = std::sin(M_PI / static_cast<double>(1u << lmax));
  return std::min(amp_term, sin_term);
}

}  // namespace unicon
