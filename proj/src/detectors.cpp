#include "unicon/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unicon/constellation.hpp"
#include "unicon/kernels.hpp"

namespace unicon {

namespace {

// PSK point table for one modulation order.
std::vector<cplx> psk_table(int order_bits) {
  const int n = 1 << order_bits;
  std::vector<cplx> table(n);
  for (int i = 0; i < n; ++i) {
    const double phi = psk_angle(i, order_bits);
    table[i] = {std::cos(phi), std::sin(phi)};
  }
  return table;
}

std::vector<std::vector<cplx>> phase_tables(const BitAllocation& alloc) {
  std::vector<std::vector<cplx>> tables(alloc.block_len);
  for (int k = 0; k < alloc.block_len; ++k) tables[k] = psk_table(alloc.phase_bits[k]);
  return tables;
}

// Shared state of both sorted decision-feedback detectors.
struct DfddState {
  const GramMatrix& z;
  const BitAllocation& alloc;
  const std::vector<std::vector<cplx>>& tables;
  std::vector<cplx> mu;              // feedback sums, kept incrementally
  std::vector<int> decisions;
  std::vector<char> committed;
  std::vector<int> pending;          // undetected data symbols, ascending

  DfddState(const GramMatrix& zz, const BitAllocation& al,
            const std::vector<std::vector<cplx>>& tb)
      : z(zz), alloc(al), tables(tb), mu(al.block_len, cplx{0.0, 0.0}),
        decisions(al.block_len, 0), committed(al.block_len, 0) {
    if (z.size != al.block_len) {
      throw std::invalid_argument("dfdd: statistic size must match the block length");
    }
    // symbols without phase bits carry the reference phase and are committed
    // up front, starting with symbol 0
    for (int k = 0; k < al.block_len; ++k) {
      if (al.phase_bits[k] == 0) {
        commit(k, 0);
      } else {
        pending.push_back(k);
      }
    }
  }

  void commit(int k, int point) {
    decisions[k] = point;
    committed[k] = 1;
    const cplx phasor = tables[k][point];
    for (int d = 0; d < alloc.block_len; ++d) {
      if (!committed[d]) mu[d] += z.at(k, d) * phasor;
    }
  }
};

double quad_form_phase(const GramMatrix& z, const std::vector<cplx>& p) {
  double acc = 0.0;
  const int n = z.size;
  for (int i = 0; i < n; ++i) {
    acc += z.at(i, i).real();
    for (int j = i + 1; j < n; ++j) acc += 2.0 * std::real(z.at(i, j) * p[i] * std::conj(p[j]));
  }
  return acc;
}

// Exhaustive maximization of the fixed-amplitude statistic over all phase
// tuples, lexicographic tie-break toward smaller indices.
std::vector<int> exhaustive_phase(const GramMatrix& z, const BitAllocation& alloc) {
  if (alloc.phase_bit_total() > 20) {
    throw CapacityError("exhaustive phase detection: more than 2^20 tuples");
  }
  const auto tables = phase_tables(alloc);
  const int K = alloc.block_len;
  std::vector<int> idx(K, 0), best_idx(K, 0);
  std::vector<cplx> p(K);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (int k = 0; k < K; ++k) p[k] = tables[k][idx[k]];
    const double val = quad_form_phase(z, p);
    if (val > best) {
      best = val;
      best_idx = idx;
    }
    int k = K - 1;
    while (k >= 0) {
      if (++idx[k] < (1 << alloc.phase_bits[k])) break;
      idx[k--] = 0;
    }
    if (k < 0) break;
  }
  return best_idx;
}

}  // namespace

GramMatrix gram(const ReceivedBlock& y) {
  if (y.antennas < 1 || y.block_len < 1 ||
      y.samples.size() != static_cast<std::size_t>(y.antennas) * y.block_len) {
    throw std::invalid_argument("gram: malformed received block");
  }
  GramMatrix g;
  g.size = y.block_len;
  g.entries.resize(static_cast<std::size_t>(y.block_len) * y.block_len);
  kernels::gram(y.samples.data(), y.antennas, y.block_len, g.entries.data());
  return g;
}

GramMatrix scale_by_amplitude(const GramMatrix& g, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != g.size) {
    throw std::invalid_argument("scale_by_amplitude: dimension mismatch");
  }
  GramMatrix z;
  z.size = g.size;
  z.entries.resize(g.entries.size());
  for (int i = 0; i < g.size; ++i) {
    for (int j = 0; j < g.size; ++j) {
      z.entries[static_cast<std::size_t>(i) * g.size + j] = g.at(i, j) * (u[i] * u[j]);
    }
  }
  return z;
}

double ml_statistic(const GramMatrix& g, const Signal& v) {
  if (static_cast<int>(v.size()) != g.size) {
    throw std::invalid_argument("ml_statistic: dimension mismatch");
  }
  double acc = 0.0;
  for (int i = 0; i < g.size; ++i) {
    acc += g.at(i, i).real() * std::norm(v[i]);
    for (int j = i + 1; j < g.size; ++j) {
      acc += 2.0 * std::real(g.at(i, j) * v[i] * std::conj(v[j]));
    }
  }
  return acc;
}

PointIndices indices_from_bits(const BitAllocation& alloc, const MessageBits& bits) {
  if (static_cast<int>(bits.size()) != alloc.total_bits()) {
    throw std::invalid_argument("indices_from_bits: bit string length mismatch");
  }
  PointIndices out;
  std::size_t pos = 0;
  for (int i = 0; i < alloc.amp_bits; ++i) out.amp_index = (out.amp_index << 1) | bits[pos++];
  out.phase_indices.resize(alloc.block_len, 0);
  for (int k = 0; k < alloc.block_len; ++k) {
    std::uint32_t raw = 0;
    for (int i = 0; i < alloc.phase_bits[k]; ++i) raw = (raw << 1) | bits[pos++];
    out.phase_indices[k] = static_cast<int>(gray_decode(raw));
  }
  return out;
}

ExhaustiveMlDetector::ExhaustiveMlDetector(const Codebook& cb) : cb_(cb) {
  const int lv = cb_.alloc.total_bits();
  if (lv > 20) throw CapacityError("ml detector: more than 2^20 constellation points");
  const std::size_t count = std::size_t{1} << lv;
  points_.reserve(count);
  MessageBits bits(lv, 0);
  for (std::size_t word = 0; word < count; ++word) {
    for (int i = 0; i < lv; ++i) bits[i] = static_cast<std::uint8_t>((word >> (lv - 1 - i)) & 1u);
    points_.push_back(encode(cb_, bits));
  }
}

DetectionOutcome ExhaustiveMlDetector::detect(const GramMatrix& g) const {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_word = 0;
  for (std::size_t w = 0; w < points_.size(); ++w) {
    const double val = ml_statistic(g, points_[w]);
    if (val > best) {
      best = val;
      best_word = w;
    }
  }
  const int lv = cb_.alloc.total_bits();
  MessageBits bits(lv, 0);
  for (int i = 0; i < lv; ++i) bits[i] = static_cast<std::uint8_t>((best_word >> (lv - 1 - i)) & 1u);
  const PointIndices idx = indices_from_bits(cb_.alloc, bits);
  return {idx.amp_index, idx.phase_indices, bits, 1, best};
}

DetectionOutcome ml_exhaustive(const GramMatrix& g, const Codebook& cb) {
  return ExhaustiveMlDetector(cb).detect(g);
}

int detect_amplitude(const GramMatrix& g, const Signal& phase, const Codebook& cb) {
  const int K = cb.alloc.block_len;
  if (static_cast<int>(phase.size()) != K || g.size != K) {
    throw std::invalid_argument("detect_amplitude: dimension mismatch");
  }
  // real weights of the amplitude quadratic form with phases fixed
  std::vector<double> w(static_cast<std::size_t>(K) * K);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      w[static_cast<std::size_t>(i) * K + j] = std::real(g.at(i, j) * phase[i] * std::conj(phase[j]));
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  int best_row = 0;
  for (int r = 0; r < cb.amplitudes.count(); ++r) {
    const auto& u = cb.amplitudes.rows[r];
    double val = 0.0;
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < K; ++j) val += w[static_cast<std::size_t>(i) * K + j] * u[i] * u[j];
    }
    if (val > best) {
      best = val;
      best_row = r;
    }
  }
  return best_row;
}

cplx mu_feedback(const GramMatrix& z, const std::vector<std::pair<int, double>>& detected, int d) {
  if (detected.empty()) {
    throw std::logic_error("mu_feedback: the detected set must contain the reference symbol");
  }
  cplx acc{0.0, 0.0};
  for (const auto& [k, phi] : detected) {
    if (k == d) throw std::invalid_argument("mu_feedback: symbol already detected");
    acc += z.at(k, d) * cplx{std::cos(phi), std::sin(phi)};
  }
  return acc;
}

PskDecision psk_decision(cplx mu, int order_bits) {
  if (order_bits < 1) throw std::invalid_argument("psk_decision: order must be >= 1");
  const int n = 1 << order_bits;
  const double angle = std::atan2(mu.imag(), mu.real());
  double x = angle * static_cast<double>(n) / (2.0 * M_PI);
  x = std::fmod(x, static_cast<double>(n));
  if (x < 0.0) x += static_cast<double>(n);
  // round-half-down tie rule; the midpoint goes to the smaller index
  const double raw = std::ceil(x - 0.5);
  const double delta = x - raw;
  const int best = static_cast<int>(raw) % n;
  // second-closest lies on the side of the angle; exactly-on-point picks the
  // counter-clockwise neighbor (covers mu == 0 as well)
  const int second = (delta >= 0.0) ? (best + 1) % n : (best + n - 1) % n;
  PskDecision out;
  out.best_index = best;
  out.second_index = second;
  out.best_angle = psk_angle(best, order_bits);
  out.second_angle = psk_angle(second, order_bits);
  return out;
}

double eta(cplx z_dq, double phi_d, int order_bits_q) {
  if (order_bits_q < 1) throw std::invalid_argument("eta: order must be >= 1");
  const int n = 1 << order_bits_q;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double theta = phi_d - psk_angle(i, order_bits_q);
    best = std::max(best, z_dq.real() * std::cos(theta) - z_dq.imag() * std::sin(theta));
  }
  return best;
}

static std::vector<int> pr_sort_dfdd_with_tables(
    const GramMatrix& z, const BitAllocation& alloc,
    const std::vector<std::vector<cplx>>& tables) {
  DfddState st(z, alloc, tables);
  while (!st.pending.empty()) {
    double best_r = -std::numeric_limits<double>::infinity();
    int best_pos = 0;
    int best_point = 0;
    for (std::size_t p = 0; p < st.pending.size(); ++p) {
      const int d = st.pending[p];
      const PskDecision dec = psk_decision(st.mu[d], alloc.phase_bits[d]);
      const double r = std::real(st.mu[d] * std::conj(st.tables[d][dec.best_index])) -
                       std::real(st.mu[d] * std::conj(st.tables[d][dec.second_index]));
      if (r > best_r) {
        best_r = r;
        best_pos = static_cast<int>(p);
        best_point = dec.best_index;
      }
    }
    st.commit(st.pending[best_pos], best_point);
    st.pending.erase(st.pending.begin() + best_pos);
  }
  return st.decisions;
}

static std::vector<int> improved_pr_sort_dfdd_with_tables(
    const GramMatrix& z, const BitAllocation& alloc,
    const std::vector<std::vector<cplx>>& tables) {
  DfddState st(z, alloc, tables);
  const int K = alloc.block_len;

  // eta over (higher-order d, lower-order q, candidate point of d), flat
  // layout; filled once up front, consumed while q stays undetected.
  // Phasor products from the tables stand in for per-point trigonometry.
  std::vector<int> eta_base(static_cast<std::size_t>(K) * K, -1);
  std::vector<double> eta_val;
  for (int d = 0; d < K; ++d) {
    if (alloc.phase_bits[d] == 0) continue;
    const int n = 1 << alloc.phase_bits[d];
    for (int q = 0; q < K; ++q) {
      if (q == d || alloc.phase_bits[q] == 0 || alloc.phase_bits[q] >= alloc.phase_bits[d]) {
        continue;
      }
      eta_base[d * K + q] = static_cast<int>(eta_val.size());
      const int nq = 1 << alloc.phase_bits[q];
      for (int i = 0; i < n; ++i) {
        const cplx zi = z.at(d, q) * tables[d][i];
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < nq; ++j) best = std::max(best, std::real(zi * std::conj(tables[q][j])));
        eta_val.push_back(best);
      }
    }
  }

  std::vector<double> metric(std::size_t{1} << alloc.max_phase_bits());
  while (!st.pending.empty()) {
    double best_r = -std::numeric_limits<double>::infinity();
    int best_pos = 0;
    int best_point = 0;
    for (std::size_t p = 0; p < st.pending.size(); ++p) {
      const int d = st.pending[p];
      bool have_helper = false;
      for (int q : st.pending) {
        if (q != d && alloc.phase_bits[q] < alloc.phase_bits[d]) {
          have_helper = true;
          break;
        }
      }
      int cand_best, cand_second;
      double r;
      if (!have_helper) {
        // empty correction sum: identical to the plain decision rule
        const PskDecision dec = psk_decision(st.mu[d], alloc.phase_bits[d]);
        cand_best = dec.best_index;
        cand_second = dec.second_index;
        r = std::real(st.mu[d] * std::conj(st.tables[d][cand_best])) -
            std::real(st.mu[d] * std::conj(st.tables[d][cand_second]));
      } else {
        const int n = 1 << alloc.phase_bits[d];
        for (int i = 0; i < n; ++i) metric[i] = std::real(st.mu[d] * std::conj(st.tables[d][i]));
        for (int q : st.pending) {
          if (q == d || alloc.phase_bits[q] >= alloc.phase_bits[d]) continue;
          const int base = eta_base[d * K + q];
          for (int i = 0; i < n; ++i) metric[i] += eta_val[base + i];
        }
        cand_best = 0;
        for (int i = 1; i < n; ++i) {
          if (metric[i] > metric[cand_best]) cand_best = i;
        }
        cand_second = cand_best == 0 ? 1 : 0;
        for (int i = 0; i < n; ++i) {
          if (i != cand_best && metric[i] > metric[cand_second]) cand_second = i;
        }
        r = metric[cand_best] - metric[cand_second];
      }
      if (r > best_r) {
        best_r = r;
        best_pos = static_cast<int>(p);
        best_point = cand_best;
      }
    }
    st.commit(st.pending[best_pos], best_point);
    st.pending.erase(st.pending.begin() + best_pos);
  }
  return st.decisions;
}

std::vector<int> pr_sort_dfdd(const GramMatrix& z, const BitAllocation& alloc) {
  alloc.validate();
  return pr_sort_dfdd_with_tables(z, alloc, phase_tables(alloc));
}

std::vector<int> improved_pr_sort_dfdd(const GramMatrix& z, const BitAllocation& alloc) {
  alloc.validate();
  return improved_pr_sort_dfdd_with_tables(z, alloc, phase_tables(alloc));
}

IuapDetector::IuapDetector(const Codebook& cb, PhaseAlg alg, int max_iters)
    : cb_(cb), alg_(alg), max_iters_(max_iters), tables_(phase_tables(cb.alloc)) {
  if (max_iters_ < 1) throw std::invalid_argument("iuap: max_iters must be >= 1");
  if (alg_ == PhaseAlg::Exhaustive && cb_.alloc.phase_bit_total() > 20) {
    throw CapacityError("iuap: exhaustive phase detection above the 2^20 guard");
  }
}

DetectionOutcome IuapDetector::detect(const GramMatrix& g) const {
  const BitAllocation& alloc = cb_.alloc;
  const int K = alloc.block_len;
  if (g.size != K) throw std::invalid_argument("iuap: statistic size mismatch");

  // initial amplitude from the phase-free energy statistic (diagonal only)
  int amp = 0;
  {
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < cb_.amplitudes.count(); ++r) {
      double val = 0.0;
      for (int k = 0; k < K; ++k) {
        val += g.at(k, k).real() * cb_.amplitudes.rows[r][k] * cb_.amplitudes.rows[r][k];
      }
      if (val > best) {
        best = val;
        amp = r;
      }
    }
  }

  DetectionOutcome out;
  out.amp_index = amp;
  out.phase_indices.assign(K, 0);
  double best_obj = -std::numeric_limits<double>::infinity();
  int accepted = 0;
  GramMatrix z;
  z.size = K;
  z.entries.resize(static_cast<std::size_t>(K) * K);
  Signal p(K);
  for (int it = 1; it <= max_iters_; ++it) {
    const auto& u = cb_.amplitudes.rows[amp];
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < K; ++j) {
        z.entries[static_cast<std::size_t>(i) * K + j] = g.at(i, j) * (u[i] * u[j]);
      }
    }
    std::vector<int> phases;
    switch (alg_) {
      case PhaseAlg::Pr:
        phases = pr_sort_dfdd_with_tables(z, alloc, tables_);
        break;
      case PhaseAlg::ImprovedPr:
        phases = improved_pr_sort_dfdd_with_tables(z, alloc, tables_);
        break;
      case PhaseAlg::Exhaustive:
        phases = exhaustive_phase(z, alloc);
        break;
    }
    for (int k = 0; k < K; ++k) p[k] = tables_[k][phases[k]];
    const int amp_next = detect_amplitude(g, p, cb_);
    const double obj = ml_statistic(g, signal_from_indices(cb_, amp_next, phases));
    if (obj <= best_obj) break;  // non-improving update: stop at the last accepted decision
    best_obj = obj;
    out.amp_index = amp_next;
    out.phase_indices = std::move(phases);
    accepted = it;
    amp = amp_next;
  }
  out.iterations = accepted;
  out.objective = accepted > 0
                      ? best_obj
                      : ml_statistic(g, signal_from_indices(cb_, out.amp_index, out.phase_indices));
  out.bits = decode_indices_to_bits(cb_, out.amp_index, out.phase_indices);
  return out;
}

DetectionOutcome iuap(const GramMatrix& g, const Codebook& cb, PhaseAlg alg, int max_iters) {
  return IuapDetector(cb, alg, max_iters).detect(g);
}

}  // namespace unicon
