#include "unicon/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <variant>

#include "unicon/constellation.hpp"
#include "unicon/parallel.hpp"

namespace unicon {

namespace {

constexpr long long kBatch = 4096;

// Any detector behind one call signature; built once per point.
struct DetectorInstance {
  std::variant<ExhaustiveMlDetector, IuapDetector> impl;

  static DetectorInstance make(const Codebook& cb, const SimConfig& cfg) {
    switch (cfg.detector) {
      case DetectorKind::Ml:
        return {ExhaustiveMlDetector(cb)};
      case DetectorKind::IuapPr:
        return {IuapDetector(cb, PhaseAlg::Pr, cfg.iuap_max_iters)};
      case DetectorKind::IuapImprovedPr:
        return {IuapDetector(cb, PhaseAlg::ImprovedPr, cfg.iuap_max_iters)};
      case DetectorKind::IuapExhaustivePhase:
        return {IuapDetector(cb, PhaseAlg::Exhaustive, cfg.iuap_max_iters)};
    }
    throw std::invalid_argument("unknown detector kind");
  }

  DetectionOutcome detect(const GramMatrix& g) const {
    return std::visit([&](const auto& d) { return d.detect(g); }, impl);
  }
};

int find_point_index(const SimConfig& cfg, double snr_db) {
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    if (cfg.snr_grid_db[i] == snr_db) return static_cast<int>(i);
  }
  return 0;
}

PointResult run_point_indexed(const Codebook& cb, const SimConfig& cfg, double snr_db,
                              int point_index, int threads) {
  cb.validate();
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const double sigma2 = std::pow(10.0, -snr_db / 10.0);
  const int lv = cb.alloc.total_bits();
  const DetectorInstance det = DetectorInstance::make(cb, cfg);

  PointResult res;
  res.snr_db = snr_db;
  std::vector<std::uint8_t> block_err(kBatch);
  std::vector<int> bit_err(kBatch);
  while (res.trials < cfg.max_trials_per_point && res.block_errors < cfg.min_block_errors) {
    const long long n = std::min(kBatch, cfg.max_trials_per_point - res.trials);
    const long long base = res.trials;
    parallel_for(n, threads, [&](long long i) {
      rng::Stream rs = rng::substream(cfg.seed, static_cast<std::uint64_t>(point_index),
                                      static_cast<std::uint64_t>(base + i));
      MessageBits bits(lv);
      for (int b = 0; b < lv; ++b) bits[b] = static_cast<std::uint8_t>(rs.next() & 1u);
      const Signal v = encode(cb, bits);
      const std::vector<cplx> h = sample_channel(cfg.antennas, rs);
      const ReceivedBlock y = transmit(v, h, sigma2, rs);
      const DetectionOutcome out = det.detect(gram(y));
      int nbits = 0;
      for (int b = 0; b < lv; ++b) nbits += (out.bits[b] != bits[b]) ? 1 : 0;
      block_err[i] = nbits > 0 ? 1 : 0;
      bit_err[i] = nbits;
    });
    for (long long i = 0; i < n; ++i) {
      res.block_errors += block_err[i];
      res.bit_errors += bit_err[i];
    }
    res.trials += n;
  }
  res.bler = res.trials > 0 ? static_cast<double>(res.block_errors) / res.trials : 0.0;
  res.ber = res.trials > 0 ? static_cast<double>(res.bit_errors) / (res.trials * double(lv)) : 0.0;
  std::tie(res.bler_ci_lo, res.bler_ci_hi) = wilson_interval(res.block_errors, res.trials);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace

const char* detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Ml:
      return "ml";
    case DetectorKind::IuapPr:
      return "iuap-pr";
    case DetectorKind::IuapImprovedPr:
      return "iuap-improved-pr";
    case DetectorKind::IuapExhaustivePhase:
      return "iuap-exhaustive-phase";
  }
  return "unknown";
}

DetectorKind detector_from_name(const std::string& name) {
  if (name == "ml") return DetectorKind::Ml;
  if (name == "iuap-pr") return DetectorKind::IuapPr;
  if (name == "iuap-improved-pr") return DetectorKind::IuapImprovedPr;
  if (name == "iuap-exhaustive-phase") return DetectorKind::IuapExhaustivePhase;
  throw std::invalid_argument("unknown detector: " + name);
}

void SimConfig::validate() const {
  if (antennas < 1) throw std::invalid_argument("sim config: antennas must be >= 1");
  if (min_block_errors < 1) throw std::invalid_argument("sim config: min block errors must be >= 1");
  if (max_trials_per_point < 1) throw std::invalid_argument("sim config: max trials must be >= 1");
  if (iuap_max_iters < 1) throw std::invalid_argument("sim config: iuap iterations must be >= 1");
}

std::vector<cplx> sample_channel(int antennas, rng::Stream& rs) {
  std::vector<cplx> h(antennas);
  for (auto& x : h) x = rs.cgaussian(1.0);
  return h;
}

ReceivedBlock transmit(const Signal& v, const std::vector<cplx>& h, double sigma2,
                       rng::Stream& rs) {
  if (sigma2 < 0.0) throw std::invalid_argument("transmit: sigma2 must be non-negative");
  ReceivedBlock y;
  y.antennas = static_cast<int>(h.size());
  y.block_len = static_cast<int>(v.size());
  y.samples.resize(static_cast<std::size_t>(y.antennas) * y.block_len);
  for (int k = 0; k < y.block_len; ++k) {
    for (int m = 0; m < y.antennas; ++m) {
      cplx sample = h[m] * v[k];
      if (sigma2 > 0.0) sample += rs.cgaussian(sigma2);
      y.samples[static_cast<std::size_t>(k) * y.antennas + m] = sample;
    }
  }
  return y;
}

std::pair<double, double> wilson_interval(long long k, long long n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double p = static_cast<double>(k) / n;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * double(n) * n)) / denom;
  const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = k == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

PointResult run_point(const Codebook& cb, const SimConfig& cfg, double snr_db, int threads) {
  return run_point_indexed(cb, cfg, snr_db, find_point_index(cfg, snr_db), threads);
}

SimResult run_sweep(const Codebook& cb, const SimConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.snr_grid_db.empty()) throw std::invalid_argument("run_sweep: empty SNR grid");
  SimResult out;
  for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
    try {
      out.points.push_back(
          run_point_indexed(cb, cfg, cfg.snr_grid_db[i], static_cast<int>(i), threads));
    } catch (const std::exception& e) {
      throw SweepError(std::string("sweep failed at point ") + std::to_string(i) + ": " + e.what(),
                       out);
    }
  }
  return out;
}

double pep_empirical(const Signal& v_a, const Signal& v_b, int antennas, double sigma2,
                     long long trials, std::uint64_t seed, int threads) {
  if (antennas < 1 || trials < 1) throw std::invalid_argument("pep_empirical: bad arguments");
  if (v_a.size() != v_b.size()) throw std::invalid_argument("pep_empirical: length mismatch");
  if (chordal_distance(v_a, v_b) <= 0.0) {
    throw std::invalid_argument("pep_empirical: the pair must have positive chordal distance");
  }
  std::vector<double> wins(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](long long i) {
    rng::Stream rs = rng::substream(seed, 0, static_cast<std::uint64_t>(i));
    const std::vector<cplx> h = sample_channel(antennas, rs);
    const ReceivedBlock y = transmit(v_a, h, sigma2, rs);
    const GramMatrix g = gram(y);
    const double sa = ml_statistic(g, v_a);
    const double sb = ml_statistic(g, v_b);
    wins[i] = sb > sa ? 1.0 : (sb == sa ? 0.5 : 0.0);
  });
  double total = 0.0;
  for (double w : wins) total += w;
  return total / static_cast<double>(trials);
}

}  // namespace unicon
