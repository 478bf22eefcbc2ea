#pragma once
// Seeded Monte Carlo link simulation over SNR grids. Every trial draws its
// randomness from a substream keyed by (seed, grid point, trial index), so
// counts are reproducible bit-for-bit under any worker count, and different
// detectors at the same seed see common random numbers.
//
// SNR convention: the block has unit energy and each noise entry has
// variance sigma^2 = 10^(-snr_db/10); equivalently snr_db = -10*log10(sigma^2).

#include <cstdint>

#include "unicon/detectors.hpp"
#include "unicon/rng.hpp"
#include "unicon/types.hpp"

namespace unicon {

enum class DetectorKind { Ml, IuapPr, IuapImprovedPr, IuapExhaustivePhase };

const char* detector_name(DetectorKind kind);
DetectorKind detector_from_name(const std::string& name);  // throws std::invalid_argument

struct SimConfig {
  int antennas = 16;
  std::vector<double> snr_grid_db;
  DetectorKind detector = DetectorKind::Ml;
  long long min_block_errors = 200;
  long long max_trials_per_point = 10'000'000;
  std::uint64_t seed = 0;
  int iuap_max_iters = 10;

  void validate() const;
};

struct PointResult {
  double snr_db = 0.0;
  long long trials = 0;
  long long block_errors = 0;
  long long bit_errors = 0;
  double bler = 0.0;
  double ber = 0.0;
  double bler_ci_lo = 0.0;
  double bler_ci_hi = 0.0;
  double wall_seconds = 0.0;
};

struct SimResult {
  std::vector<PointResult> points;
};

// Sweep aborted mid-grid; completed points are retained.
class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& msg, SimResult partial)
      : std::runtime_error(msg), partial_result(std::move(partial)) {}

  SimResult partial_result;
};

// i.i.d. CN(0,1) channel vector.
std::vector<cplx> sample_channel(int antennas, rng::Stream& rs);

// Y = h v^T + N with CN(0, sigma2) noise entries, drawn column-major.
ReceivedBlock transmit(const Signal& v, const std::vector<cplx>& h, double sigma2,
                       rng::Stream& rs);

// Wilson 95% score interval for k successes in n trials.
std::pair<double, double> wilson_interval(long long k, long long n);

// Runs one SNR point until min_block_errors or max_trials, whichever comes
// first (checked at fixed 4096-trial batch boundaries so the stopping point
// is identical for any worker count).
PointResult run_point(const Codebook& cb, const SimConfig& cfg, double snr_db, int threads = 1);

SimResult run_sweep(const Codebook& cb, const SimConfig& cfg, int threads = 1);

// Fraction of trials, transmitting v_a, in which the GLRT statistic prefers
// v_b; ties count one half.
double pep_empirical(const Signal& v_a, const Signal& v_b, int antennas, double sigma2,
                     long long trials, std::uint64_t seed, int threads = 1);

}  // namespace unicon
