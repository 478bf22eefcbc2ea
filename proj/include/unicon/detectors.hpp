#pragma once
// Receivers: exhaustive ML/GLRT, amplitude detection, reliability-sorted
// decision-feedback phase detection (plain and improved), and the iterative
// amplitude-phase detector that alternates the two.

#include "unicon/types.hpp"

namespace unicon {

// Received baseband block, column-major: samples[k*antennas + m].
struct ReceivedBlock {
  int antennas = 0;
  int block_len = 0;
  std::vector<cplx> samples;

  cplx at(int m, int k) const { return samples[static_cast<std::size_t>(k) * antennas + m]; }
};

// K-by-K Hermitian sufficient statistic Y^H Y (row-major).
struct GramMatrix {
  int size = 0;
  std::vector<cplx> entries;

  cplx at(int i, int j) const { return entries[static_cast<std::size_t>(i) * size + j]; }
};

GramMatrix gram(const ReceivedBlock& y);

// Z = G entrywise-scaled by u u^T (the fixed-amplitude statistic).
GramMatrix scale_by_amplitude(const GramMatrix& g, const std::vector<double>& u);

// v^T G v^*; real for Hermitian G (the GLRT statistic |Y^H v|^2).
double ml_statistic(const GramMatrix& g, const Signal& v);

struct DetectionOutcome {
  int amp_index = 0;
  std::vector<int> phase_indices;
  MessageBits bits;
  int iterations = 0;
  double objective = 0.0;
};

// Fields of a message block addressed by indices.
struct PointIndices {
  int amp_index = 0;
  std::vector<int> phase_indices;
};
PointIndices indices_from_bits(const BitAllocation& alloc, const MessageBits& bits);

// Exhaustive search over all constellation points; the candidate table is
// built once at construction so per-block detection is a pure statistic scan.
class ExhaustiveMlDetector {
 public:
  explicit ExhaustiveMlDetector(const Codebook& cb);
  DetectionOutcome detect(const GramMatrix& g) const;

 private:
  Codebook cb_;
  std::vector<Signal> points_;  // in encoded bit-string order
};

// One-shot form; ties break toward the smallest encoded index.
DetectionOutcome ml_exhaustive(const GramMatrix& g, const Codebook& cb);

// argmax over amplitude rows of the quadratic form with the phases fixed.
int detect_amplitude(const GramMatrix& g, const Signal& phase, const Codebook& cb);

// Decision feedback: sum of committed-symbol contributions toward symbol d.
cplx mu_feedback(const GramMatrix& z, const std::vector<std::pair<int, double>>& detected, int d);

// Nearest and second-nearest PSK point to the angle of mu. On the exact
// midpoint the smaller index wins; for mu == 0 the choice is index 0 with
// the counter-clockwise neighbor second.
struct PskDecision {
  int best_index = 0;
  int second_index = 0;
  double best_angle = 0.0;
  double second_angle = 0.0;
};
PskDecision psk_decision(cplx mu, int order_bits);

// max over the order-2^order_bits_q PSK set of Re{z e^{j(phi_d - phi_q)}}.
double eta(cplx z_dq, double phi_d, int order_bits_q);

// Phase decisions (PSK indices per symbol) given the amplitude-scaled Gram.
std::vector<int> pr_sort_dfdd(const GramMatrix& z, const BitAllocation& alloc);
std::vector<int> improved_pr_sort_dfdd(const GramMatrix& z, const BitAllocation& alloc);

enum class PhaseAlg { Pr, ImprovedPr, Exhaustive };

// Iterative amplitude-phase detection. Updates are accepted only while the
// joint objective strictly increases, which bounds the iteration count even
// with approximate phase steps.
class IuapDetector {
 public:
  IuapDetector(const Codebook& cb, PhaseAlg alg, int max_iters = 10);
  DetectionOutcome detect(const GramMatrix& g) const;

 private:
  Codebook cb_;
  PhaseAlg alg_;
  int max_iters_;
  std::vector<std::vector<cplx>> tables_;  // PSK points per symbol
};

DetectionOutcome iuap(const GramMatrix& g, const Codebook& cb, PhaseAlg alg, int max_iters = 10);

}  // namespace unicon
