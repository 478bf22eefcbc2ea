#include "unicon/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unicon/distance.hpp"
#include "unicon/parallel.hpp"
#include "unicon/rng.hpp"

namespace unicon {

namespace {

constexpr std::uint64_t kDesignStream = 0x6473676eULL;  // restart substream tag
constexpr double kBisectionTol = 1e-7;
constexpr double kFeasMargin = 1e-9;    // penalty pushes strictly inside
constexpr double kFeasTarget = 1e-10;   // accepted max constraint violation
constexpr int kMaxFeasIters = 2500;

using Matrix = std::vector<std::vector<double>>;
using Flat = std::vector<double>;  // rows*dim, row-major

Matrix normalized_rows(const Matrix& rows) {
  Matrix out = rows;
  for (auto& r : out) {
    double nsq = 0.0;
    for (double x : r) nsq += x * x;
    const double inv = 1.0 / std::sqrt(nsq);
    for (double& x : r) x *= inv;
  }
  return out;
}

double min_pair_distance(const Matrix& rows) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a + 1 < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      best = std::min(best, amplitude_pair_distance(rows[a], rows[b]));
    }
  }
  return best;
}

// True objective of a candidate set: min over pair distances and per-row
// phase MCDs (rows must be unit norm).
double exact_mcd(const Matrix& rows, const BitAllocation& alloc) {
  double best = std::numeric_limits<double>::infinity();
  if (rows.size() > 1) best = min_pair_distance(rows);
  if (!alloc.modulated_symbols().empty()) {
    for (const auto& r : rows) best = std::min(best, phase_mcd_closed_form(r, alloc));
  }
  return best;
}

struct PenaltyState {
  double penalty = 0.0;
  double max_violation = -std::numeric_limits<double>::infinity();
};

// Constraint data resolved into flat-index form so the inner loop runs
// allocation-free.
struct FlatProblem {
  const ConvexSubproblem& sp;
  int rows, dim;
  std::vector<std::vector<int>> cap_idx;  // column indices per cap
  Flat anchor;

  explicit FlatProblem(const ConvexSubproblem& s) : sp(s), rows(s.rows), dim(s.dim) {
    for (const auto& cap : s.caps) cap_idx.push_back(cap.indices);
    anchor.resize(static_cast<std::size_t>(rows) * dim);
    for (int r = 0; r < rows; ++r) {
      for (int i = 0; i < dim; ++i) anchor[r * dim + i] = s.anchor[r][i];
    }
  }
};

// Squared-hinge penalty of all constraints at fixed t. `grad`, when non-null,
// must be pre-sized and is overwritten; `max_violation` is the raw
// (margin-free) worst violation.
PenaltyState evaluate_penalty(const FlatProblem& fp, double t, const Flat& x, Flat* grad) {
  PenaltyState st;
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
  const int dim = fp.dim;
  for (int r = 0; r < fp.rows; ++r) {
    const double* xr = x.data() + r * dim;
    double* gr = grad ? grad->data() + r * dim : nullptr;
    for (std::size_t c = 0; c < fp.sp.caps.size(); ++c) {
      double s = 0.0;
      for (int i : fp.cap_idx[c]) s += xr[i] * xr[i];
      const double v = s - ConvexSubproblem::cap_rhs(t, fp.sp.caps[c].sin_sq);
      st.max_violation = std::max(st.max_violation, v);
      const double vm = v + kFeasMargin;
      if (vm > 0.0) {
        st.penalty += vm * vm;
        if (gr) {
          for (int i : fp.cap_idx[c]) gr[i] += 4.0 * vm * xr[i];
        }
      }
    }
    double nsq = 0.0;
    for (int i = 0; i < dim; ++i) nsq += xr[i] * xr[i];
    {
      const double v = nsq - 1.0;
      st.max_violation = std::max(st.max_violation, v);
      const double vm = v + kFeasMargin;
      if (vm > 0.0) {
        st.penalty += vm * vm;
        if (gr) {
          for (int i = 0; i < dim; ++i) gr[i] += 4.0 * vm * xr[i];
        }
      }
    }
    const double* ar = fp.anchor.data() + r * dim;
    double lin = 0.0;
    for (int i = 0; i < dim; ++i) lin += ar[i] * xr[i];
    {
      const double v = fp.sp.norm_rhs[r] - 2.0 * lin;
      st.max_violation = std::max(st.max_violation, v);
      const double vm = v + kFeasMargin;
      if (vm > 0.0) {
        st.penalty += vm * vm;
        if (gr) {
          for (int i = 0; i < dim; ++i) gr[i] -= 4.0 * vm * ar[i];
        }
      }
    }
  }
  for (const auto& pc : fp.sp.pairs) {
    const double* xa = x.data() + pc.a * dim;
    const double* xb = x.data() + pc.b * dim;
    double val = pc.alpha;
    for (int i = 0; i < dim; ++i) val += pc.grad_a[i] * xa[i] + pc.grad_b[i] * xb[i];
    const double v = val - (1.0 - t);
    st.max_violation = std::max(st.max_violation, v);
    const double vm = v + kFeasMargin;
    if (vm > 0.0) {
      st.penalty += vm * vm;
      if (grad) {
        double* ga = grad->data() + pc.a * dim;
        double* gb = grad->data() + pc.b * dim;
        for (int i = 0; i < dim; ++i) {
          ga[i] += 2.0 * vm * pc.grad_a[i];
          gb[i] += 2.0 * vm * pc.grad_b[i];
        }
      }
    }
  }
  return st;
}

// Projected gradient (clamp at zero) with Barzilai-Borwein steps and a
// halving fallback. The penalty is convex, so reaching zero certifies
// feasibility; a stall above the target certifies failure for this t.
bool solve_feasibility(const FlatProblem& fp, double t, Flat& x) {
  const std::size_t n = x.size();
  auto clamp = [n](Flat& v) {
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] < 0.0) v[i] = 0.0;
    }
  };
  clamp(x);
  Flat grad(n), new_grad(n), trial(n);
  PenaltyState st = evaluate_penalty(fp, t, x, &grad);
  double step = 1e-2;
  double plateau_ref = st.penalty;
  int plateau_at = 0;
  for (int iter = 0; iter < kMaxFeasIters; ++iter) {
    if (st.max_violation <= kFeasTarget) return true;
    if (st.penalty == 0.0) return st.max_violation <= kFeasTarget;
    // an infeasible probe settles on a positive penalty plateau; bail out
    if (iter - plateau_at >= 100) {
      if (plateau_ref - st.penalty < 1e-3 * plateau_ref) return false;
      plateau_ref = st.penalty;
      plateau_at = iter;
    }
    bool accepted = false;
    double s = step;
    PenaltyState trial_st;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - s * grad[i];
      clamp(trial);
      trial_st = evaluate_penalty(fp, t, trial, nullptr);
      if (trial_st.penalty < st.penalty) {
        accepted = true;
        break;
      }
      s *= 0.5;
      if (s < 1e-18) break;
    }
    if (!accepted) return st.max_violation <= kFeasTarget;
    trial_st = evaluate_penalty(fp, t, trial, &new_grad);
    // BB1 step from the accepted move
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ds = trial[i] - x[i];
      const double dy = new_grad[i] - grad[i];
      ss += ds * ds;
      sy += ds * dy;
    }
    step = (sy > 1e-300) ? std::clamp(ss / sy, 1e-12, 1e8) : s * 2.0;
    x.swap(trial);
    grad.swap(new_grad);
    st = trial_st;
  }
  return st.max_violation <= kFeasTarget;
}

AmplitudeSet to_amplitude_set(const Matrix& rows) {
  AmplitudeSet out;
  out.rows = rows;
  return out;
}

Matrix unflatten(const Flat& x, int rows, int dim) {
  Matrix out(rows, std::vector<double>(dim));
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < dim; ++i) out[r][i] = x[r * dim + i];
  }
  return out;
}

struct RestartOutcome {
  bool valid = false;
  double mcd = -1.0;
  Matrix rows;
  int sca_iterations = 0;
};

RestartOutcome run_restart(const BitAllocation& alloc, const DesignConfig& cfg,
                           std::uint64_t restart_index) {
  const int N = 1 << alloc.amp_bits;
  const int K = alloc.block_len;
  rng::Stream rs = rng::substream(cfg.seed, kDesignStream, restart_index);

  Matrix current(N, std::vector<double>(K, 0.0));
  for (auto& row : current) {
    for (double& v : row) v = std::abs(rs.gaussian());
  }
  current = normalized_rows(current);

  RestartOutcome out;
  out.rows = current;
  out.mcd = exact_mcd(current, alloc);

  double last_sub_t = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.sca_max_iters; ++it) {
    const ConvexSubproblem sp = build_subproblem(to_amplitude_set(current), alloc, cfg);
    const double exact_here = exact_mcd(current, alloc);
    const double hint = std::clamp(exact_here * exact_here * (1.0 - 1e-9), 0.0, sp.t_max);
    SubproblemSolution sol;
    try {
      sol = solve_subproblem(sp, cfg, hint);
    } catch (const SolverFailure&) {
      break;
    }
    out.sca_iterations = it;
    const Matrix next = normalized_rows(sol.point.rows);
    const double mcd_next = exact_mcd(next, alloc);
    if (mcd_next > out.mcd) {
      out.mcd = mcd_next;
      out.rows = next;
    }
    if (sol.t >= sp.t_max - 1e-12) break;  // at the cap; no room left
    if (!std::isnan(last_sub_t) && std::abs(sol.t - last_sub_t) < cfg.sca_tol) break;
    last_sub_t = sol.t;
    current = next;
  }
  // a set with near-coincident rows has true MCD ~0; drop the restart
  out.valid = N < 2 || min_pair_distance(out.rows) >= 1e-6;
  return out;
}

struct RankKey {
  long long bin;
  int amp_bits;
  double mcd;
  std::vector<int> phase_bits;
};

bool rank_before(const RankKey& x, const RankKey& y) {
  if (x.bin != y.bin) return x.bin > y.bin;
  if (x.amp_bits != y.amp_bits) return x.amp_bits < y.amp_bits;
  if (x.mcd != y.mcd) return x.mcd > y.mcd;
  return x.phase_bits < y.phase_bits;
}

}  // namespace

void DesignConfig::validate() const {
  if (!(epsilon_v > 0.0) || !(sca_tol > 0.0) || !(subproblem_tol > 0.0)) {
    throw std::invalid_argument("design config: tolerances must be positive");
  }
  if (sca_max_iters < 1 || restarts < 1) {
    throw std::invalid_argument("design config: iteration counts must be >= 1");
  }
}

double ConvexSubproblem::cap_rhs(double t, double sin_sq) {
  const double radicand = 1.0 - t / sin_sq;
  return (std::sqrt(radicand > 0.0 ? radicand : 0.0) + 1.0) * 0.5;
}

ConvexSubproblem build_subproblem(const AmplitudeSet& linearization, const BitAllocation& alloc,
                                  const DesignConfig& cfg) {
  alloc.validate();
  cfg.validate();
  const int N = 1 << alloc.amp_bits;
  const int K = alloc.block_len;
  if (linearization.count() != N) {
    throw std::invalid_argument("build_subproblem: linearization must hold 2^amp_bits rows");
  }
  ConvexSubproblem sp;
  sp.rows = N;
  sp.dim = K;
  sp.epsilon_v = cfg.epsilon_v;
  sp.anchor.reserve(N);
  for (const auto& row : linearization.rows) {
    if (static_cast<int>(row.size()) != K) {
      throw std::invalid_argument("build_subproblem: linearization row length mismatch");
    }
    double nsq = 0.0;
    for (double v : row) nsq += v * v;
    if (std::abs(nsq - 1.0) > 1e-6) {
      throw std::invalid_argument("build_subproblem: linearization rows must be unit norm");
    }
    sp.anchor.push_back(row);
    sp.norm_rhs.push_back(1.0 - cfg.epsilon_v + nsq);
  }

  sp.t_max = 1.0;
  auto add_cap = [&](std::vector<int> idx, double sin_val) {
    ConvexSubproblem::EnergyCap cap;
    cap.indices = std::move(idx);
    cap.sin_sq = sin_val * sin_val;
    sp.t_max = std::min(sp.t_max, cap.sin_sq);
    sp.caps.push_back(std::move(cap));
  };
  for (int k : alloc.modulated_symbols()) {
    const double s = std::sin(M_PI / static_cast<double>(1u << alloc.phase_bits[k]));
    std::vector<int> rest;
    for (int i = 0; i < K; ++i) {
      if (i != k) rest.push_back(i);
    }
    add_cap({k}, s);
    add_cap(std::move(rest), s);
  }
  for (int level : alloc.modulation_levels()) {
    const double s = std::sin(M_PI / static_cast<double>(1u << level));
    std::vector<int> below, above;
    for (int i = 0; i < K; ++i) {
      (alloc.phase_bits[i] < level ? below : above).push_back(i);
    }
    add_cap(std::move(below), s);
    add_cap(std::move(above), s);
  }

  for (int a = 0; a < N; ++a) {
    for (int b = a + 1; b < N; ++b) {
      double ip = 0.0;
      for (int i = 0; i < K; ++i) ip += sp.anchor[a][i] * sp.anchor[b][i];
      ConvexSubproblem::PairCut pc;
      pc.a = a;
      pc.b = b;
      pc.alpha = -3.0 * ip * ip;
      pc.grad_a.resize(K);
      pc.grad_b.resize(K);
      for (int i = 0; i < K; ++i) {
        pc.grad_a[i] = 2.0 * ip * sp.anchor[b][i];
        pc.grad_b[i] = 2.0 * ip * sp.anchor[a][i];
      }
      sp.pairs.push_back(std::move(pc));
    }
  }
  return sp;
}

SubproblemSolution solve_subproblem(const ConvexSubproblem& sp, const DesignConfig& cfg,
                                    double t_hint) {
  cfg.validate();
  const FlatProblem fp(sp);
  const Flat start = fp.anchor;

  // establish a feasible floor: the hint first, then t = 0
  double t_lo = -1.0;
  Flat x_lo;
  if (t_hint > 0.0 && t_hint < sp.t_max) {
    Flat x = start;
    if (solve_feasibility(fp, t_hint, x)) {
      t_lo = t_hint;
      x_lo = std::move(x);
    }
  }
  if (t_lo < 0.0) {
    Flat x = start;
    if (solve_feasibility(fp, 0.0, x)) {
      t_lo = 0.0;
      x_lo = std::move(x);
    } else {
      throw SolverFailure("subproblem feasibility failed even at t=0",
                          to_amplitude_set(sp.anchor), 0.0);
    }
  }

  // the norm cut keeps each step near the anchor, so the reachable t rarely
  // sits far above the floor: grow the bracket exponentially before bisecting
  double t_hi = sp.t_max;
  double inc = 64.0 * kBisectionTol;
  while (t_lo + inc < t_hi) {
    const double probe = t_lo + inc;
    Flat x = x_lo;
    if (solve_feasibility(fp, probe, x)) {
      t_lo = probe;
      x_lo = std::move(x);
      inc *= 4.0;
    } else {
      t_hi = probe;
      break;
    }
  }
  if (t_hi >= sp.t_max) {
    Flat x = x_lo;
    if (solve_feasibility(fp, sp.t_max, x)) {
      return {to_amplitude_set(unflatten(x, sp.rows, sp.dim)), sp.t_max};
    }
  }

  while (t_hi - t_lo > kBisectionTol) {
    const double mid = 0.5 * (t_lo + t_hi);
    Flat x = x_lo;
    if (solve_feasibility(fp, mid, x)) {
      t_lo = mid;
      x_lo = std::move(x);
    } else {
      t_hi = mid;
    }
  }
  return {to_amplitude_set(unflatten(x_lo, sp.rows, sp.dim)), t_lo};
}

Codebook design_amplitude_set(const BitAllocation& alloc, const DesignConfig& cfg, int threads) {
  alloc.validate();
  cfg.validate();
  if (alloc.amp_bits > 8) {
    throw std::invalid_argument("design_amplitude_set: at most 2^8 amplitude rows supported");
  }

  std::vector<RestartOutcome> outcomes(cfg.restarts);
  parallel_for(cfg.restarts, threads, [&](long long r) {
    outcomes[static_cast<std::size_t>(r)] =
        run_restart(alloc, cfg, static_cast<std::uint64_t>(r));
  });

  int winner = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    if (!outcomes[r].valid) continue;
    if (winner < 0 || outcomes[r].mcd > outcomes[winner].mcd) winner = r;
  }
  if (winner < 0) {
    throw DesignFailure("design_amplitude_set: every restart produced a degenerate amplitude set");
  }

  Codebook cb;
  cb.alloc = alloc;
  cb.amplitudes = to_amplitude_set(normalized_rows(outcomes[winner].rows));
  cb.metadata.seed = cfg.seed;
  cb.metadata.restarts = cfg.restarts;
  cb.metadata.sca_iterations = outcomes[winner].sca_iterations;
  cb.achieved_mcd = mcd_decomposed(cb);
  cb.validate();
  return cb;
}

std::vector<SearchEntry> search_bit_allocations(int block_len, int total_bits,
                                                const DesignConfig& cfg, int threads) {
  if (block_len < 2) throw std::invalid_argument("search: block length must be >= 2");
  if (total_bits < 1 || total_bits > 24) {
    throw std::invalid_argument("search: total bits must lie in [1, 24]");
  }
  cfg.validate();

  struct Candidate {
    BitAllocation alloc;
    double bound;
  };
  std::vector<Candidate> candidates;
  std::vector<int> phase(block_len, 0);
  auto emit = [&](int amp_bits) {
    BitAllocation a;
    a.block_len = block_len;
    a.amp_bits = amp_bits;
    a.phase_bits = phase;
    candidates.push_back({a, mcd_upper_bound(a)});
  };
  // non-decreasing phase orders over symbols 1..K-1 summing to total-amp
  auto gen = [&](auto&& self, int pos, int minimum, int remaining, int amp_bits) -> void {
    if (pos == block_len) {
      if (remaining == 0) emit(amp_bits);
      return;
    }
    for (int v = minimum; v <= remaining; ++v) {
      phase[pos] = v;
      self(self, pos + 1, v, remaining - v, amp_bits);
    }
    phase[pos] = 0;
  };
  for (int amp_bits = 0; amp_bits <= total_bits; ++amp_bits) {
    gen(gen, 1, 0, total_bits - amp_bits, amp_bits);
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.bound != y.bound) return x.bound > y.bound;
    if (x.alloc.amp_bits != y.alloc.amp_bits) return x.alloc.amp_bits < y.alloc.amp_bits;
    return x.alloc.phase_bits < y.alloc.phase_bits;
  });

  std::vector<SearchEntry> evaluated;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& cand : candidates) {
    if (cand.bound <= best) break;  // every remaining bound is no larger
    if (cand.alloc.amp_bits > 8) {
      throw CapacityError("search: an allocation above the 2^8-row design limit survived pruning");
    }
    SearchEntry entry;
    entry.alloc = cand.alloc;
    entry.upper_bound = cand.bound;
    entry.codebook = design_amplitude_set(cand.alloc, cfg, threads);
    best = std::max(best, entry.codebook.achieved_mcd);
    evaluated.push_back(std::move(entry));
  }

  std::sort(evaluated.begin(), evaluated.end(), [](const SearchEntry& x, const SearchEntry& y) {
    const RankKey kx{static_cast<long long>(std::floor(x.codebook.achieved_mcd * 1000.0 + 1e-12)),
                     x.alloc.amp_bits, x.codebook.achieved_mcd, x.alloc.phase_bits};
    const RankKey ky{static_cast<long long>(std::floor(y.codebook.achieved_mcd * 1000.0 + 1e-12)),
                     y.alloc.amp_bits, y.codebook.achieved_mcd, y.alloc.phase_bits};
    return rank_before(kx, ky);
  });
  return evaluated;
}

}  // namespace unicon
