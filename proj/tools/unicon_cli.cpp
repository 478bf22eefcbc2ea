// Command-line front end: design codebooks, search bit allocations, analyze
// distances and bounds, and run link simulations.
//
// Exit codes: 0 success, 2 invalid arguments or malformed input files,
// 3 design/simulation failure.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unicon/constellation.hpp"
#include "unicon/designer.hpp"
#include "unicon/distance.hpp"
#include "unicon/io.hpp"
#include "unicon/sim.hpp"

namespace {

using namespace unicon;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad integer list: " + text);
    out.push_back(v);
  }
  return out;
}

struct DesignArgs {
  int block_len = 3;
  int total_bits = -1;
  int amp_bits = -1;
  std::string phase_bits;
  int restarts = 16;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;
};

int cmd_design(const DesignArgs& args) {
  DesignConfig cfg;
  cfg.restarts = args.restarts;
  cfg.seed = args.seed;

  Codebook cb;
  if (!args.phase_bits.empty()) {
    BitAllocation alloc;
    alloc.block_len = args.block_len;
    alloc.amp_bits = args.amp_bits >= 0 ? args.amp_bits : 0;
    alloc.phase_bits = parse_int_list(args.phase_bits);
    alloc.validate();
    cb = design_amplitude_set(alloc, cfg, args.threads);
  } else if (args.total_bits >= 0) {
    const auto ranked = search_bit_allocations(args.block_len, args.total_bits, cfg, args.threads);
    if (ranked.empty()) throw DesignFailure("search produced no designs");
    cb = ranked.front().codebook;
  } else {
    throw std::invalid_argument("design needs either --lphi (with --lu) or --lv");
  }

  write_codebook_file(cb, args.out_path);
  std::printf("achieved_mcd %.9f\n", cb.achieved_mcd);
  std::printf("mcd_upper_bound %.9f\n", mcd_upper_bound(cb.alloc));
  std::printf("wrote %s\n", args.out_path.c_str());
  return kExitOk;
}

struct SearchArgs {
  int block_len = 3;
  int total_bits = 1;
  int restarts = 16;
  std::uint64_t seed = 0;
  int threads = 1;
};

int cmd_search_alloc(const SearchArgs& args) {
  DesignConfig cfg;
  cfg.restarts = args.restarts;
  cfg.seed = args.seed;
  const auto ranked = search_bit_allocations(args.block_len, args.total_bits, cfg, args.threads);
  std::printf("%-6s %-6s %-16s %-12s %-12s\n", "rank", "lu", "lphi", "mcd", "bound");
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::string lphi;
    for (std::size_t k = 0; k < ranked[i].alloc.phase_bits.size(); ++k) {
      if (k) lphi += ",";
      lphi += std::to_string(ranked[i].alloc.phase_bits[k]);
    }
    std::printf("%-6zu %-6d %-16s %-12.9f %-12.9f\n", i + 1, ranked[i].alloc.amp_bits,
                lphi.c_str(), ranked[i].codebook.achieved_mcd, ranked[i].upper_bound);
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string codebook_path;
  double snr_db = 10.0;
  int antennas = 16;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const Codebook cb = read_codebook_file(args.codebook_path);
  const McdBreakdown breakdown = mcd_decomposed_breakdown(cb);
  std::printf("K %d  l_u %d  l_v %d\n", cb.alloc.block_len, cb.alloc.amp_bits,
              cb.alloc.total_bits());
  std::printf("mcd_closed_form %.9f\n", breakdown.mcd);
  if (cb.alloc.total_bits() <= 16) {
    std::printf("mcd_bruteforce %.9f\n", mcd_bruteforce(cb));
  }
  std::printf("mcd_upper_bound %.9f\n", mcd_upper_bound(cb.alloc));
  if (breakdown.from_amplitude_pair) {
    std::printf("min_distance_pair amplitude rows %d,%d\n", breakdown.row_a, breakdown.row_b);
  } else {
    std::printf("min_distance_pair phase pair within row %d\n", breakdown.row_a);
  }
  if (!cb.alloc.modulated_symbols().empty()) {
    // pilot-style reference: the same PSK orders on a flat amplitude profile
    std::vector<double> uniform(cb.alloc.block_len,
                                1.0 / std::sqrt(double(cb.alloc.block_len)));
    std::printf("pilot_psk_mcd %.9f\n", phase_mcd_closed_form(uniform, cb.alloc));
  }
  const double sigma2 = std::pow(10.0, -args.snr_db / 10.0);
  std::printf("pep_chernoff_bound(min pair, %.3f dB, M=%d) %.9g\n", args.snr_db, args.antennas,
              pep_chernoff_bound(breakdown.mcd, sigma2, args.antennas));
  return kExitOk;
}

struct SimulateArgs {
  std::string codebook_path;
  std::string detector = "ml";
  double snr_start = 0.0;
  double snr_stop = 10.0;
  double snr_step = 1.0;
  int antennas = 16;
  std::uint64_t seed = 0;
  long long min_errors = 200;
  long long max_trials = 10'000'000;
  int iuap_iters = 10;
  int threads = 1;
  std::string out_path;
};

int cmd_simulate(const SimulateArgs& args) {
  const Codebook cb = read_codebook_file(args.codebook_path);
  SimConfig cfg;
  cfg.antennas = args.antennas;
  cfg.detector = detector_from_name(args.detector);
  cfg.min_block_errors = args.min_errors;
  cfg.max_trials_per_point = args.max_trials;
  cfg.seed = args.seed;
  cfg.iuap_max_iters = args.iuap_iters;
  if (args.snr_step <= 0.0) throw std::invalid_argument("simulate: --snr-step must be positive");
  for (double s = args.snr_start; s <= args.snr_stop + 1e-9; s += args.snr_step) {
    cfg.snr_grid_db.push_back(s);
  }
  if (cfg.snr_grid_db.empty()) throw std::invalid_argument("simulate: empty SNR grid");

  const SimResult result = run_sweep(cb, cfg, args.threads);
  write_results_file(result, cfg.detector, args.out_path);
  for (const auto& p : result.points) {
    std::printf("snr %.3f dB  trials %lld  bler %.6g  ber %.6g\n", p.snr_db, p.trials, p.bler,
                p.ber);
  }
  std::printf("wrote %s\n", args.out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"amplitude-PSK unitary constellation toolkit"};
  app.require_subcommand(1);

  DesignArgs design;
  auto* cmd_d = app.add_subcommand("design", "optimize an amplitude set for a bit allocation");
  cmd_d->add_option("--K", design.block_len, "block length (symbols)")->required();
  cmd_d->add_option("--lv", design.total_bits, "total bits; searches allocations first");
  cmd_d->add_option("--lu", design.amp_bits, "amplitude bits");
  cmd_d->add_option("--lphi", design.phase_bits, "comma-separated per-symbol PSK bits");
  cmd_d->add_option("--restarts", design.restarts, "independent optimizer restarts");
  cmd_d->add_option("--seed", design.seed, "design seed");
  cmd_d->add_option("--threads", design.threads, "worker cap (does not affect results)");
  cmd_d->add_option("--out", design.out_path, "output codebook path")->required();

  SearchArgs search;
  auto* cmd_s = app.add_subcommand("search-alloc", "rank bit allocations by achieved MCD");
  cmd_s->add_option("--K", search.block_len, "block length (symbols)")->required();
  cmd_s->add_option("--lv", search.total_bits, "total bits")->required();
  cmd_s->add_option("--restarts", search.restarts, "independent optimizer restarts");
  cmd_s->add_option("--seed", search.seed, "design seed");
  cmd_s->add_option("--threads", search.threads, "worker cap (does not affect results)");

  AnalyzeArgs analyze;
  auto* cmd_a = app.add_subcommand("analyze", "distance analytics for a codebook file");
  cmd_a->add_option("--codebook", analyze.codebook_path, "codebook JSON path")->required();
  cmd_a->add_option("--snr-db", analyze.snr_db, "SNR for the Chernoff bound");
  cmd_a->add_option("--antennas", analyze.antennas, "receive antennas for the Chernoff bound");

  SimulateArgs simulate;
  auto* cmd_m = app.add_subcommand("simulate", "Monte Carlo BLER/BER over an SNR grid");
  cmd_m->add_option("--codebook", simulate.codebook_path, "codebook JSON path")->required();
  cmd_m->add_option("--detector", simulate.detector,
                    "ml | iuap-pr | iuap-improved-pr | iuap-exhaustive-phase");
  cmd_m->add_option("--snr-start", simulate.snr_start, "grid start (dB)")->required();
  cmd_m->add_option("--snr-stop", simulate.snr_stop, "grid stop (dB)")->required();
  cmd_m->add_option("--snr-step", simulate.snr_step, "grid step (dB)");
  cmd_m->add_option("--antennas", simulate.antennas, "receive antennas");
  cmd_m->add_option("--seed", simulate.seed, "simulation seed");
  cmd_m->add_option("--min-errors", simulate.min_errors, "block errors collected per point");
  cmd_m->add_option("--max-trials", simulate.max_trials, "trial cap per point");
  cmd_m->add_option("--iuap-iters", simulate.iuap_iters, "IUAP iteration cap");
  cmd_m->add_option("--threads", simulate.threads, "worker cap (does not affect results)");
  cmd_m->add_option("--out", simulate.out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (cmd_d->parsed()) return cmd_design(design);
    if (cmd_s->parsed()) return cmd_search_alloc(search);
    if (cmd_a->parsed()) return cmd_analyze(analyze);
    if (cmd_m->parsed()) return cmd_simulate(simulate);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const FileFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SweepError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
