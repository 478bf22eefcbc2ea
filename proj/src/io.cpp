#include "unicon/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "unicon/distance.hpp"

namespace unicon {

const char* const kToolVersion = "unicon 0.1.0";

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_amplitude(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_amplitude(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw FileFormatError("codebook: unparseable amplitude '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw FileFormatError("codebook: unparseable amplitude '" + s + "'");
  }
  return v;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move output into place: " + path);
  }
}

}  // namespace

std::string codebook_to_json(const Codebook& cb) {
  ordered_json j;
  j["schema_version"] = 1;
  j["K"] = cb.alloc.block_len;
  j["l_u"] = cb.alloc.amp_bits;
  j["l_phi"] = cb.alloc.phase_bits;
  ordered_json rows = ordered_json::array();
  for (const auto& row : cb.amplitudes.rows) {
    ordered_json r = ordered_json::array();
    for (double x : row) r.push_back(format_amplitude(x));
    rows.push_back(std::move(r));
  }
  j["amplitudes"] = std::move(rows);
  j["achieved_mcd"] = cb.achieved_mcd;
  ordered_json meta;
  meta["seed"] = cb.metadata.seed;
  meta["restarts"] = cb.metadata.restarts;
  meta["sca_iterations"] = cb.metadata.sca_iterations;
  meta["tool_version"] = kToolVersion;
  j["metadata"] = std::move(meta);
  return j.dump(2) + "\n";
}

Codebook codebook_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw FileFormatError(std::string("codebook: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw FileFormatError("codebook: unsupported schema version");
    }
    Codebook cb;
    cb.alloc.block_len = j.at("K").get<int>();
    cb.alloc.amp_bits = j.at("l_u").get<int>();
    cb.alloc.phase_bits = j.at("l_phi").get<std::vector<int>>();
    for (const auto& row : j.at("amplitudes")) {
      std::vector<double> r;
      for (const auto& cell : row) r.push_back(parse_amplitude(cell.get<std::string>()));
      cb.amplitudes.rows.push_back(std::move(r));
    }
    cb.achieved_mcd = j.at("achieved_mcd").get<double>();
    const auto& meta = j.at("metadata");
    cb.metadata.seed = meta.at("seed").get<std::uint64_t>();
    cb.metadata.restarts = meta.at("restarts").get<int>();
    cb.metadata.sca_iterations = meta.at("sca_iterations").get<int>();

    cb.validate();
    const double recomputed = mcd_decomposed(cb);
    if (std::abs(recomputed - cb.achieved_mcd) > 1e-6) {
      throw FileFormatError("codebook: stored MCD disagrees with the amplitude set");
    }
    if (!(recomputed > 0.0)) {
      throw FileFormatError("codebook: constellation points are not pairwise distinct");
    }
    return cb;
  } catch (const FileFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FileFormatError(std::string("codebook: ") + e.what());
  }
}

void write_codebook_file(const Codebook& cb, const std::string& path) {
  atomic_write(path, codebook_to_json(cb));
}

Codebook read_codebook_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot open codebook file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return codebook_from_json(buf.str());
}

std::string results_to_csv(const SimResult& result, DetectorKind detector) {
  std::string out =
      "snr_db,detector,trials,block_errors,bit_errors,bler,ber,bler_ci_lo,bler_ci_hi\n";
  char line[512];
  for (const auto& p : result.points) {
    std::snprintf(line, sizeof(line), "%.10g,%s,%lld,%lld,%lld,%.10g,%.10g,%.10g,%.10g\n",
                  p.snr_db, detector_name(detector), p.trials, p.block_errors, p.bit_errors,
                  p.bler, p.ber, p.bler_ci_lo, p.bler_ci_hi);
    out += line;
  }
  return out;
}

void write_results_file(const SimResult& result, DetectorKind detector, const std::string& path) {
  atomic_write(path, results_to_csv(result, detector));
}

}  // namespace unicon
