#pragma once
// File formats owned by the CLI: codebook JSON (full-precision decimal
// strings, canonical layout so write -> read -> write is byte-identical) and
// the per-point results CSV.

#include <string>

#include "unicon/sim.hpp"
#include "unicon/types.hpp"

namespace unicon {

// Malformed or inconsistent input file.
class FileFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

extern const char* const kToolVersion;

std::string codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const std::string& text);

// Atomic write: the output appears only on success.
void write_codebook_file(const Codebook& cb, const std::string& path);
Codebook read_codebook_file(const std::string& path);

std::string results_to_csv(const SimResult& result, DetectorKind detector);
void write_results_file(const SimResult& result, DetectorKind detector, const std::string& path);

}  // namespace unicon
