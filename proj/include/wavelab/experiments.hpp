#pragma once

#include <string>
#include <vector>

#include "wavelab/io.hpp"

namespace wavelab::experiments {

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> artifacts;  // file names written under out_dir
  std::string config_hash;
  std::string content_hash;  // over all artifact bytes, manifest excluded
  std::string message;
};

// Known subcommands: kato-norm, hypotheses, resonance-scan, spectral-measure,
// heat-check, fk-mc, besov-equiv, dispersive-run, all.
bool known_subcommand(const std::string& name);

// Executes one experiment into out_dir and writes a manifest.json recording
// the config hash, artifact hashes, tool version and wall time. Identical
// config + seed reproduce artifact bytes and the content hash exactly.
RunResult run(const std::string& subcommand, io::TomlTable config, const std::string& out_dir,
              std::size_t jobs = 1);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace wavelab::experiments
