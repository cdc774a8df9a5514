#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kgrec/config.hpp"

namespace kgrec {

struct RunOptions {
  unsigned threads = 1;
  bool deterministic = true;
};

struct StageRecord {
  std::string name;
  std::string kg;  // empty for stages that span all KGs
  std::string stage_key;
  bool cached = false;
  double seconds = 0;
  std::vector<std::string> artifacts;  // relative to the output directory
};

// Doubles as the cache index: a stage whose key matches the previous run's
// entry, with every artifact still on disk at its recorded digest, is a hit.
struct RunManifest {
  std::string tool_version;
  std::string config_digest;
  bool deterministic = true;
  std::vector<StageRecord> stages;
  std::map<std::string, std::string> artifact_digests;  // rel path -> sha256
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

// Stage names in execution order: prepare, ingest, walk, embed, recommend,
// eval, bias, genre-grid, report. `run_until` stops after the named stage.
RunManifest run_pipeline(const ExperimentConfig& cfg,
                         const RunOptions& opts = {});
RunManifest run_until(const ExperimentConfig& cfg,
                      const std::string& last_stage,
                      const RunOptions& opts = {});

// Renders report/*.txt from the CSV artifacts of a completed run and updates
// the stored manifest. Requires out/manifest.json to exist.
RunManifest render_report(const ExperimentConfig& cfg);

}  // namespace kgrec
