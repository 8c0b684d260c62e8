#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rtsim/stats.hpp"

namespace rtsim {

/// One recorded trial: a set of equally long channels over a shared step
/// timeline, plus identifying metadata. Channels are keyed by name and
/// serialized in name order, so identical records produce identical bytes.
struct TrialRecord {
  std::string trial_id;
  std::string tag;  // task / variant label
  std::uint64_t seed = 0;
  std::string config_hash;
  std::map<std::string, TrialSeries> channels;

  std::size_t length() const;
  void validate() const;  // throws on misaligned or non-finite channels
};

/// File format: one JSON metadata line, then a CSV header line, then one row
/// per timestep. Floats carry 17 significant digits so records round-trip
/// exactly. Writes go through a temp file and a rename, so a crash never
/// leaves a readable-but-corrupt file behind.
void write_trial(const TrialRecord& record, const std::filesystem::path& path);

TrialRecord read_trial(const std::filesystem::path& path);

/// Loads one channel from every trial file in a directory (files sorted by
/// name). Misaligned trials are rejected with the offending file named.
Ensemble read_ensemble(const std::filesystem::path& dir, const std::string& channel);

/// Conventional run layout helpers.
std::filesystem::path trials_dir(const std::filesystem::path& run_dir);
std::filesystem::path manifest_path(const std::filesystem::path& run_dir);
std::filesystem::path curve_path(const std::filesystem::path& run_dir);
std::filesystem::path checkpoints_dir(const std::filesystem::path& run_dir);

/// Stable short hash for config snapshots (FNV-1a over the serialized form).
std::string config_hash(const std::string& serialized_config);

}  // namespace rtsim
