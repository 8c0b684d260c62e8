#include "rtsim/trial_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace rtsim {

using nlohmann::json;

std::size_t TrialRecord::length() const {
  if (channels.empty()) return 0;
  return channels.begin()->second.values.size();
}

void TrialRecord::validate() const {
  if (trial_id.empty()) throw std::invalid_argument("trial record: empty trial_id");
  if (channels.empty()) throw std::invalid_argument("trial record: no channels");
  const std::size_t n = length();
  for (const auto& [name, series] : channels) {
    if (series.values.size() != n)
      throw std::invalid_argument("trial record: channel '" + name +
                                  "' length differs from the shared timeline");
    for (double v : series.values)
      if (!std::isfinite(v))
        throw std::invalid_argument("trial record: non-finite value in channel '" + name + "'");
  }
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trial(const TrialRecord& record, const std::filesystem::path& path) {
  record.validate();

  json header;
  header["format"] = "rtsim-trial";
  header["version"] = 1;
  header["trial_id"] = record.trial_id;
  header["tag"] = record.tag;
  header["seed"] = record.seed;
  header["config_hash"] = record.config_hash;
  json rates = json::object();
  for (const auto& [name, series] : record.channels) rates[name] = series.sample_rate;
  header["sample_rates"] = std::move(rates);
  header["rows"] = record.length();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("write_trial: cannot open " + tmp.string());
    out << header.dump() << '\n';

    bool first = true;
    for (const auto& [name, series] : record.channels) {
      out << (first ? "" : ",") << name;
      first = false;
    }
    out << '\n';

    const std::size_t n = record.length();
    for (std::size_t i = 0; i < n; ++i) {
      first = true;
      for (const auto& [name, series] : record.channels) {
        out << (first ? "" : ",") << format_double(series.values[i]);
        first = false;
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("write_trial: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

TrialRecord read_trial(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trial: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_trial: empty file " + path.string());
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error("read_trial: bad header in " + path.string() + ": " + e.what());
  }
  if (header.value("format", "") != "rtsim-trial")
    throw std::runtime_error("read_trial: not a trial file: " + path.string());

  TrialRecord rec;
  rec.trial_id = header.value("trial_id", "");
  rec.tag = header.value("tag", "");
  rec.seed = header.value("seed", std::uint64_t{0});
  rec.config_hash = header.value("config_hash", "");
  const std::size_t rows = header.value("rows", std::size_t{0});

  if (!std::getline(in, line))
    throw std::runtime_error("read_trial: missing column header in " + path.string());
  std::vector<std::string> columns;
  {
    std::istringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(col);
  }
  if (columns.empty())
    throw std::runtime_error("read_trial: no channels in " + path.string());

  std::vector<std::vector<double>> data(columns.size());
  for (auto& c : data) c.reserve(rows);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= columns.size())
        throw std::runtime_error("read_trial: too many cells at row " + std::to_string(row) +
                                 " in " + path.string());
      data[col].push_back(std::stod(cell));
      ++col;
    }
    if (col != columns.size())
      throw std::runtime_error("read_trial: short row " + std::to_string(row) + " in " +
                               path.string());
    ++row;
  }
  if (row != rows)
    throw std::runtime_error("read_trial: row count mismatch in " + path.string() + " (header " +
                             std::to_string(rows) + ", body " + std::to_string(row) + ")");

  const json& rates = header.value("sample_rates", json::object());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    TrialSeries s;
    s.channel = columns[c];
    s.values = std::move(data[c]);
    s.sample_rate = rates.value(columns[c], 1.0);
    rec.channels.emplace(columns[c], std::move(s));
  }
  rec.validate();
  return rec;
}

Ensemble read_ensemble(const std::filesystem::path& dir, const std::string& channel) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("read_ensemble: not a directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".log")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("read_ensemble: no trial files in " + dir.string());

  std::vector<TrialSeries> trials;
  std::size_t expected = 0;
  double expected_rate = 0.0;
  for (const auto& file : files) {
    TrialRecord rec = read_trial(file);
    auto it = rec.channels.find(channel);
    if (it == rec.channels.end())
      throw std::runtime_error("read_ensemble: trial '" + rec.trial_id + "' (" +
                               file.filename().string() + ") lacks channel '" + channel + "'");
    if (trials.empty()) {
      expected = it->second.values.size();
      expected_rate = it->second.sample_rate;
    } else if (it->second.values.size() != expected) {
      throw std::runtime_error("read_ensemble: trial '" + rec.trial_id + "' (" +
                               file.filename().string() + ") has " +
                               std::to_string(it->second.values.size()) + " samples, expected " +
                               std::to_string(expected));
    } else if (it->second.sample_rate != expected_rate) {
      throw std::runtime_error("read_ensemble: trial '" + rec.trial_id + "' (" +
                               file.filename().string() + ") sample rate differs");
    }
    trials.push_back(std::move(it->second));
  }
  return Ensemble(std::move(trials));
}

std::filesystem::path trials_dir(const std::filesystem::path& run_dir) {
  return run_dir / "trials";
}
std::filesystem::path manifest_path(const std::filesystem::path& run_dir) {
  return run_dir / "manifest.json";
}
std::filesystem::path curve_path(const std::filesystem::path& run_dir) {
  return run_dir / "curve.csv";
}
std::filesystem::path checkpoints_dir(const std::filesystem::path& run_dir) {
  return run_dir / "checkpoints";
}

std::string config_hash(const std::string& serialized_config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialized_config) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rtsim
