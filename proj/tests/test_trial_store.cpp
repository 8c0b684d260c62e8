#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "rtsim/rng.hpp"
#include "rtsim/trial_store.hpp"

using namespace rtsim;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rtsim_store_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

TrialRecord sample_record(const std::string& id, double offset = 0.0) {
  TrialRecord rec;
  rec.trial_id = id;
  rec.tag = "p2p/fixed";
  rec.seed = 42;
  rec.config_hash = "deadbeefdeadbeef";
  rec.channels["q1"] = {"q1", {0.1 + offset, 1.0 / 3.0, 3.14159265358979312, 1e-300}, 1000.0};
  rec.channels["v1"] = {"v1", {0.05235987755982988, 0.05235987755982988, 0.0, -0.0}, 1000.0};
  rec.channels["cpu_pct"] = {"cpu_pct", {50.0, 51.5, 49.25, 50.0}, 10.0};
  return rec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("trial records round-trip exactly and serialize deterministically") {
  TempDir tmp;
  const TrialRecord rec = sample_record("trial_0000");
  const fs::path a = tmp.path / "a.log";
  const fs::path b = tmp.path / "b.log";
  write_trial(rec, a);
  write_trial(rec, b);
  CHECK(slurp(a) == slurp(b));

  const TrialRecord back = read_trial(a);
  CHECK(back.trial_id == rec.trial_id);
  CHECK(back.tag == rec.tag);
  CHECK(back.seed == rec.seed);
  CHECK(back.config_hash == rec.config_hash);
  REQUIRE(back.channels.size() == rec.channels.size());
  for (const auto& [name, series] : rec.channels) {
    REQUIRE(back.channels.count(name) == 1);
    CHECK(back.channels.at(name).values == series.values);  // exact, all 17 digits
    CHECK(back.channels.at(name).sample_rate == series.sample_rate);
  }

  // Re-serializing the parsed record reproduces the bytes.
  const fs::path c = tmp.path / "c.log";
  write_trial(back, c);
  CHECK(slurp(c) == slurp(a));
}

TEST_CASE("non-finite values are rejected at write time") {
  TempDir tmp;
  TrialRecord rec = sample_record("trial_0001");
  rec.channels["q1"].values[1] = std::nan("");
  CHECK_THROWS_AS(write_trial(rec, tmp.path / "bad.log"), std::invalid_argument);
  rec.channels["q1"].values[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(write_trial(rec, tmp.path / "bad.log"), std::invalid_argument);
  CHECK_FALSE(fs::exists(tmp.path / "bad.log"));
}

TEST_CASE("misaligned channels are rejected") {
  TrialRecord rec = sample_record("trial_0002");
  rec.channels["q1"].values.pop_back();
  CHECK_THROWS_AS(rec.validate(), std::invalid_argument);
}

TEST_CASE("ensembles load from a directory of trials") {
  TempDir tmp;
  for (int j = 0; j < 3; ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%04d.log", j);
    write_trial(sample_record(name, 0.01 * j), tmp.path / name);
  }
  const Ensemble e = read_ensemble(tmp.path, "q1");
  CHECK(e.trial_count() == 3);
  CHECK(e.length() == 4);
  CHECK(e.sample_rate() == 1000.0);

  CHECK_THROWS_WITH_AS(read_ensemble(tmp.path, "nope"),
                       doctest::Contains("lacks channel"), std::runtime_error);
}

TEST_CASE("a shorter trial is rejected and named") {
  TempDir tmp;
  write_trial(sample_record("trial_0000"), tmp.path / "trial_0000.log");
  TrialRecord shorter = sample_record("trial_0001");
  for (auto& [name, series] : shorter.channels) series.values.pop_back();
  write_trial(shorter, tmp.path / "trial_0001.log");

  CHECK_THROWS_WITH_AS(read_ensemble(tmp.path, "q1"), doctest::Contains("trial_0001"),
                       std::runtime_error);
}

TEST_CASE("corrupt files are rejected cleanly") {
  TempDir tmp;
  write_trial(sample_record("trial_0000"), tmp.path / "trial_0000.log");

  SUBCASE("truncated body") {
    std::string text = slurp(tmp.path / "trial_0000.log");
    std::ofstream out(tmp.path / "trial_0000.log", std::ios::binary | std::ios::trunc);
    out << text.substr(0, text.size() - 25);
    out.close();
    CHECK_THROWS_AS(read_trial(tmp.path / "trial_0000.log"), std::runtime_error);
  }

  SUBCASE("garbage header") {
    std::ofstream out(tmp.path / "trial_0000.log", std::ios::binary | std::ios::trunc);
    out << "not json\nq1\n1.0\n";
    out.close();
    CHECK_THROWS_AS(read_trial(tmp.path / "trial_0000.log"), std::runtime_error);
  }

  SUBCASE("empty directory") {
    TempDir empty;
    CHECK_THROWS_AS(read_ensemble(empty.path, "q1"), std::runtime_error);
  }
}

TEST_CASE("externally recorded torque logs ingest through the same format") {
  TempDir tmp;
  for (int j = 0; j < 2; ++j) {
    TrialRecord rec;
    rec.trial_id = "external_" + std::to_string(j);
    rec.tag = "p2p/hardware";
    rec.seed = 0;
    rec.config_hash = "0";
    rec.channels["t1"] = {"t1", {2.6 + j, 2.7, 2.65, 2.62}, 1000.0};
    rec.channels["t2"] = {"t2", {8.6, 8.7, 8.5, 8.55}, 1000.0};
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%04d.log", j);
    write_trial(rec, tmp.path / name);
  }
  const Ensemble torque = read_ensemble(tmp.path, "t1");
  CHECK(torque.trial_count() == 2);
  const StochasticityReport rep = stochasticity_report(torque);
  CHECK(rep.per_trial_delta.size() == 2);
  CHECK(rep.per_trial_delta[0] > 0.0);
}

TEST_CASE("a 200-step 12-channel trial stays under 100 KB") {
  TempDir tmp;
  TrialRecord rec;
  rec.trial_id = "size_probe";
  rec.tag = "p2p/fixed";
  rec.seed = 1;
  rec.config_hash = "0";
  Rng rng = make_rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 0; c < 12; ++c) {
    std::vector<double> v(200);
    for (double& x : v) x = u(rng);
    const std::string name = "ch" + std::to_string(c);
    rec.channels[name] = {name, std::move(v), 40.0};
  }
  const fs::path p = tmp.path / "size.log";
  write_trial(rec, p);
  CHECK(fs::file_size(p) < 100 * 1024);
}

TEST_CASE("run directory layout helpers") {
  const fs::path run = "runs/sample";
  CHECK(trials_dir(run) == fs::path("runs/sample/trials"));
  CHECK(manifest_path(run) == fs::path("runs/sample/manifest.json"));
  CHECK(curve_path(run) == fs::path("runs/sample/curve.csv"));
  CHECK(checkpoints_dir(run) == fs::path("runs/sample/checkpoints"));

  CHECK(config_hash("abc") == config_hash("abc"));
  CHECK(config_hash("abc") != config_hash("abd"));
  CHECK(config_hash("x").size() == 16);
}
