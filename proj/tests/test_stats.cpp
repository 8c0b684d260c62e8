#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rtsim/rng.hpp"
#include "rtsim/stats.hpp"

using namespace rtsim;

namespace {

TrialSeries series(std::vector<double> v, double rate = 1.0) {
  return TrialSeries{"s", std::move(v), rate};
}

Ensemble random_ensemble(Rng& rng, std::size_t n_r, std::size_t n_t) {
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<TrialSeries> trials;
  for (std::size_t j = 0; j < n_r; ++j) {
    std::vector<double> v(n_t);
    for (double& x : v) x = normal(rng);
    trials.push_back(series(std::move(v)));
  }
  return Ensemble(std::move(trials));
}

}  // namespace

TEST_CASE("ensemble construction enforces alignment") {
  CHECK_THROWS_AS(Ensemble({}), std::invalid_argument);
  CHECK_THROWS_AS(Ensemble({series({1, 2}), series({1, 2, 3})}), std::invalid_argument);
  CHECK_THROWS_AS(Ensemble({series({1, 2}, 10.0), series({1, 2}, 20.0)}), std::invalid_argument);
  CHECK_THROWS_AS(Ensemble({TrialSeries{"a", {1.0}, 1.0}, TrialSeries{"b", {1.0}, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("mean signal") {
  const Ensemble e({series({1, 1}), series({3, 3})});
  const std::vector<double> m = mean_signal(e);
  CHECK(m == std::vector<double>{2, 2});

  const Ensemble single({series({4, 5, 6})});
  CHECK(mean_signal(single) == std::vector<double>{4, 5, 6});
}

TEST_CASE("mean signal matches the brute-force oracle on random data") {
  Rng rng = make_rng(11);
  const Ensemble e = random_ensemble(rng, 5, 37);
  const std::vector<double> fast = mean_signal(e);
  for (std::size_t i = 0; i < e.length(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < e.trial_count(); ++j) acc += e.trials()[j].values[i];
    CHECK(fast[i] == doctest::Approx(acc / e.trial_count()).epsilon(1e-12));
  }
}

TEST_CASE("deviation signal") {
  CHECK(deviation(series({2, 2}), {2, 2}) == std::vector<double>{0, 0});
  CHECK(deviation(series({3, 3}), {2, 2}) == std::vector<double>{1, 1});
  CHECK_THROWS_AS(deviation(series({1}), {1, 2}), std::invalid_argument);

  // Deviations over a whole ensemble cancel.
  Rng rng = make_rng(3);
  const Ensemble e = random_ensemble(rng, 7, 23);
  const std::vector<double> m = mean_signal(e);
  std::vector<double> acc(e.length(), 0.0);
  for (const TrialSeries& t : e.trials()) {
    const std::vector<double> d = deviation(t, m);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i];
  }
  for (double v : acc) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("sigma band uses the population normalization") {
  const Ensemble e({series({1, 1}), series({3, 3})});
  const std::vector<double> s = sigma_band(e);
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-15));

  const Ensemble same({series({2, 2}), series({2, 2})});
  CHECK(sigma_band(same) == std::vector<double>{0, 0});

  const Ensemble single({series({5, 7})});
  CHECK(sigma_band(single) == std::vector<double>{0, 0});
}

TEST_CASE("sigma squared equals the mean squared deviation") {
  Rng rng = make_rng(17);
  const Ensemble e = random_ensemble(rng, 6, 31);
  const std::vector<double> m = mean_signal(e);
  const std::vector<double> s = sigma_band(e);
  for (std::size_t i = 0; i < e.length(); ++i) {
    double acc = 0.0;
    for (const TrialSeries& t : e.trials()) {
      const double d = t.values[i] - m[i];
      acc += d * d;
    }
    CHECK(s[i] * s[i] == doctest::Approx(acc / e.trial_count()).epsilon(1e-12));
  }
}

TEST_CASE("rms delta") {
  CHECK(rms_delta(series({2, 2}), {2, 2}) == 0.0);
  CHECK(rms_delta(series({3, 3}), {2, 2}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rms_delta(series({3, 4}), {0, 0}) == doctest::Approx(3.5355339059327378).epsilon(1e-14));
}

TEST_CASE("resource mean") {
  CHECK(resource_mean(series({50, 50, 50})) == 50.0);
  CHECK(resource_mean(series({0, 100})) == 50.0);
  CHECK_THROWS_AS(resource_mean(series({})), std::invalid_argument);

  Rng rng = make_rng(23);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> v(57);
  double acc = 0.0;
  for (double& x : v) {
    x = u(rng);
    acc += x;
  }
  CHECK(resource_mean(series(v)) == doctest::Approx(acc / v.size()).epsilon(1e-12));
}

TEST_CASE("pearson correlation") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == 0.8);  // exact: 4 / sqrt(25)
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(pearson({1}, {1}), std::invalid_argument);
}

TEST_CASE("pearson affine invariance") {
  Rng rng = make_rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = normal(rng);
    y[i] = normal(rng);
  }
  const double r = pearson(x, y);
  std::vector<double> x_pos(x), x_neg(x);
  for (double& v : x_pos) v = 2.5 * v + 7.0;
  for (double& v : x_neg) v = -1.5 * v + 3.0;
  CHECK(pearson(x_pos, y) == doctest::Approx(r).epsilon(1e-12));
  CHECK(pearson(x_neg, y) == doctest::Approx(-r).epsilon(1e-12));
}

TEST_CASE("t score") {
  CHECK(t_score(0.0, 5) == 0.0);
  CHECK(t_score(0.8, 2) == doctest::Approx(1.8856180831641267).epsilon(1e-12));
  CHECK(t_score(-0.8, 2) == doctest::Approx(-1.8856180831641267).epsilon(1e-12));
  CHECK_THROWS_AS(t_score(1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(t_score(0.5, 0), std::invalid_argument);
}

TEST_CASE("p value against tabulated Student-t points") {
  CHECK(p_value(0.0, 1) == 1.0);
  CHECK(p_value(0.0, 100) == 1.0);
  CHECK(p_value(12.706, 1) == doctest::Approx(0.05).epsilon(1e-3 / 0.05));
  CHECK(p_value(1.96, 10000) == doctest::Approx(0.05).epsilon(2e-3 / 0.05));
  CHECK(p_value(2.228, 10) == doctest::Approx(0.05).epsilon(2e-2));

  // Monotone decreasing in |t|.
  double prev = 1.0;
  for (double t = 0.25; t < 6.0; t += 0.25) {
    const double p = p_value(t, 7);
    CHECK(p < prev);
    prev = p;
  }
  CHECK(p_value(-2.0, 7) == p_value(2.0, 7));
}

TEST_CASE("correlate bundles r, t and p with n_df = N_r - 2") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> y{1.2, 1.9, 3.4, 3.8, 5.1, 6.2};
  const CorrelationResult res = correlate(x, y);
  CHECK(res.n_df == 4);
  CHECK(res.r > 0.9);
  CHECK(res.p_value < 0.05);

  const CorrelationResult perfect = correlate({1, 2, 3, 4}, {2, 4, 6, 8});
  CHECK(perfect.r == doctest::Approx(1.0));
  CHECK(perfect.p_value == 0.0);
  CHECK(std::isinf(perfect.t_score));
}

TEST_CASE("correlation study emits one row per channel pair") {
  std::map<std::string, std::vector<double>> deltas;
  std::map<std::string, std::vector<double>> resources;
  deltas["v1"] = {1, 2, 3, 4, 5};
  deltas["t1"] = {5, 1, 4, 2, 3};
  resources["cpu_pct"] = {1, 2, 3, 4, 5};
  resources["mem_pct"] = {2, 2, 3, 5, 4};

  const auto rows = correlation_study(deltas, resources);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) CHECK(row.result.n_df == 3);

  // v1 tracks cpu exactly.
  const auto coupled = std::find_if(rows.begin(), rows.end(), [](const CorrelationRow& r) {
    return r.signal_channel == "v1" && r.resource_channel == "cpu_pct";
  });
  REQUIRE(coupled != rows.end());
  CHECK(coupled->result.r == doctest::Approx(1.0));
  CHECK(coupled->significant);

  deltas["t1"].pop_back();
  CHECK_THROWS_AS(correlation_study(deltas, resources), std::invalid_argument);
}

TEST_CASE("welch psd locates a pure tone and scales quadratically") {
  const double fs = 1000.0;
  const double f0 = 10.0;
  std::vector<double> sine(4096), sine2x(4096);
  for (std::size_t i = 0; i < sine.size(); ++i) {
    sine[i] = std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
    sine2x[i] = 2.0 * sine[i];
  }
  const PsdResult p = psd(series(sine, fs));
  std::size_t peak = 0;
  for (std::size_t k = 1; k < p.power.size(); ++k)
    if (p.power[k] > p.power[peak]) peak = k;
  const double bin_width = p.freqs[1] - p.freqs[0];
  CHECK(std::abs(p.freqs[peak] - f0) <= bin_width + 1e-12);

  const PsdResult p2 = psd(series(sine2x, fs));
  CHECK(p2.power[peak] == doctest::Approx(4.0 * p.power[peak]).epsilon(1e-10));

  const PsdResult zero = psd(series(std::vector<double>(512, 0.0), fs));
  for (double v : zero.power) CHECK(v == 0.0);

  CHECK_THROWS_AS(psd(series({1, 2, 3})), std::invalid_argument);
  CHECK_THROWS_AS(psd(series(std::vector<double>(16, 1.0)), 32), std::invalid_argument);
}

TEST_CASE("psd fft path matches a direct transform oracle") {
  Rng rng = make_rng(29);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t L = 32;
  std::vector<double> x(L);
  for (double& v : x) v = normal(rng);

  // Single segment: reproduce the windowed periodogram by brute force.
  const PsdResult fast = psd(series(x, 100.0), L);
  std::vector<double> w(L);
  double wsum = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / static_cast<double>(L)));
    wsum += w[i];
  }
  for (std::size_t k = 0; k < fast.power.size(); ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      const double phase = -2.0 * M_PI * static_cast<double>(k * i) / static_cast<double>(L);
      re += w[i] * x[i] * std::cos(phase);
      im += w[i] * x[i] * std::sin(phase);
    }
    double expected = (re * re + im * im) / (wsum * wsum);
    if (k != 0 && k != L / 2) expected *= 2.0;
    CHECK(fast.power[k] == doctest::Approx(expected).epsilon(1e-10));
  }
}
