#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace rtsim {

/// One recorded signal: a named channel sampled at a fixed rate.
struct TrialSeries {
  std::string channel;
  std::vector<double> values;
  double sample_rate = 1.0;  // Hz
};

/// A set of repeated trials of the same channel, aligned sample-for-sample.
/// Alignment (same channel, same length, same rate) is enforced on
/// construction; all downstream statistics assume it.
class Ensemble {
 public:
  explicit Ensemble(std::vector<TrialSeries> trials);

  const std::vector<TrialSeries>& trials() const { return trials_; }
  std::size_t trial_count() const { return trials_.size(); }
  std::size_t length() const { return trials_.front().values.size(); }
  const std::string& channel() const { return trials_.front().channel; }
  double sample_rate() const { return trials_.front().sample_rate; }

 private:
  std::vector<TrialSeries> trials_;
};

struct StochasticityReport {
  std::vector<double> mean_signal;      // per-index ensemble mean
  std::vector<double> sigma_band;       // per-index population std dev
  std::vector<double> per_trial_delta;  // RMS deviation per trial
  double mean_delta = 0.0;
};

struct CorrelationResult {
  double r = 0.0;
  double t_score = 0.0;
  double p_value = 1.0;
  int n_df = 0;
};

struct CorrelationRow {
  std::string signal_channel;
  std::string resource_channel;
  CorrelationResult result;
  bool significant = false;  // p < 0.05
};

std::vector<double> mean_signal(const Ensemble& e);
std::vector<double> deviation(const TrialSeries& trial, const std::vector<double>& mean);
std::vector<double> sigma_band(const Ensemble& e);
double rms_delta(const TrialSeries& trial, const std::vector<double>& mean);
StochasticityReport stochasticity_report(const Ensemble& e);

double resource_mean(const TrialSeries& trace);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double t_score(double r, int n_df);

/// Two-tailed Student-t tail probability 2*(1 - F(|t|; n_df)). The CDF is
/// evaluated by adaptive quadrature of the density itself rather than a
/// special-function library call, so it is self-contained and testable
/// against tabulated values.
double p_value(double t, int n_df);

CorrelationResult correlate(const std::vector<double>& x, const std::vector<double>& y);

/// One row per (signal channel, resource channel) pair. Both maps hold one
/// value per trial, in matching trial order.
std::vector<CorrelationRow> correlation_study(
    const std::map<std::string, std::vector<double>>& per_trial_deltas,
    const std::map<std::string, std::vector<double>>& per_trial_resources);

struct PsdResult {
  std::vector<double> freqs;  // Hz
  std::vector<double> power;
};

/// Welch-averaged periodogram, Hann window, 50% overlap. segment_len of 0
/// picks N/4 rounded to a power of two. Normalized so a unit-amplitude
/// sinusoid puts its mean-square power (0.5) at its frequency bin.
PsdResult psd(const TrialSeries& series, std::size_t segment_len = 0);

}  // namespace rtsim
