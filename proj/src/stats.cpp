#include "rtsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rtsim {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Ensemble::Ensemble(std::vector<TrialSeries> trials) : trials_(std::move(trials)) {
  if (trials_.empty()) throw std::invalid_argument("ensemble needs at least one trial");
  const TrialSeries& first = trials_.front();
  if (first.values.empty()) throw std::invalid_argument("ensemble trials must be nonempty");
  for (std::size_t j = 0; j < trials_.size(); ++j) {
    const TrialSeries& t = trials_[j];
    if (t.channel != first.channel)
      throw std::invalid_argument("ensemble channel mismatch at trial " + std::to_string(j) +
                                  ": '" + t.channel + "' vs '" + first.channel + "'");
    if (t.values.size() != first.values.size())
      throw std::invalid_argument("ensemble length mismatch at trial " + std::to_string(j));
    if (t.sample_rate != first.sample_rate)
      throw std::invalid_argument("ensemble sample-rate mismatch at trial " + std::to_string(j));
    if (!all_finite(t.values))
      throw std::invalid_argument("non-finite value in trial " + std::to_string(j));
  }
}

std::vector<double> mean_signal(const Ensemble& e) {
  // Shifted accumulation: summing deviations from the first trial keeps the
  // mean of identical trials exactly equal to them, so deterministic
  // ensembles report zero stochasticity with no rounding residue.
  const std::size_t n_t = e.length();
  const double inv = 1.0 / static_cast<double>(e.trial_count());
  const std::vector<double>& first = e.trials().front().values;
  std::vector<double> shift(n_t, 0.0);
  for (const TrialSeries& trial : e.trials())
    for (std::size_t i = 0; i < n_t; ++i) shift[i] += trial.values[i] - first[i];
  std::vector<double> mean(n_t);
  for (std::size_t i = 0; i < n_t; ++i) mean[i] = first[i] + shift[i] * inv;
  return mean;
}

std::vector<double> deviation(const TrialSeries& trial, const std::vector<double>& mean) {
  if (trial.values.size() != mean.size())
    throw std::invalid_argument("deviation: trial/mean length mismatch");
  std::vector<double> d(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) d[i] = trial.values[i] - mean[i];
  return d;
}

std::vector<double> sigma_band(const Ensemble& e) {
  // Population normalization (1/N_r), not 1/(N_r-1).
  const std::vector<double> mean = mean_signal(e);
  const std::size_t n_t = e.length();
  const double inv = 1.0 / static_cast<double>(e.trial_count());
  std::vector<double> var(n_t, 0.0);
  for (const TrialSeries& trial : e.trials())
    for (std::size_t i = 0; i < n_t; ++i) {
      const double d = trial.values[i] - mean[i];
      var[i] += d * d;
    }
  for (double& v : var) v = std::sqrt(v * inv);
  return var;
}

double rms_delta(const TrialSeries& trial, const std::vector<double>& mean) {
  if (trial.values.size() != mean.size())
    throw std::invalid_argument("rms_delta: trial/mean length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double d = trial.values[i] - mean[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(mean.size()));
}

StochasticityReport stochasticity_report(const Ensemble& e) {
  StochasticityReport rep;
  rep.mean_signal = mean_signal(e);
  rep.sigma_band = sigma_band(e);
  rep.per_trial_delta.reserve(e.trial_count());
  for (const TrialSeries& trial : e.trials())
    rep.per_trial_delta.push_back(rms_delta(trial, rep.mean_signal));
  rep.mean_delta = std::accumulate(rep.per_trial_delta.begin(), rep.per_trial_delta.end(), 0.0) /
                   static_cast<double>(e.trial_count());
  return rep;
}

double resource_mean(const TrialSeries& trace) {
  if (trace.values.empty()) throw std::invalid_argument("resource_mean: empty trace");
  return std::accumulate(trace.values.begin(), trace.values.end(), 0.0) /
         static_cast<double>(trace.values.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("pearson: need at least two samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: undefined for a constant vector");
  // sqrt of the product keeps exact results exact (e.g. 4/sqrt(25)).
  return sxy / std::sqrt(sxx * syy);
}

double t_score(double r, int n_df) {
  if (n_df < 1) throw std::invalid_argument("t_score: n_df must be >= 1");
  if (std::abs(r) >= 1.0) throw std::invalid_argument("t_score: |r| = 1 gives an infinite score");
  return r * std::sqrt(static_cast<double>(n_df)) / std::sqrt(1.0 - r * r);
}

namespace {

double student_t_pdf(double x, double n_df) {
  const double log_norm = std::lgamma((n_df + 1.0) / 2.0) - std::lgamma(n_df / 2.0) -
                          0.5 * std::log(n_df * M_PI);
  return std::exp(log_norm - 0.5 * (n_df + 1.0) * std::log1p(x * x / n_df));
}

double adaptive_simpson(double (*f)(double, double), double n_df, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm, n_df);
  const double frm = f(rm, n_df);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, n_df, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, n_df, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Integral of the t density over [a, b].
double integrate_t_pdf(double n_df, double a, double b) {
  const double fa = student_t_pdf(a, n_df);
  const double fb = student_t_pdf(b, n_df);
  const double m = 0.5 * (a + b);
  const double fm = student_t_pdf(m, n_df);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(student_t_pdf, n_df, a, b, fa, fm, fb, whole, 1e-13, 48);
}

}  // namespace

double p_value(double t, int n_df) {
  if (n_df < 1) throw std::invalid_argument("p_value: n_df must be >= 1");
  const double at = std::abs(t);
  if (at == 0.0) return 1.0;
  // Split at |t| so the half-line mass 0.5 cancels exactly for t = 0.
  const double body = integrate_t_pdf(static_cast<double>(n_df), 0.0, at);
  return std::clamp(2.0 * (0.5 - body), 0.0, 1.0);
}

CorrelationResult correlate(const std::vector<double>& x, const std::vector<double>& y) {
  CorrelationResult res;
  res.n_df = static_cast<int>(x.size()) - 2;
  if (res.n_df < 1) throw std::invalid_argument("correlate: need at least 3 samples");
  res.r = pearson(x, y);
  if (std::abs(res.r) >= 1.0) {
    // Perfect linear coupling: the t statistic diverges and the tail
    // probability collapses.
    res.t_score = std::copysign(std::numeric_limits<double>::infinity(), res.r);
    res.p_value = 0.0;
    return res;
  }
  res.t_score = t_score(res.r, res.n_df);
  res.p_value = p_value(res.t_score, res.n_df);
  return res;
}

std::vector<CorrelationRow> correlation_study(
    const std::map<std::string, std::vector<double>>& per_trial_deltas,
    const std::map<std::string, std::vector<double>>& per_trial_resources) {
  std::vector<CorrelationRow> rows;
  for (const auto& [sig_name, deltas] : per_trial_deltas) {
    for (const auto& [res_name, resources] : per_trial_resources) {
      if (deltas.size() != resources.size())
        throw std::invalid_argument("correlation_study: trial count mismatch for " + sig_name +
                                    " vs " + res_name);
      CorrelationRow row;
      row.signal_channel = sig_name;
      row.resource_channel = res_name;
      row.result = correlate(deltas, resources);
      row.significant = row.result.p_value < 0.05;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT.
void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (std::size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::size_t a = i + k, b = i + k + len / 2;
        const double tr = re[b] * cr - im[b] * ci;
        const double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

}  // namespace

PsdResult psd(const TrialSeries& series, std::size_t segment_len) {
  const std::size_t n = series.values.size();
  if (n < 8) throw std::invalid_argument("psd: need at least 8 samples");
  if (segment_len == 0) {
    segment_len = 8;
    while (segment_len * 2 <= n / 4) segment_len *= 2;
  }
  if (segment_len < 2 || segment_len > n)
    throw std::invalid_argument("psd: series shorter than one segment");

  const std::size_t L = segment_len;
  const std::size_t hop = std::max<std::size_t>(1, L / 2);
  const bool use_fft = is_power_of_two(L);

  std::vector<double> window(L);
  double wsum = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(L)));
    wsum += window[i];
  }
  const double norm = 1.0 / (wsum * wsum);

  const std::size_t n_bins = L / 2 + 1;
  std::vector<double> power(n_bins, 0.0);
  std::vector<double> re(L), im(L);
  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + L <= n; start += hop) {
    if (use_fft) {
      for (std::size_t i = 0; i < L; ++i) {
        re[i] = window[i] * series.values[start + i];
        im[i] = 0.0;
      }
      fft_radix2(re, im);
      for (std::size_t k = 0; k < n_bins; ++k) {
        double p = (re[k] * re[k] + im[k] * im[k]) * norm;
        if (k != 0 && !(L % 2 == 0 && k == n_bins - 1)) p *= 2.0;  // one-sided
        power[k] += p;
      }
    } else {
      // Direct transform for the odd segment lengths a config may request.
      for (std::size_t k = 0; k < n_bins; ++k) {
        double acc_re = 0.0, acc_im = 0.0;
        const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(L);
        for (std::size_t i = 0; i < L; ++i) {
          const double v = window[i] * series.values[start + i];
          const double phase = w * static_cast<double>(i);
          acc_re += v * std::cos(phase);
          acc_im += v * std::sin(phase);
        }
        double p = (acc_re * acc_re + acc_im * acc_im) * norm;
        if (k != 0 && !(L % 2 == 0 && k == n_bins - 1)) p *= 2.0;
        power[k] += p;
      }
    }
    ++n_segments;
  }
  for (double& p : power) p /= static_cast<double>(n_segments);

  PsdResult out;
  out.freqs.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k)
    out.freqs[k] = static_cast<double>(k) * series.sample_rate / static_cast<double>(L);
  out.power = std::move(power);
  return out;
}

}  // namespace rtsim
