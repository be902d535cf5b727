#include <algorithm>
#include <cmath>
#include <numbers>

#include "spoofprint/errors.hpp"
#include "spoofprint/lowlevel.hpp"

namespace spoofprint {
namespace {

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  }
  return w;
}

// Unnormalized autocorrelation sum_{n} x[n] x[n + lag].
double autocorr(std::span<const double> x, std::size_t lag) {
  double acc = 0.0;
  for (std::size_t n = 0; n + lag < x.size(); ++n) acc += x[n] * x[n + lag];
  return acc;
}

}  // namespace

void validate(const FrameConfig& cfg) {
  if (!(cfg.f0_min > 0.0 && cfg.f0_min < cfg.f0_max)) {
    throw ValidationError("frame config: need 0 < f0_min < f0_max");
  }
  if (!(cfg.frame_length >= 2.0 / cfg.f0_min - 1e-12)) {
    throw ValidationError("frame config: frame_length must cover two periods of f0_min");
  }
  if (!(cfg.hop > 0.0 && cfg.hop <= cfg.frame_length)) {
    throw ValidationError("frame config: need 0 < hop <= frame_length");
  }
  if (!(cfg.voicing_threshold > 0.0 && cfg.voicing_threshold < 1.0)) {
    throw ValidationError("frame config: voicing_threshold must lie in (0, 1)");
  }
  if (!(cfg.octave_cost >= 0.0)) throw ValidationError("frame config: octave_cost must be >= 0");
}

std::size_t PitchTrack::voiced_count() const {
  return static_cast<std::size_t>(std::count(voiced.begin(), voiced.end(), true));
}

PitchTrack track_pitch(const Waveform& w, const FrameConfig& cfg) {
  validate(cfg);
  const double sr = w.sample_rate;
  const auto frame = static_cast<std::size_t>(std::lround(cfg.frame_length * sr));
  const auto hop = static_cast<std::size_t>(std::max(1L, std::lround(cfg.hop * sr)));
  if (w.samples.size() < frame || frame < 4) {
    throw ContractError("track_pitch: waveform shorter than one analysis frame");
  }
  const auto min_lag = static_cast<std::size_t>(std::max(2.0, std::floor(sr / cfg.f0_max)));
  const auto max_lag = std::min(static_cast<std::size_t>(std::ceil(sr / cfg.f0_min)), frame / 2);

  const std::vector<double> window = hann(frame);
  std::vector<double> window_ac(max_lag + 2);
  const double window_energy = autocorr(window, 0);
  for (std::size_t lag = 0; lag < window_ac.size(); ++lag) {
    window_ac[lag] = autocorr(window, lag) / window_energy;
  }

  const std::size_t n_frames = 1 + (w.samples.size() - frame) / hop;
  PitchTrack t;
  t.sample_rate = w.sample_rate;
  t.hop = static_cast<double>(hop) / sr;
  t.frame_times.resize(n_frames);
  t.f0.assign(n_frames, 0.0);
  t.voiced.assign(n_frames, false);
  t.autocorr_peak.assign(n_frames, 0.0);

  std::vector<double> x(frame);
  std::vector<double> r(max_lag + 2);
  for (std::size_t fi = 0; fi < n_frames; ++fi) {
    const std::size_t start = fi * hop;
    t.frame_times[fi] = (static_cast<double>(start) + 0.5 * static_cast<double>(frame)) / sr;

    double mean = 0.0;
    for (std::size_t i = 0; i < frame; ++i) mean += w.samples[start + i];
    mean /= static_cast<double>(frame);
    for (std::size_t i = 0; i < frame; ++i) x[i] = (w.samples[start + i] - mean) * window[i];

    const double r0 = autocorr(x, 0);
    if (!(r0 > 1e-20)) continue;
    for (std::size_t lag = min_lag - 1; lag <= max_lag + 1 && lag < r.size(); ++lag) {
      r[lag] = autocorr(x, lag) / r0 / window_ac[lag];
    }

    double best_score = -1e300;
    double best_lag = 0.0;
    double best_peak = 0.0;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
      if (!(r[lag] > r[lag - 1] && r[lag] >= r[lag + 1])) continue;
      const double denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
      double delta = denom != 0.0 ? 0.5 * (r[lag - 1] - r[lag + 1]) / denom : 0.0;
      delta = std::clamp(delta, -0.5, 0.5);
      double peak = r[lag] - 0.25 * (r[lag - 1] - r[lag + 1]) * delta;
      // The window correction overshoots at long lags; values above 1 are folded back.
      if (peak > 1.0) peak = 1.0 / peak;
      const double frac_lag = static_cast<double>(lag) + delta;
      const double score = peak - cfg.octave_cost * std::log2(cfg.f0_min * frac_lag / sr);
      if (score > best_score) {
        best_score = score;
        best_lag = frac_lag;
        best_peak = peak;
      }
    }
    if (best_lag <= 0.0) continue;
    t.autocorr_peak[fi] = std::clamp(best_peak, 0.0, 1.0);
    if (best_peak >= cfg.voicing_threshold) {
      t.voiced[fi] = true;
      t.f0[fi] = std::clamp(sr / best_lag, cfg.f0_min, cfg.f0_max);
    }
  }
  return t;
}

}  // namespace spoofprint
