#include "spoofprint/lowlevel.hpp"

#include <algorithm>
#include <cmath>

#include "spoofprint/errors.hpp"

namespace spoofprint {

F0Stats f0_stats(const PitchTrack& t) {
  F0Stats s;
  std::vector<double> voiced;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.voiced[i]) voiced.push_back(t.f0[i]);
  }
  if (voiced.size() < 2) {
    s.degraded = true;
    return s;
  }
  double sum = 0.0;
  s.min = voiced.front();
  s.max = voiced.front();
  for (double f : voiced) {
    sum += f;
    s.min = std::min(s.min, f);
    s.max = std::max(s.max, f);
  }
  s.mean = sum / static_cast<double>(voiced.size());
  double sq = 0.0;
  for (double f : voiced) sq += (f - s.mean) * (f - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(voiced.size()));

  double slope = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t.voiced[i] && t.voiced[i - 1])) continue;
    const double dt = t.frame_times[i] - t.frame_times[i - 1];
    if (dt <= 0.0) continue;
    slope += std::abs(t.f0[i] - t.f0[i - 1]) / dt;
    ++pairs;
  }
  s.mas = pairs > 0 ? slope / static_cast<double>(pairs) : 0.0;
  return s;
}

ScalarFeature local_perturbation(std::span<const double> values) {
  double diff = 0.0;
  std::size_t pairs = 0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    sum += values[i];
    ++count;
    if (i > 0 && values[i - 1] > 0.0) {
      diff += std::abs(values[i] - values[i - 1]);
      ++pairs;
    }
  }
  if (pairs == 0 || sum <= 0.0) return {0.0, true};
  return {(diff / static_cast<double>(pairs)) / (sum / static_cast<double>(count)), false};
}

ScalarFeature jitter(const PitchTrack& t) {
  std::vector<double> periods(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.voiced[i] && t.f0[i] > 0.0) periods[i] = 1.0 / t.f0[i];
  }
  return local_perturbation(periods);
}

std::vector<double> period_amplitudes(const Waveform& w, const PitchTrack& t) {
  std::vector<double> amps(t.size(), 0.0);
  const double sr = w.sample_rate;
  const auto n = static_cast<long>(w.samples.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t.voiced[i] || t.f0[i] <= 0.0) continue;
    const long period = std::max(1L, std::lround(sr / t.f0[i]));
    const long center = std::lround(t.frame_times[i] * sr);
    const long lo = std::clamp(center - period / 2, 0L, n);
    const long hi = std::clamp(lo + period, 0L, n);
    double peak = 0.0;
    for (long k = lo; k < hi; ++k) peak = std::max(peak, std::abs(w.samples[static_cast<std::size_t>(k)]));
    amps[i] = peak;
  }
  return amps;
}

ScalarFeature shimmer(const Waveform& w, const PitchTrack& t) {
  return local_perturbation(period_amplitudes(w, t));
}

HnrStats hnr(const PitchTrack& t) {
  std::vector<double> frames;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t.voiced[i]) continue;
    const double r = std::clamp(t.autocorr_peak[i], kHnrClamp, 1.0 - kHnrClamp);
    frames.push_back(10.0 * std::log10(r / (1.0 - r)));
  }
  HnrStats s;
  if (frames.empty()) {
    s.degraded = true;
    return s;
  }
  double sum = 0.0;
  for (double v : frames) sum += v;
  s.mean = sum / static_cast<double>(frames.size());
  double sq = 0.0;
  for (double v : frames) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(frames.size()));
  return s;
}

HnrStats hnr(const Waveform& w, const FrameConfig& cfg) { return hnr(track_pitch(w, cfg)); }

double loudness_dbfs(const Waveform& w) {
  if (w.samples.empty()) return kDbFloor;
  double sq = 0.0;
  for (double v : w.samples) sq += v * v;
  const double rms = std::sqrt(sq / static_cast<double>(w.samples.size()));
  if (rms <= 0.0) return kDbFloor;
  return std::max(kDbFloor, 20.0 * std::log10(rms));
}

AmplitudeStats amplitude_power_energy(const Waveform& w) {
  AmplitudeStats s;
  for (double v : w.samples) {
    s.peak_amplitude = std::max(s.peak_amplitude, std::abs(v));
    s.energy += v * v;
  }
  s.peak_dbfs = s.peak_amplitude > 0.0 ? std::max(kDbFloor, 20.0 * std::log10(s.peak_amplitude))
                                       : kDbFloor;
  const double duration = w.duration_seconds();
  s.power = duration > 0.0 ? s.energy / duration : 0.0;
  return s;
}

ScalarFeature gender_flag(std::optional<Gender> metadata, const PitchTrack& t) {
  if (metadata) return {*metadata == Gender::female ? 1.0 : 0.0, false};
  std::vector<double> voiced;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.voiced[i]) voiced.push_back(t.f0[i]);
  }
  if (voiced.empty()) return {0.0, true};
  std::sort(voiced.begin(), voiced.end());
  const std::size_t m = voiced.size() / 2;
  const double median = voiced.size() % 2 ? voiced[m] : 0.5 * (voiced[m - 1] + voiced[m]);
  return {median > kGenderF0Threshold ? 1.0 : 0.0, false};
}

const std::array<std::string_view, LowLevelSignature::kDim>& LowLevelSignature::field_names() {
  static const std::array<std::string_view, kDim> names = {
      "f0_mean", "f0_min",        "f0_max",         "f0_std",    "f0_mas", "jitter",
      "shimmer", "gender",        "duration",       "loudness_dbfs", "peak_amplitude",
      "peak_dbfs", "power",       "energy",         "hnr_mean",  "hnr_std"};
  return names;
}

std::array<double, LowLevelSignature::kDim> LowLevelSignature::to_array() const {
  return {f0_mean, f0_min,         f0_max,    f0_std, f0_mas, jitter,   shimmer,  gender,
          duration, loudness_dbfs, peak_amplitude, peak_dbfs, power, energy, hnr_mean, hnr_std};
}

LowLevelSignature LowLevelSignature::from_array(std::span<const double> v, bool degraded) {
  if (v.size() != kDim) throw ShapeError("low-level signature needs exactly 16 values");
  LowLevelSignature s;
  s.f0_mean = v[0];
  s.f0_min = v[1];
  s.f0_max = v[2];
  s.f0_std = v[3];
  s.f0_mas = v[4];
  s.jitter = v[5];
  s.shimmer = v[6];
  s.gender = v[7];
  s.duration = v[8];
  s.loudness_dbfs = v[9];
  s.peak_amplitude = v[10];
  s.peak_dbfs = v[11];
  s.power = v[12];
  s.energy = v[13];
  s.hnr_mean = v[14];
  s.hnr_std = v[15];
  s.degraded = degraded;
  return s;
}

LowLevelSignature extract_signature(const Waveform& w, std::optional<Gender> gender,
                                    const FrameConfig& cfg) {
  validate(w);
  const PitchTrack track = track_pitch(w, cfg);
  LowLevelSignature s;

  const F0Stats f0 = f0_stats(track);
  s.f0_mean = f0.mean;
  s.f0_min = f0.min;
  s.f0_max = f0.max;
  s.f0_std = f0.std;
  s.f0_mas = f0.mas;

  const ScalarFeature jit = jitter(track);
  const ScalarFeature shim = shimmer(w, track);
  const ScalarFeature sex = gender_flag(gender, track);
  s.jitter = jit.value;
  s.shimmer = shim.value;
  s.gender = sex.value;

  s.duration = w.duration_seconds();
  s.loudness_dbfs = loudness_dbfs(w);
  const AmplitudeStats amp = amplitude_power_energy(w);
  s.peak_amplitude = amp.peak_amplitude;
  s.peak_dbfs = amp.peak_dbfs;
  s.power = amp.power;
  s.energy = amp.energy;

  const HnrStats h = hnr(track);
  s.hnr_mean = h.mean;
  s.hnr_std = h.std;

  s.degraded = f0.degraded || jit.degraded || shim.degraded || sex.degraded || h.degraded;
  return s;
}

LowLevelSignature extract_signature(const UtteranceRecord& rec, const FrameConfig& cfg) {
  return extract_signature(load_waveform(rec), rec.gender, cfg);
}

}  // namespace spoofprint
