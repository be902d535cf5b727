#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spoofprint/manifest.hpp"
#include "spoofprint/waveform.hpp"

namespace spoofprint {

/// Analysis parameters for the autocorrelation pitch tracker.
struct FrameConfig {
  double frame_length = 0.040;  // s
  double hop = 0.010;           // s
  double f0_min = 60.0;         // Hz
  double f0_max = 500.0;        // Hz
  double voicing_threshold = 0.45;
  /// Per-octave penalty on longer lags when ranking autocorrelation peaks; keeps
  /// the tracker from settling on a sub-harmonic whose peak ties the true one.
  double octave_cost = 0.01;
};

/// Throws ValidationError unless frame_length >= 2/f0_min, 0 < hop <= frame_length,
/// 0 < f0_min < f0_max and the threshold lies in (0, 1).
void validate(const FrameConfig& cfg);

struct PitchTrack {
  std::vector<double> frame_times;    // s, frame centers
  std::vector<double> f0;             // Hz, 0 when unvoiced
  std::vector<bool> voiced;
  std::vector<double> autocorr_peak;  // normalized autocorrelation at the chosen lag, in [0, 1]
  int sample_rate = 0;                // 0 for hand-built tracks
  double hop = 0.0;                   // s

  std::size_t size() const { return f0.size(); }
  std::size_t voiced_count() const;
};

/// Frame-wise F0 from the highest window-corrected normalized autocorrelation peak
/// in [sr/f0_max, sr/f0_min]. Frames are mean-removed and Hann-windowed first.
PitchTrack track_pitch(const Waveform& w, const FrameConfig& cfg);

/// A value together with whether it came from the degraded (not enough voicing) path.
struct ScalarFeature {
  double value = 0.0;
  bool degraded = false;
};

struct F0Stats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double std = 0.0;  // population
  double mas = 0.0;  // mean absolute slope, Hz/s
  bool degraded = false;
};

F0Stats f0_stats(const PitchTrack& t);

/// mean(|v[i] - v[i-1]|) over adjacent positive entries divided by the mean of the positive
/// entries. Non-positive entries mark gaps. Degraded (0) when no adjacent pair exists.
ScalarFeature local_perturbation(std::span<const double> values);

/// Local jitter of the frame-level period sequence T = 1/f0.
ScalarFeature jitter(const PitchTrack& t);

/// Peak |sample| inside one pitch period centered on each voiced frame; 0 for unvoiced frames.
std::vector<double> period_amplitudes(const Waveform& w, const PitchTrack& t);

/// Local shimmer of period_amplitudes().
ScalarFeature shimmer(const Waveform& w, const PitchTrack& t);

struct HnrStats {
  double mean = 0.0;  // dB
  double std = 0.0;   // dB, population
  bool degraded = false;
};

inline constexpr double kHnrClamp = 1e-6;

/// HNR_frame = 10 log10(r / (1 - r)) with r clamped to [1e-6, 1 - 1e-6], over voiced frames.
HnrStats hnr(const PitchTrack& t);
HnrStats hnr(const Waveform& w, const FrameConfig& cfg);

inline constexpr double kDbFloor = -120.0;

/// 20 log10(rms), floored at -120 dB.
double loudness_dbfs(const Waveform& w);

struct AmplitudeStats {
  double peak_amplitude = 0.0;
  double peak_dbfs = kDbFloor;
  double power = 0.0;   // energy / duration_seconds
  double energy = 0.0;  // sum of squares
};

AmplitudeStats amplitude_power_energy(const Waveform& w);

inline constexpr double kGenderF0Threshold = 165.0;  // Hz

/// Metadata wins; otherwise 1 iff the median voiced F0 exceeds 165 Hz. Degraded (0) if unvoiced.
ScalarFeature gender_flag(std::optional<Gender> metadata, const PitchTrack& t);

/// The 16-dimensional low-level signature. Field order is fixed and matches field_names().
struct LowLevelSignature {
  double f0_mean = 0.0;
  double f0_min = 0.0;
  double f0_max = 0.0;
  double f0_std = 0.0;
  double f0_mas = 0.0;
  double jitter = 0.0;
  double shimmer = 0.0;
  double gender = 0.0;
  double duration = 0.0;
  double loudness_dbfs = kDbFloor;
  double peak_amplitude = 0.0;
  double peak_dbfs = kDbFloor;
  double power = 0.0;
  double energy = 0.0;
  double hnr_mean = 0.0;
  double hnr_std = 0.0;
  bool degraded = false;

  static constexpr std::size_t kDim = 16;
  static const std::array<std::string_view, kDim>& field_names();

  std::array<double, kDim> to_array() const;
  static LowLevelSignature from_array(std::span<const double> values, bool degraded);
};

LowLevelSignature extract_signature(const Waveform& w, std::optional<Gender> gender,
                                    const FrameConfig& cfg);
/// Loads the record's audio and extracts; propagates I/O and format errors.
LowLevelSignature extract_signature(const UtteranceRecord& rec, const FrameConfig& cfg);

}  // namespace spoofprint
