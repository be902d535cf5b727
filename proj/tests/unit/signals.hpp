#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "spoofprint/waveform.hpp"

namespace spoofprint::testing {

inline Waveform sine(double hz, double seconds, double amplitude = 1.0, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  const auto n = static_cast<std::size_t>(std::lround(seconds * sr));
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / sr);
  }
  return w;
}

inline Waveform square(double hz, double seconds, int sr = 16000) {
  Waveform w = sine(hz, seconds, 1.0, sr);
  for (double& s : w.samples) s = s >= 0.0 ? 1.0 : -1.0;
  return w;
}

/// Linear chirp f(t) = f_start + (f_end - f_start) t / seconds.
inline Waveform chirp(double f_start, double f_end, double seconds, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  const auto n = static_cast<std::size_t>(std::lround(seconds * sr));
  const double rate = (f_end - f_start) / seconds;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    w.samples[i] = 0.9 * std::sin(2.0 * std::numbers::pi * (f_start * t + 0.5 * rate * t * t));
  }
  return w;
}

inline Waveform white_noise(double seconds, double stddev, unsigned seed, int sr = 16000) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  Waveform w;
  w.sample_rate = sr;
  w.samples.resize(static_cast<std::size_t>(std::lround(seconds * sr)));
  for (double& s : w.samples) s = std::clamp(dist(gen), -1.0, 1.0);
  return w;
}

inline Waveform silence(double seconds, int sr = 16000) {
  Waveform w;
  w.sample_rate = sr;
  w.samples.assign(static_cast<std::size_t>(std::lround(seconds * sr)), 0.0);
  return w;
}

}  // namespace spoofprint::testing
