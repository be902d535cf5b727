#include "spoofprint/mel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "spoofprint/errors.hpp"

namespace spoofprint {
namespace {

std::size_t samples_of(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::lround(seconds * sample_rate));
}

}  // namespace

void validate(const MelConfig& cfg, int sample_rate) {
  if (cfg.n_mels < 1) throw ValidationError("mel config: n_mels must be >= 1");
  if (!(cfg.window > 0.0 && cfg.hop > 0.0)) throw ValidationError("mel config: window and hop must be positive");
  if (!(cfg.log_floor > 0.0)) throw ValidationError("mel config: log_floor must be positive");
  if (static_cast<double>(cfg.fft_size) < cfg.window * sample_rate - 1e-9) {
    throw ValidationError("mel config: fft_size smaller than the analysis window");
  }
  if (samples_of(cfg.hop, sample_rate) < 1) throw ValidationError("mel config: hop below one sample");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::MatrixXd mel_filterbank(const MelConfig& cfg, int sample_rate) {
  const int bins = cfg.fft_size / 2 + 1;
  const double top = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(cfg.n_mels + 1));
  }
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / cfg.fft_size;
      if (f > lo && f < mid) {
        fb(m, k) = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        fb(m, k) = (hi - f) / (hi - mid);
      }
    }
  }
  return fb;
}

std::size_t frame_count(std::size_t n_samples, const MelConfig& cfg, int sample_rate) {
  const std::size_t win = samples_of(cfg.window, sample_rate);
  const std::size_t hop = samples_of(cfg.hop, sample_rate);
  if (n_samples < win) return 0;
  return (n_samples - win) / hop + 1;
}

FrameMatrix log_mel(const Waveform& w, const MelConfig& cfg) {
  validate(cfg, w.sample_rate);
  const std::size_t win = samples_of(cfg.window, w.sample_rate);
  const std::size_t hop = samples_of(cfg.hop, w.sample_rate);
  const std::size_t frames = frame_count(w.samples.size(), cfg, w.sample_rate);
  if (frames == 0) throw ContractError("log_mel: waveform shorter than one analysis window");

  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(win > 1 ? win - 1 : 1));
  }
  const Eigen::MatrixXd fb = mel_filterbank(cfg, w.sample_rate);
  const int bins = cfg.fft_size / 2 + 1;

  Eigen::FFT<double> fft;
  std::vector<double> buf(static_cast<std::size_t>(cfg.fft_size), 0.0);
  std::vector<std::complex<double>> spec;
  Eigen::VectorXd mag(bins);
  FrameMatrix out(static_cast<Eigen::Index>(frames), cfg.n_mels);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < win; ++i) buf[i] = w.samples[t * hop + i] * window[i];
    fft.fwd(spec, buf);
    for (int k = 0; k < bins; ++k) mag(k) = std::abs(spec[static_cast<std::size_t>(k)]);
    const Eigen::VectorXd mel = fb * mag;
    for (int m = 0; m < cfg.n_mels; ++m) {
      out(static_cast<Eigen::Index>(t), m) = std::log(mel(m) + cfg.log_floor);
    }
  }
  return out;
}

}  // namespace spoofprint
