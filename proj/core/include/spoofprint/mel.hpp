#pragma once

#include <Eigen/Dense>

#include "spoofprint/waveform.hpp"

namespace spoofprint {

/// Row t holds the log-mel energies of frame t.
using FrameMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MelConfig {
  int n_mels = 40;
  double window = 0.025;  // s
  double hop = 0.010;     // s
  int fft_size = 512;
  double log_floor = 1e-6;
};

/// Throws ValidationError when the config cannot be applied at this sample rate.
void validate(const MelConfig& cfg, int sample_rate);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// [n_mels x (fft_size/2 + 1)] triangular HTK-scale filterbank spanning 0 Hz to Nyquist.
Eigen::MatrixXd mel_filterbank(const MelConfig& cfg, int sample_rate);

/// Number of frames: floor((N - window) / hop) + 1.
std::size_t frame_count(std::size_t n_samples, const MelConfig& cfg, int sample_rate);

/// Hann-windowed FFT magnitude -> mel filterbank -> ln(value + log_floor). [T x n_mels].
FrameMatrix log_mel(const Waveform& w, const MelConfig& cfg);

}  // namespace spoofprint
