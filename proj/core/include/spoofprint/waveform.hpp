#pragma once

#include <filesystem>
#include <vector>

namespace spoofprint {

/// Mono PCM audio, full scale = +/-1.0.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws ContractError unless the waveform is non-empty, in range and has a positive rate.
void validate(const Waveform& w);

/// Reads a RIFF/WAVE file holding 16-bit mono PCM. Samples are scaled by 1/32768; no resampling.
Waveform read_wav(const std::filesystem::path& path);

/// Writes 16-bit mono PCM. Samples are rounded to the nearest code and clipped to [-32768, 32767].
void write_wav(const Waveform& w, const std::filesystem::path& path);

}  // namespace spoofprint
