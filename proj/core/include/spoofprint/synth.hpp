#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spoofprint/manifest.hpp"

namespace spoofprint {

/// Generative parameters for one synthetic attacker. Utterances are harmonic
/// pulse trains whose per-period length and amplitude are perturbed, shaped
/// by a spectral tilt and mixed with white noise.
struct SynthAttackerConfig {
  std::string label;                                   // "A0" marks bonafide
  std::pair<double, double> f0_range{100.0, 200.0};    // Hz, per-utterance base F0
  double jitter = 0.0;                                 // period perturbation fraction
  double shimmer = 0.0;                                // amplitude perturbation fraction
  double noise_ratio = 0.0;                            // noise rms / harmonic rms
  double spectral_tilt = -6.0;                         // dB per octave across harmonics
  std::pair<double, double> duration_range{0.6, 1.0};  // seconds
  std::pair<double, double> amplitude_range{0.05, 0.3};  // target rms
};

struct SynthCorpusConfig {
  std::vector<SynthAttackerConfig> attackers;
  int sample_rate = 16000;
  int utterances_per_attacker = 80;
  std::uint64_t seed = 7;
};

/// The built-in desk-scale corpus: bonafide A0 plus A01..A07. Attackers fall into
/// groups sharing every low-level parameter; each attacker has its own spectral tilt.
SynthCorpusConfig default_synth_config();

/// Throws ValidationError listing every offending field.
void validate(const SynthCorpusConfig& cfg);

/// JSON object form of the config (the --config file of synth-corpus).
std::string synth_config_to_json(const SynthCorpusConfig& cfg);
/// Keys absent from the JSON keep their defaults; validates the result.
SynthCorpusConfig synth_config_from_json(const std::string& text);

/// Renders one utterance; pure function of (attacker, sample_rate, seed).
Waveform synth_utterance(const SynthAttackerConfig& attacker, int sample_rate, std::uint64_t seed);

/// Deterministic corpus with inline waveforms, ids "<label>_<nnnn>", labels attached.
DatasetManifest synth_corpus(const SynthCorpusConfig& cfg, std::uint64_t seed);

}  // namespace spoofprint
