#include "spoofprint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "json.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/rng.hpp"

namespace spoofprint {
namespace {

using nlohmann::json;

constexpr int kMaxHarmonics = 40;
constexpr double kPerturbClip = 1.5;  // perturbation draws clipped to +/- this many sigma

SynthAttackerConfig make_attacker(std::string label, std::pair<double, double> f0, double jitter,
                                  double shimmer, double noise, double tilt) {
  SynthAttackerConfig a;
  a.label = std::move(label);
  a.f0_range = f0;
  a.jitter = jitter;
  a.shimmer = shimmer;
  a.noise_ratio = noise;
  a.spectral_tilt = tilt;
  return a;
}

void check_pair(std::vector<std::string>& errs, const std::string& field,
                std::pair<double, double> v, double lo, double hi) {
  if (!(v.first >= lo && v.second <= hi && v.first <= v.second)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=[%g, %g] must satisfy %g <= lo <= hi <= %g", field.c_str(),
                  v.first, v.second, lo, hi);
    errs.emplace_back(buf);
  }
}

void check_fraction(std::vector<std::string>& errs, const std::string& field, double v) {
  if (!(v >= 0.0 && v <= 0.5)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s=%g outside [0, 0.5]", field.c_str(), v);
    errs.emplace_back(buf);
  }
}

json pair_json(std::pair<double, double> p) { return json::array({p.first, p.second}); }

std::pair<double, double> pair_from(const json& j, const char* key, std::pair<double, double> def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ValidationError(std::string(key) + " must be a [lo, hi] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

SynthCorpusConfig default_synth_config() {
  SynthCorpusConfig cfg;
  cfg.attackers = {
      make_attacker("A0", {90, 220}, 0.02, 0.08, 0.10, -9.0),
      make_attacker("A01", {100, 240}, 0.00, 0.04, 0.05, -3.0),
      make_attacker("A02", {90, 220}, 0.02, 0.08, 0.10, -15.0),
      make_attacker("A03", {120, 260}, 0.05, 0.12, 0.15, -18.0),
      make_attacker("A04", {100, 240}, 0.00, 0.04, 0.05, -6.0),
      make_attacker("A05", {120, 260}, 0.05, 0.12, 0.15, -12.0),
      make_attacker("A06", {90, 220}, 0.02, 0.08, 0.10, 0.0),
      make_attacker("A07", {100, 240}, 0.10, 0.20, 0.25, -21.0),
  };
  return cfg;
}

void validate(const SynthCorpusConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.attackers.size() < 2) errs.emplace_back("attackers: at least 2 required");
  if (cfg.sample_rate < 8000) errs.emplace_back("sample_rate: must be >= 8000");
  if (cfg.utterances_per_attacker < 2) errs.emplace_back("utterances_per_attacker: must be >= 2");
  std::set<std::string> seen;
  int bonafide = 0;
  for (std::size_t i = 0; i < cfg.attackers.size(); ++i) {
    const auto& a = cfg.attackers[i];
    const std::string at = "attackers[" + std::to_string(i) + "].";
    if (a.label.empty()) errs.push_back(at + "label: empty");
    if (!seen.insert(a.label).second) errs.push_back(at + "label: duplicate '" + a.label + "'");
    if (a.label == "A0") ++bonafide;
    check_pair(errs, at + "f0_range", a.f0_range, 60.0, 500.0);
    check_fraction(errs, at + "jitter", a.jitter);
    check_fraction(errs, at + "shimmer", a.shimmer);
    check_fraction(errs, at + "noise_ratio", a.noise_ratio);
    check_pair(errs, at + "duration_range", a.duration_range, 0.05, 60.0);
    check_pair(errs, at + "amplitude_range", a.amplitude_range, 1e-4, 0.7);
    if (!(std::abs(a.spectral_tilt) <= 48.0)) errs.push_back(at + "spectral_tilt: magnitude above 48 dB/octave");
  }
  if (bonafide != 1) errs.emplace_back("attackers: exactly one bonafide attacker labeled A0 required");
  if (!errs.empty()) {
    std::string msg = "invalid synthetic corpus config: ";
    for (std::size_t i = 0; i < errs.size(); ++i) msg += (i ? "; " : "") + errs[i];
    throw ValidationError(msg);
  }
}

std::string synth_config_to_json(const SynthCorpusConfig& cfg) {
  json j;
  j["sample_rate"] = cfg.sample_rate;
  j["utterances_per_attacker"] = cfg.utterances_per_attacker;
  j["seed"] = cfg.seed;
  j["attackers"] = json::array();
  for (const auto& a : cfg.attackers) {
    j["attackers"].push_back({{"label", a.label},
                              {"f0_range", pair_json(a.f0_range)},
                              {"jitter", a.jitter},
                              {"shimmer", a.shimmer},
                              {"noise_ratio", a.noise_ratio},
                              {"spectral_tilt", a.spectral_tilt},
                              {"duration_range", pair_json(a.duration_range)},
                              {"amplitude_range", pair_json(a.amplitude_range)}});
  }
  return j.dump(2);
}

SynthCorpusConfig synth_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("synthetic corpus config: ") + e.what());
  }
  SynthCorpusConfig cfg = default_synth_config();
  try {
    cfg.sample_rate = j.value("sample_rate", cfg.sample_rate);
    cfg.utterances_per_attacker = j.value("utterances_per_attacker", cfg.utterances_per_attacker);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("attackers")) {
      cfg.attackers.clear();
      for (const auto& ja : j.at("attackers")) {
        SynthAttackerConfig a;
        a.label = ja.at("label").get<std::string>();
        a.f0_range = pair_from(ja, "f0_range", a.f0_range);
        a.jitter = ja.value("jitter", a.jitter);
        a.shimmer = ja.value("shimmer", a.shimmer);
        a.noise_ratio = ja.value("noise_ratio", a.noise_ratio);
        a.spectral_tilt = ja.value("spectral_tilt", a.spectral_tilt);
        a.duration_range = pair_from(ja, "duration_range", a.duration_range);
        a.amplitude_range = pair_from(ja, "amplitude_range", a.amplitude_range);
        cfg.attackers.push_back(std::move(a));
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synthetic corpus config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

Waveform synth_utterance(const SynthAttackerConfig& a, int sample_rate, std::uint64_t seed) {
  Rng rng(seed);
  const double f0 = rng.uniform(a.f0_range.first, a.f0_range.second);
  const double duration = rng.uniform(a.duration_range.first, a.duration_range.second);
  const double target_rms = rng.uniform(a.amplitude_range.first, a.amplitude_range.second);
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(duration * sample_rate)));

  // Highest instantaneous F0 after jitter must keep every harmonic below Nyquist.
  const double f0_peak = f0 / std::max(0.25, 1.0 - kPerturbClip * a.jitter);
  const int harmonics =
      std::clamp(static_cast<int>(0.45 * sample_rate / f0_peak), 1, kMaxHarmonics);
  std::vector<double> gain(harmonics);
  std::vector<double> phase(harmonics);
  for (int h = 0; h < harmonics; ++h) {
    gain[h] = std::pow(10.0, a.spectral_tilt * std::log2(h + 1.0) / 20.0);
    phase[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  // Period boundaries (seconds) and per-period amplitudes.
  std::vector<double> starts{0.0};
  std::vector<double> lengths;
  std::vector<double> amps;
  const double end = static_cast<double>(n) / sample_rate;
  while (starts.back() < end) {
    const double dz = std::clamp(rng.normal(), -kPerturbClip, kPerturbClip);
    const double az = std::clamp(rng.normal(), -kPerturbClip, kPerturbClip);
    lengths.push_back((1.0 / f0) * (1.0 + a.jitter * dz));
    amps.push_back(std::max(0.05, 1.0 + a.shimmer * az));
    starts.push_back(starts.back() + lengths.back());
  }

  std::vector<double> harmonic(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    while (starts[k + 1] <= t) ++k;
    const double frac = (t - starts[k]) / lengths[k];
    const double cycle = 2.0 * std::numbers::pi * (static_cast<double>(k) + frac);
    // Amplitude moves linearly between period midpoints.
    double amp = amps[k];
    if (frac < 0.5 && k > 0) {
      amp = amps[k - 1] + (amps[k] - amps[k - 1]) * (frac + 0.5);
    } else if (frac >= 0.5 && k + 1 < amps.size()) {
      amp = amps[k] + (amps[k + 1] - amps[k]) * (frac - 0.5);
    }
    double v = 0.0;
    for (int h = 0; h < harmonics; ++h) v += gain[h] * std::sin((h + 1) * cycle + phase[h]);
    harmonic[i] = amp * v;
  }

  double energy = 0.0;
  for (double v : harmonic) energy += v * v;
  const double harmonic_rms = std::sqrt(energy / static_cast<double>(n));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = harmonic_rms > 0.0 ? harmonic[i] / harmonic_rms : 0.0;
    w.samples[i] = h + a.noise_ratio * rng.normal();
  }
  double total = 0.0;
  double peak = 0.0;
  for (double v : w.samples) {
    total += v * v;
    peak = std::max(peak, std::abs(v));
  }
  const double rms = std::sqrt(total / static_cast<double>(n));
  double scale = rms > 0.0 ? target_rms / rms : 0.0;
  if (peak * scale > 0.99) scale = 0.99 / peak;
  for (double& v : w.samples) v *= scale;
  return w;
}

DatasetManifest synth_corpus(const SynthCorpusConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  std::vector<UtteranceRecord> records;
  records.reserve(cfg.attackers.size() * static_cast<std::size_t>(cfg.utterances_per_attacker));
  std::set<AttackerLabel> labels;
  for (std::size_t ai = 0; ai < cfg.attackers.size(); ++ai) {
    const auto& a = cfg.attackers[ai];
    labels.insert(AttackerLabel(a.label));
    for (int u = 0; u < cfg.utterances_per_attacker; ++u) {
      const std::uint64_t utt_seed = Rng::mix(seed, ai * 1000003ULL + static_cast<std::uint64_t>(u));
      char id[64];
      std::snprintf(id, sizeof id, "%s_%04d", a.label.c_str(), u);
      UtteranceRecord rec;
      rec.utterance_id = id;
      rec.source = synth_utterance(a, cfg.sample_rate, utt_seed);
      rec.label = AttackerLabel(a.label);
      records.push_back(std::move(rec));
    }
  }
  return DatasetManifest(std::move(records), {"synthetic", "seed=" + std::to_string(seed) + " " +
                                                               synth_config_to_json(cfg)},
                         std::move(labels));
}

}  // namespace spoofprint
