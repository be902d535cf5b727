#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spoofprint/errors.hpp"

namespace spoofprint::cli {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ValidationError("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_frame(const json& j, FrameConfig& f) {
  check_keys(j, "frame", {"frame_length", "hop", "f0_min", "f0_max", "voicing_threshold", "octave_cost"});
  read(j, "frame_length", f.frame_length);
  read(j, "hop", f.hop);
  read(j, "f0_min", f.f0_min);
  read(j, "f0_max", f.f0_max);
  read(j, "voicing_threshold", f.voicing_threshold);
  read(j, "octave_cost", f.octave_cost);
  validate(f);
}

void read_mel(const json& j, MelConfig& m) {
  check_keys(j, "mel", {"n_mels", "window", "hop", "fft_size", "log_floor"});
  read(j, "n_mels", m.n_mels);
  read(j, "window", m.window);
  read(j, "hop", m.hop);
  read(j, "fft_size", m.fft_size);
  read(j, "log_floor", m.log_floor);
}

void read_training(const json& j, TrainingConfig& t) {
  check_keys(j, "training", {"scale", "classes_per_batch", "utterances_per_class", "learning_rate", "steps",
                             "clip_norm", "hidden", "embed_dim", "optimizer"});
  if (j.contains("scale")) {
    const auto scale = j.at("scale").get<std::string>();
    if (scale == "full") {
      t.hidden = 768;
      t.embed_dim = 256;
    } else if (scale != "desk") {
      throw ValidationError("config: training.scale must be 'desk' or 'full'");
    }
  }
  read(j, "classes_per_batch", t.classes_per_batch);
  read(j, "utterances_per_class", t.utterances_per_class);
  read(j, "learning_rate", t.learning_rate);
  read(j, "steps", t.steps);
  read(j, "clip_norm", t.clip_norm);
  read(j, "hidden", t.hidden);
  read(j, "embed_dim", t.embed_dim);
  if (j.contains("optimizer")) {
    const auto name = j.at("optimizer").get<std::string>();
    if (name == "sgd") {
      t.optimizer = Optimizer::sgd;
    } else if (name == "adam") {
      t.optimizer = Optimizer::adam;
    } else {
      throw ValidationError("config: training.optimizer must be 'sgd' or 'adam'");
    }
  }
  validate(t);
}

void read_classifier(const json& j, ClassifierConfig& c) {
  check_keys(j, "classifier", {"learning_rate", "epochs", "batch_size"});
  read(j, "learning_rate", c.learning_rate);
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  if (!(c.learning_rate > 0.0) || c.epochs < 1 || c.batch_size < 1) {
    throw ValidationError("config: classifier needs learning_rate > 0, epochs >= 1, batch_size >= 1");
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  try {
    check_keys(j, "config", {"frame", "mel", "training", "classifier", "synth", "split", "part", "threads", "seed"});
    if (j.contains("frame")) read_frame(j.at("frame"), cfg.frame);
    if (j.contains("mel")) read_mel(j.at("mel"), cfg.mel);
    if (j.contains("training")) read_training(j.at("training"), cfg.training);
    if (j.contains("classifier")) read_classifier(j.at("classifier"), cfg.classifier);
    if (j.contains("synth")) cfg.synth = synth_config_from_json(j.at("synth").dump());
    if (j.contains("split")) {
      const json& s = j.at("split");
      cfg.split = s.is_string() ? std::vector<std::string>{s.get<std::string>()} : s.get<std::vector<std::string>>();
    }
    read(j, "part", cfg.part);
    read(j, "threads", cfg.threads);
    read(j, "seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pipeline_config(ss.str());
}

}  // namespace spoofprint::cli
