#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spoofprint/cluster_metrics.hpp"
#include "spoofprint/container.hpp"
#include "spoofprint/embedding_io.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/feature_table.hpp"
#include "spoofprint/grad_check.hpp"
#include "spoofprint/parallel.hpp"
#include "spoofprint/rng.hpp"
#include "tables.hpp"

namespace spoofprint::cli {
namespace {

using nlohmann::json;

void log(const std::string& msg) { std::cerr << "[spoofprint] " << msg << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

std::string join_labels(const std::set<AttackerLabel>& labels) {
  std::string out;
  for (const auto& l : labels) out += (out.empty() ? "" : ",") + l.str();
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Rows of `t` kept by the configured split chain, with a log line naming what was kept.
LabeledTable select_rows(const PipelineConfig& cfg, const LabeledTable& t) {
  const SplitChain chain(cfg.split);
  if (chain.empty()) return t;
  LabeledTable out = t.subset(chain.select(t, cfg.part, cfg.seed));
  log("split " + chain.describe() + ", part " + cfg.part + ": " + std::to_string(out.size()) + " of " +
      std::to_string(t.size()) + " rows");
  if (out.size() == 0) throw ContractError("split left no rows");
  return out;
}

std::vector<AttackerLabel> shuffled(std::vector<AttackerLabel> y, std::uint64_t seed) {
  Rng rng(seed);
  rng.shuffle(y.begin(), y.end());
  return y;
}

ClusterReport cluster_report(const PipelineConfig& cfg, const EvalArgs& a, LabeledTable& t) {
  if (!t.fully_labeled()) throw ContractError("var_C needs a label on every row");
  std::vector<AttackerLabel> y = t.label_vector();
  if (a.shuffle_labels) y = shuffled(std::move(y), cfg.seed);
  const auto conv = a.sum_over_dims ? VarianceConvention::sum_over_dims : VarianceConvention::mean_over_dims;
  ClusterReport r = avg_class_conditional_variance(t.X, y, conv);
  for (auto k : r.zero_variance) log("zero-variance dimension " + t.columns[static_cast<std::size_t>(k)] + " zeroed");
  return r;
}

}  // namespace

int synth_corpus_cmd(const PipelineConfig& cfg, const SynthArgs& a) {
  SynthCorpusConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  if (a.utterances) sc.utterances_per_attacker = *a.utterances;
  validate(sc);
  const DatasetManifest inline_m = synth_corpus(sc, sc.seed);
  fs::create_directories(a.out_dir / "audio");
  std::vector<UtteranceRecord> recs;
  recs.reserve(inline_m.size());
  for (const auto& r : inline_m.records()) {
    const fs::path rel = fs::path("audio") / (r.utterance_id + ".wav");
    write_wav(std::get<Waveform>(r.source), a.out_dir / rel);
    UtteranceRecord out = r;
    out.source = a.out_dir / rel;
    recs.push_back(std::move(out));
  }
  const DatasetManifest m(std::move(recs), inline_m.provenance(), inline_m.label_set());
  write_manifest_jsonl(m, a.out_dir / "manifest.jsonl");
  write_text(a.out_dir / "synth_config.json", synth_config_to_json(sc));
  log("wrote " + std::to_string(m.size()) + " utterances of " + std::to_string(m.present_labels().size()) +
      " labels to " + a.out_dir.string());
  return kExitOk;
}

int parse_protocol_cmd(const PipelineConfig&, const ProtocolArgs& a) {
  const ProtocolParse p = parse_asvspoof_protocol(a.protocol, a.audio_dir);
  for (const auto& w : p.warnings) log("warning: " + w);
  write_manifest_jsonl(p.manifest, a.out);
  log("wrote " + std::to_string(p.manifest.size()) + " records, labels " + join_labels(p.manifest.present_labels()));
  return p.warnings.empty() ? kExitOk : kExitPartial;
}

int extract_features_cmd(const PipelineConfig& cfg, const ExtractArgs& a) {
  validate(cfg.frame);
  const DatasetManifest m = read_manifest_jsonl(a.manifest);
  std::vector<std::optional<FeatureRow>> rows(m.size());
  std::vector<std::string> errors(m.size());
  parallel_for(m.size(), cfg.threads, [&](std::size_t i) {
    const auto& r = m.records()[i];
    try {
      rows[i] = FeatureRow{r.utterance_id, r.label, extract_signature(r, cfg.frame)};
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  std::vector<FeatureRow> ok;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (rows[i]) {
      ok.push_back(std::move(*rows[i]));
    } else {
      ++failed;
      log("failed " + m.records()[i].utterance_id + ": " + errors[i]);
    }
  }
  write_feature_csv(ok, a.out);
  const auto degraded = std::count_if(ok.begin(), ok.end(), [](const FeatureRow& r) { return r.signature.degraded; });
  log("extracted " + std::to_string(ok.size()) + " signatures (" + std::to_string(degraded) + " degraded, " +
      std::to_string(failed) + " failed)");
  return failed ? kExitPartial : kExitOk;
}

int eval_features_cmd(const PipelineConfig& cfg, const EvalArgs& a) {
  LabeledTable t = select_rows(cfg, load_table(a.input));
  const ClusterReport r = cluster_report(cfg, a, t);
  write_text(a.out, dimension_report_csv(r, t.columns));
  if (a.classes_out) write_text(*a.classes_out, cluster_report_csv(r));
  std::cout << "var_C " << fmt(r.average) << " over " << r.classes.size() << " classes, " << r.n << " rows\n";
  return kExitOk;
}

int eval_clusters_cmd(const PipelineConfig& cfg, const EvalArgs& a) {
  LabeledTable t = select_rows(cfg, load_table(a.input));
  const ClusterReport r = cluster_report(cfg, a, t);
  write_text(a.out, cluster_report_csv(r));
  if (a.classes_out) write_text(*a.classes_out, dimension_report_csv(r, t.columns));
  std::cout << "var_C " << fmt(r.average) << " over " << r.classes.size() << " classes, " << r.n << " rows\n";
  return kExitOk;
}

int train_embedder_cmd(const PipelineConfig& cfg, const TrainEmbedderArgs& a) {
  TrainingConfig tc = cfg.training;
  tc.seed = cfg.seed;
  validate(tc);
  validate(cfg.mel, 16000);
  const DatasetManifest all = read_manifest_jsonl(a.manifest);
  const SplitChain chain(cfg.split);
  // Training always uses the train part of the last step.
  const DatasetManifest m = chain.apply(all, "train", cfg.seed);
  std::set<AttackerLabel> excluded;
  const auto kept = m.present_labels();
  for (const auto& l : all.present_labels()) {
    if (!kept.contains(l)) excluded.insert(l);
  }
  log("split " + chain.describe() + ": training on " + std::to_string(m.size()) + " of " +
      std::to_string(all.size()) + " records");
  log("training labels: " + join_labels(kept));
  log("excluded labels: " + (excluded.empty() ? std::string("none") : join_labels(excluded)));

  const auto frames = compute_log_mels(m, cfg.mel, cfg.threads);
  std::ostringstream csv;
  csv << "step,loss,grad_norm\n";
  const TrainingResult r = train(m, frames, tc, [&](const TrainingLogEntry& e) {
    csv << e.step << ',' << fmt(e.loss) << ',' << fmt(e.grad_norm) << '\n';
    if ((e.step + 1) % 50 == 0) log("step " + std::to_string(e.step + 1) + " loss " + fmt(e.loss));
  });
  save_checkpoint(r.params, a.out);
  if (a.log) write_text(*a.log, csv.str());
  log("saved checkpoint " + a.out.string() + " (" + std::to_string(r.params.values.size()) + " parameters)");
  return kExitOk;
}

int embed_cmd(const PipelineConfig& cfg, const EmbedArgs& a) {
  const EmbeddingNetworkParams p = load_checkpoint(a.checkpoint);
  if (p.shape.input_dim != cfg.mel.n_mels) {
    throw ShapeError("checkpoint expects " + std::to_string(p.shape.input_dim) + " mel bands, config has " +
                     std::to_string(cfg.mel.n_mels));
  }
  const DatasetManifest m = read_manifest_jsonl(a.manifest);
  std::vector<std::optional<EmbeddingRecord>> rows(m.size());
  std::vector<std::string> errors(m.size());
  parallel_for(m.size(), cfg.threads, [&](std::size_t i) {
    const auto& r = m.records()[i];
    try {
      rows[i] = EmbeddingRecord{r.utterance_id, r.label, embed(p, log_mel(load_waveform(r), cfg.mel))};
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  std::vector<EmbeddingRecord> ok;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (rows[i]) {
      ok.push_back(std::move(*rows[i]));
    } else {
      ++failed;
      log("failed " + m.records()[i].utterance_id + ": " + errors[i]);
    }
  }
  write_embeddings_jsonl(ok, a.out);
  log("embedded " + std::to_string(ok.size()) + " utterances (" + std::to_string(failed) + " failed)");
  return failed ? kExitPartial : kExitOk;
}

int project_cmd(const PipelineConfig& cfg, const ProjectArgs& a) {
  const LabeledTable t = select_rows(cfg, load_table(a.input));
  const Projection2D p = pca_2d(standard_normalize(t.X).X);
  std::vector<AttackerLabel> y;
  for (const auto& l : t.labels) y.push_back(l.value_or(AttackerLabel("unlabeled")));
  scatter_export(p, y, a.out_csv, a.out_svg);
  std::cout << "explained variance " << fmt(p.explained_ratio(0)) << ' ' << fmt(p.explained_ratio(1)) << '\n';
  return kExitOk;
}

int train_classifier_cmd(const PipelineConfig& cfg, const TrainClassifierArgs& a) {
  PipelineConfig c = cfg;
  c.part = "train";
  const LabeledTable t = select_rows(c, load_table(a.input));
  ClassifierConfig cc = cfg.classifier;
  cc.seed = cfg.seed;
  const MLPParams p = train_classifier(t.X, t.label_vector(), cc);
  save_classifier(p, a.out);
  std::set<AttackerLabel> classes(p.classes.begin(), p.classes.end());
  log("trained on " + std::to_string(t.size()) + " rows, classes " + join_labels(classes));
  return kExitOk;
}

int classify_cmd(const PipelineConfig& cfg, const ClassifyArgs& a) {
  const MLPParams p = load_classifier(a.model);
  const LabeledTable t = select_rows(cfg, load_table(a.input));
  if (t.X.cols() != p.input_dim) {
    throw ShapeError("classifier expects " + std::to_string(p.input_dim) + "-dimensional input, table has " +
                     std::to_string(t.X.cols()));
  }
  std::vector<AttackerLabel> predicted;
  std::ostringstream pred_csv;
  pred_csv << "utterance_id,label,predicted,probability\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Prediction pr = predict(p, t.X.row(static_cast<Eigen::Index>(i)).transpose());
    predicted.push_back(pr.label);
    pred_csv << t.ids[i] << ',' << (t.labels[i] ? t.labels[i]->str() : "") << ',' << pr.label.str() << ','
             << fmt(pr.probabilities(static_cast<Eigen::Index>(pr.index))) << '\n';
  }
  if (a.predictions) write_text(*a.predictions, pred_csv.str());
  if (!t.fully_labeled()) {
    log("input has unlabeled rows; wrote predictions only");
    if (!a.predictions) write_text(a.out, pred_csv.str());
    return kExitOk;
  }
  const ClassifierReport r = summarize_predictions(t.label_vector(), predicted, p.classes);
  write_text(a.out, report_json(r));
  if (a.confusion) write_text(*a.confusion, confusion_csv(r));
  std::cout << "accuracy " << fmt(r.accuracy) << " on " << r.total << " rows, chance "
            << fmt(1.0 / static_cast<double>(p.classes.size())) << '\n';
  return kExitOk;
}

int grad_check_cmd(const PipelineConfig& cfg, const GradCheckArgs& a) {
  const EmbeddingNetworkParams p = init_params(NetworkShape{a.input_dim, a.hidden, a.embed_dim}, cfg.seed);
  const Batch batch = random_batch(a.input_dim, a.classes, a.per_class, a.frames, cfg.seed + 1);
  const GradCheckReport r = grad_check(p, batch, a.eps, a.sample, cfg.seed);
  const bool pass = r.max_relative_error < a.tolerance;
  json j = {{"parameters", p.values.size()},
            {"checked", r.checked},
            {"eps", a.eps},
            {"max_relative_error", r.max_relative_error},
            {"worst_parameter", r.worst_name},
            {"worst_analytic", r.worst_analytic},
            {"worst_numeric", r.worst_numeric},
            {"tolerance", a.tolerance},
            {"pass", pass}};
  if (a.out) write_text(*a.out, j.dump(2) + "\n");
  std::cout << "max relative error " << r.max_relative_error << " over " << r.checked << " parameters (worst "
            << r.worst_name << ") " << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitContract;
}

}  // namespace spoofprint::cli
