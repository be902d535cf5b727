#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "spoofprint/errors.hpp"

using namespace spoofprint;
using namespace spoofprint::cli;

namespace {

/// Options every subcommand accepts; flags given explicitly override the config file.
struct Common {
  std::string config;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::vector<std::string> split;
  std::string part;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* split_opt = nullptr;
  CLI::Option* part_opt = nullptr;

  PipelineConfig resolve() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_pipeline_config(config);
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    if (threads_opt && threads_opt->count()) cfg.threads = threads;
    if (split_opt && split_opt->count()) cfg.split = split;
    if (part_opt && part_opt->count()) cfg.part = part;
    return cfg;
  }
};

void add_common(CLI::App* sub, Common& c, bool with_split) {
  sub->add_option("--config", c.config, "JSON pipeline config")->check(CLI::ExistingFile);
  c.seed_opt = sub->add_option("--seed", c.seed, "seed for every random choice (default 1)");
  c.threads_opt = sub->add_option("--threads", c.threads, "worker threads, 0 = all cores");
  if (with_split) {
    c.split_opt = sub->add_option("--split", c.split,
                                  "split step, repeatable: in-domain:0.9 | out-of-domain:A02,A04 [@train|@test]");
    c.part_opt = sub->add_option("--part", c.part, "part kept by the last split step: train, test or all")
                     ->check(CLI::IsMember({"train", "test", "all"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attacker attribution toolkit for synthetic and spoofed speech"};
  app.require_subcommand(1);
  std::function<int()> run;

  Common synth_c;
  SynthArgs synth_a;
  auto* synth = app.add_subcommand("synth-corpus", "generate a labeled synthetic corpus (WAVs + manifest.jsonl)");
  add_common(synth, synth_c, false);
  synth->add_option("--out", synth_a.out_dir, "output directory")->required();
  synth->add_option("--utterances", synth_a.utterances, "utterances per attacker");
  synth->callback([&] { run = [&] { return synth_corpus_cmd(synth_c.resolve(), synth_a); }; });

  Common proto_c;
  ProtocolArgs proto_a;
  auto* proto = app.add_subcommand("parse-protocol", "turn an ASVspoof LA protocol file into a manifest");
  add_common(proto, proto_c, false);
  proto->add_option("--protocol", proto_a.protocol)->required()->check(CLI::ExistingFile);
  proto->add_option("--audio-dir", proto_a.audio_dir)->required();
  proto->add_option("--out", proto_a.out)->required();
  proto->callback([&] { run = [&] { return parse_protocol_cmd(proto_c.resolve(), proto_a); }; });

  Common ext_c;
  ExtractArgs ext_a;
  auto* ext = app.add_subcommand("extract-features", "16-dimensional low-level signatures as CSV");
  add_common(ext, ext_c, false);
  ext->add_option("--manifest", ext_a.manifest)->required()->check(CLI::ExistingFile);
  ext->add_option("--out", ext_a.out)->required();
  ext->callback([&] { run = [&] { return extract_features_cmd(ext_c.resolve(), ext_a); }; });

  Common evf_c;
  EvalArgs evf_a;
  auto* evf = app.add_subcommand("eval-features", "per-feature class-conditional variance (17-row table)");
  add_common(evf, evf_c, true);
  evf->add_option("--features", evf_a.input)->required()->check(CLI::ExistingFile);
  evf->add_option("--out", evf_a.out)->required();
  evf->add_option("--classes-out", evf_a.classes_out, "per-class variance CSV");
  evf->add_flag("--shuffle-labels", evf_a.shuffle_labels, "permute labels with --seed (null baseline)");
  evf->add_flag("--sum-over-dims", evf_a.sum_over_dims, "do not divide squared deviations by d");
  evf->callback([&] { run = [&] { return eval_features_cmd(evf_c.resolve(), evf_a); }; });

  Common tre_c;
  TrainEmbedderArgs tre_a;
  auto* tre = app.add_subcommand("train-embedder", "train the recurrent embedder with the angular prototypical loss");
  add_common(tre, tre_c, true);
  tre->add_option("--manifest", tre_a.manifest)->required()->check(CLI::ExistingFile);
  tre->add_option("--out", tre_a.out, "checkpoint path")->required();
  tre->add_option("--log", tre_a.log, "training log CSV");
  auto* steps = tre->add_option("--steps", "override training.steps");
  tre->callback([&, steps] {
    run = [&, steps] {
      PipelineConfig cfg = tre_c.resolve();
      if (steps->count()) cfg.training.steps = steps->as<int>();
      return train_embedder_cmd(cfg, tre_a);
    };
  });

  Common emb_c;
  EmbedArgs emb_a;
  auto* emb = app.add_subcommand("embed", "embed every manifest record with a trained checkpoint");
  add_common(emb, emb_c, false);
  emb->add_option("--manifest", emb_a.manifest)->required()->check(CLI::ExistingFile);
  emb->add_option("--checkpoint", emb_a.checkpoint)->required()->check(CLI::ExistingFile);
  emb->add_option("--out", emb_a.out, "embeddings JSONL")->required();
  emb->callback([&] { run = [&] { return embed_cmd(emb_c.resolve(), emb_a); }; });

  Common evc_c;
  EvalArgs evc_a;
  auto* evc = app.add_subcommand("eval-clusters", "class-conditional variance of embeddings or features");
  add_common(evc, evc_c, true);
  evc->add_option("--embeddings", evc_a.input, "embeddings JSONL or feature CSV")->required()->check(CLI::ExistingFile);
  evc->add_option("--out", evc_a.out)->required();
  evc->add_option("--dims-out", evc_a.classes_out, "per-dimension variance CSV");
  evc->add_flag("--shuffle-labels", evc_a.shuffle_labels);
  evc->add_flag("--sum-over-dims", evc_a.sum_over_dims);
  evc->callback([&] { run = [&] { return eval_clusters_cmd(evc_c.resolve(), evc_a); }; });

  Common prj_c;
  ProjectArgs prj_a;
  auto* prj = app.add_subcommand("project", "2-D PCA scatter (CSV + SVG) of normalized vectors");
  add_common(prj, prj_c, true);
  prj->add_option("--input", prj_a.input)->required()->check(CLI::ExistingFile);
  prj->add_option("--out-csv", prj_a.out_csv)->required();
  prj->add_option("--out-svg", prj_a.out_svg)->required();
  prj->callback([&] { run = [&] { return project_cmd(prj_c.resolve(), prj_a); }; });

  Common trc_c;
  TrainClassifierArgs trc_a;
  auto* trc = app.add_subcommand("train-classifier", "train the attacker-ID MLP on the train part of the split");
  add_common(trc, trc_c, true);
  trc->add_option("--input", trc_a.input, "embeddings JSONL or feature CSV")->required()->check(CLI::ExistingFile);
  trc->add_option("--out", trc_a.out, "classifier checkpoint")->required();
  trc->callback([&] { run = [&] { return train_classifier_cmd(trc_c.resolve(), trc_a); }; });

  Common cls_c;
  ClassifyArgs cls_a;
  auto* cls = app.add_subcommand("classify", "predict and report accuracy on the selected part");
  add_common(cls, cls_c, true);
  cls->add_option("--model", cls_a.model)->required()->check(CLI::ExistingFile);
  cls->add_option("--input", cls_a.input)->required()->check(CLI::ExistingFile);
  cls->add_option("--out", cls_a.out, "report JSON")->required();
  cls->add_option("--confusion", cls_a.confusion, "confusion matrix CSV");
  cls->add_option("--predictions", cls_a.predictions, "per-row predictions CSV");
  cls->callback([&] { run = [&] { return classify_cmd(cls_c.resolve(), cls_a); }; });

  Common gc_c;
  GradCheckArgs gc_a;
  auto* gc = app.add_subcommand("grad-check", "finite-difference check of the embedder gradient");
  add_common(gc, gc_c, false);
  gc->add_option("--input-dim", gc_a.input_dim);
  gc->add_option("--hidden", gc_a.hidden);
  gc->add_option("--embed-dim", gc_a.embed_dim);
  gc->add_option("--classes", gc_a.classes, "N");
  gc->add_option("--per-class", gc_a.per_class, "M");
  gc->add_option("--frames", gc_a.frames);
  gc->add_option("--eps", gc_a.eps);
  gc->add_option("--tolerance", gc_a.tolerance);
  gc->add_option("--sample", gc_a.sample, "check a seeded sample of this many parameters (0 = all)");
  gc->add_option("--out", gc_a.out, "report JSON");
  gc->callback([&] { run = [&] { return grad_check_cmd(gc_c.resolve(), gc_a); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitContract;
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitContract;
}
