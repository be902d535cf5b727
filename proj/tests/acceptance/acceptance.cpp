// Acceptance run: one PASS/FAIL line per criterion 1-8.
// Criteria 1-4 call the library; 5-8 drive the spoofprint CLI end to end.
// Usage: spoofprint_acceptance [work_dir]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../unit/signals.hpp"
#include "spoofprint/angular_loss.hpp"
#include "spoofprint/cluster_metrics.hpp"
#include "spoofprint/grad_check.hpp"
#include "spoofprint/lowlevel.hpp"
#include "spoofprint/manifest.hpp"

namespace fs = std::filesystem;
using namespace spoofprint;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --- CLI driver ---

class Cli {
 public:
  Cli(fs::path exe, fs::path log) : exe_(std::move(exe)), log_(std::move(log)) {}

  int run(const std::string& args) const {
    {
      std::ofstream out(log_, std::ios::app);
      out << "$ spoofprint " << args << "\n";
    }
    const std::string cmd = "'" + exe_.string() + "' " + args + " >> '" + log_.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
  }

  // Runs every command in order; returns the first failing command or "".
  std::string run_all(const std::vector<std::string>& commands) const {
    for (const auto& c : commands) {
      const int code = run(c);
      if (code != 0) return c + " -> exit " + std::to_string(code);
    }
    return {};
  }

 private:
  fs::path exe_;
  fs::path log_;
};

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

double csv_average(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("AVERAGE,", 0) == 0) return std::stod(line.substr(line.rfind(',') + 1));
  return std::nan("");
}

// --- criterion 1 ---

Outcome gradient_check() {
  const auto t0 = Clock::now();
  const auto params = init_params(NetworkShape{40, 8, 4}, 1);
  const Batch batch = random_batch(40, 2, 2, 6, 1);
  const GradCheckReport r = grad_check(params, batch, 1e-4);
  const double secs = seconds_since(t0);
  return {r.max_relative_error < 1e-4 && secs < 60.0,
          "max rel err " + fmt(r.max_relative_error, 3) + " over " + std::to_string(r.checked) +
              " params (worst " + r.worst_name + "), " + fmt(secs, 3) + " s"};
}

// --- criterion 2 ---

// Independent double-loop var_C: population-std normalization, Bessel-corrected class
// spread divided by d, uniform mean over classes.
double brute_force_var_c(const Eigen::MatrixXd& X, const std::vector<AttackerLabel>& y) {
  const std::size_t n = X.rows(), d = X.cols();
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (X(i, j) - mean) * (X(i, j) - mean);
    const double sd = std::sqrt(var / n);
    for (std::size_t i = 0; i < n; ++i) z[i][j] = sd < 1e-12 ? 0.0 : (X(i, j) - mean) / sd;
  }
  std::set<AttackerLabel> classes(y.begin(), y.end());
  double total = 0.0;
  for (const auto& c : classes) {
    std::vector<double> centroid(d, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      ++count;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += z[i][j];
    }
    for (auto& v : centroid) v /= count;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != c) continue;
      for (std::size_t j = 0; j < d; ++j) ss += (z[i][j] - centroid[j]) * (z[i][j] - centroid[j]);
    }
    total += ss / (count - 1) / d;
  }
  return total / classes.size();
}

// Blobs with per-class offsets so the real labels cluster; every class gets >= 2 rows.
void random_dataset(std::mt19937_64& gen, int n, int d, int k, Eigen::MatrixXd& X,
                    std::vector<AttackerLabel>& y) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd centers(k, d);
  for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = 3.0 * normal(gen);
  X.resize(n, d);
  y.clear();
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (int i = 0; i < n; ++i) {
    const int c = i < 2 * k ? i % k : pick(gen);
    y.emplace_back("A" + std::to_string(10 + c));
    for (int j = 0; j < d; ++j) X(i, j) = centers(c, j) + normal(gen);
  }
}

Outcome metric_oracle() {
  std::mt19937_64 gen(2);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int k = std::uniform_int_distribution<int>(2, 10)(gen);
    const int n = std::uniform_int_distribution<int>(2 * k, 500)(gen);
    const int d = std::uniform_int_distribution<int>(1, 32)(gen);
    Eigen::MatrixXd X;
    std::vector<AttackerLabel> y;
    random_dataset(gen, n, d, k, X, y);
    const double fast = avg_class_conditional_variance(X, y).average;
    worst = std::max(worst, std::abs(fast - brute_force_var_c(X, y)));
  }
  Eigen::MatrixXd X;
  std::vector<AttackerLabel> y;
  random_dataset(gen, 2000, 16, 20, X, y);
  const double structured = avg_class_conditional_variance(X, y).average;
  std::shuffle(y.begin(), y.end(), gen);
  const double shuffled = avg_class_conditional_variance(X, y).average;
  return {worst < 1e-10 && std::abs(shuffled - 1.0) <= 0.05,
          "max |fast - brute| " + fmt(worst, 3) + " on 20 datasets; n=2000 var_C " +
              fmt(structured) + " true labels, " + fmt(shuffled) + " shuffled"};
}

// --- criterion 3 ---

Outcome loss_sanity() {
  double worst_identical = 0.0;
  for (int n_classes = 2; n_classes <= 6; ++n_classes) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n_classes * 3, 4);
    E.col(1).setOnes();
    const double loss = angular_proto_loss(E, n_classes, 3, 10.0, -5.0).loss;
    worst_identical = std::max(worst_identical, std::abs(loss - std::log(n_classes)));
  }
  double worst_closed = 0.0;
  for (double w : {0.5, 1.0, 3.0, 10.0}) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(4, 3);
    E(0, 0) = E(1, 0) = 1.0;
    E(2, 0) = E(3, 0) = -1.0;
    const double loss = angular_proto_loss(E, 2, 2, w, -5.0).loss;
    worst_closed = std::max(worst_closed, std::abs(loss - std::log1p(std::exp(-2.0 * w))));
  }
  return {worst_identical < 1e-9 && worst_closed < 1e-9,
          "identical |loss - ln N| " + fmt(worst_identical, 3) + " (N=2..6); N=2 separated |loss - ln(1+e^-2w)| " +
              fmt(worst_closed, 3)};
}

// --- criterion 4 ---

Outcome feature_oracles() {
  const auto t0 = Clock::now();
  const double square_db = loudness_dbfs(testing::square(100.0, 1.0));
  const double sine_db = loudness_dbfs(testing::sine(220.0, 1.0));
  const Waveform tone = testing::sine(220.0, 1.0, 0.5);
  const FrameConfig cfg;
  const PitchTrack track = track_pitch(tone, cfg);
  const F0Stats f0 = f0_stats(track);
  const double jit = jitter(track).value;
  const double shim = shimmer(tone, track).value;
  const double h = hnr(track).mean;
  const double secs = seconds_since(t0);
  const bool pass = square_db == 0.0 && std::abs(sine_db + 3.01) <= 0.05 &&
                    std::abs(f0.mean - 220.0) <= 2.0 && jit < 0.005 && shim < 0.01 && h >= 40.0 &&
                    secs < 10.0;
  return {pass, "square " + fmt(square_db) + " dBFS, sine " + fmt(sine_db) + " dBFS, f0 " + fmt(f0.mean, 6) +
                    " Hz, jitter " + fmt(jit, 3) + ", shimmer " + fmt(shim, 3) + ", hnr " + fmt(h) + " dB, " +
                    fmt(secs, 3) + " s"};
}

// --- criteria 5-7: the synthetic pipeline ---

const std::string kHeldOut = "--split out-of-domain:A02,A04";
const std::string kInDomain = kHeldOut + " --split in-domain:0.9";

struct PipelineRun {
  std::string failure;  // first failing command, empty on success
  double train_seconds = 0.0;
  double total_seconds = 0.0;
  std::vector<fs::path> artifacts;  // relative to the run directory
};

PipelineRun run_pipeline(const Cli& cli, const fs::path& dir, int threads) {
  PipelineRun r;
  fs::create_directories(dir);
  const auto t = [&](const char* name) { return q(dir / name); };
  const std::string common = " --seed 1 --threads " + std::to_string(threads);
  const std::string manifest = q(dir / "corpus" / "manifest.jsonl");
  const auto t0 = Clock::now();

  r.failure = cli.run_all({
      "synth-corpus --out " + t("corpus") + common,
      "extract-features --manifest " + manifest + " --out " + t("features.csv") + common,
      "eval-features --features " + t("features.csv") + " --out " + t("table1.csv") + " --classes-out " +
          t("table1_classes.csv") + common,
      "grad-check --out " + t("grad_check.json") + common,
  });
  if (!r.failure.empty()) return r;

  const auto t_train = Clock::now();
  r.failure = cli.run_all({"train-embedder --manifest " + manifest + " --out " + t("embedder.aemb") + " --log " +
                           t("train_log.csv") + " " + kInDomain + common});
  r.train_seconds = seconds_since(t_train);
  if (!r.failure.empty()) return r;

  std::vector<std::string> rest = {
      "embed --manifest " + manifest + " --checkpoint " + t("embedder.aemb") + " --out " + t("emb.jsonl") + common,
      "project --input " + t("emb.jsonl") + " --out-csv " + t("scatter.csv") + " --out-svg " + t("scatter.svg") +
          common,
  };
  for (const auto& [table, tag] : {std::pair{"emb.jsonl", "emb"}, std::pair{"features.csv", "low"}}) {
    const std::string in = t(table);
    const std::string tg = tag;
    rest.push_back("eval-clusters --embeddings " + in + " --out " + t(("in_" + tg + ".csv").c_str()) + " " +
                   kInDomain + " --part test" + common);
    rest.push_back("eval-clusters --embeddings " + in + " --out " + t(("ood_" + tg + ".csv").c_str()) + " " +
                   kHeldOut + " --part test" + common);
    rest.push_back("train-classifier --input " + in + " --out " + t(("clf_" + tg + ".aclf").c_str()) + " " +
                   kInDomain + common);
    rest.push_back("classify --model " + t(("clf_" + tg + ".aclf").c_str()) + " --input " + in + " --out " +
                   t(("report_" + tg + ".json").c_str()) + " --confusion " +
                   t(("confusion_" + tg + ".csv").c_str()) + " --predictions " +
                   t(("predictions_" + tg + ".csv").c_str()) + " " + kInDomain + " --part test" + common);
  }
  r.failure = cli.run_all(rest);
  r.total_seconds = seconds_since(t0);

  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) r.artifacts.push_back(fs::relative(e.path(), dir));
  std::sort(r.artifacts.begin(), r.artifacts.end());
  return r;
}

Outcome ordering(const PipelineRun& run, const fs::path& dir) {
  if (!run.failure.empty()) return {false, "pipeline failed: " + run.failure};
  const DatasetManifest m = read_manifest_jsonl(dir / "corpus" / "manifest.jsonl");
  std::map<AttackerLabel, int> counts;
  for (const auto& rec : m.records()) ++counts[rec.label.value_or(AttackerLabel("?"))];
  const int min_count = std::min_element(counts.begin(), counts.end(), [](auto& a, auto& b) {
                          return a.second < b.second;
                        })->second;
  const bool corpus_ok = counts.size() == 8 && counts.count(AttackerLabel::bonafide()) && min_count >= 60;

  const double in_emb = csv_average(dir / "in_emb.csv"), in_low = csv_average(dir / "in_low.csv");
  const double ood_emb = csv_average(dir / "ood_emb.csv"), ood_low = csv_average(dir / "ood_low.csv");
  const bool a = in_emb < in_low, b = ood_emb < ood_low, c = in_emb < ood_emb;
  const auto mark = [](bool ok) { return ok ? "ok" : "VIOLATED"; };
  return {corpus_ok && a && b && c && run.train_seconds <= 600.0,
          std::to_string(counts.size() - 2) + " in-domain + 2 held-out attackers, >= " + std::to_string(min_count) +
              " utts each; (a) in-domain emb " + fmt(in_emb) + " < low-level " + fmt(in_low) + " " + mark(a) +
              "; (b) out-of-domain emb " + fmt(ood_emb) + " < low-level " + fmt(ood_low) + " " + mark(b) +
              "; (c) " + fmt(in_emb) + " < " + fmt(ood_emb) + " " + mark(c) + "; training " +
              fmt(run.train_seconds, 3) + " s"};
}

Outcome downstream(const PipelineRun& run, const fs::path& dir) {
  if (!run.failure.empty()) return {false, "pipeline failed: " + run.failure};
  const auto emb = nlohmann::json::parse(read_bytes(dir / "report_emb.json"));
  const auto low = nlohmann::json::parse(read_bytes(dir / "report_low.json"));
  const double acc_emb = emb.at("accuracy"), acc_low = low.at("accuracy");
  const double chance = 1.0 / emb.at("classes").size();
  return {acc_emb >= 0.9 && acc_emb > acc_low && acc_low > chance && acc_emb > chance,
          "embedding MLP " + fmt(acc_emb) + " vs low-level MLP " + fmt(acc_low) + " on " +
              std::to_string(emb.at("total").get<int>()) + " test utterances, chance " + fmt(chance)};
}

Outcome determinism(const PipelineRun& first, const fs::path& a, const PipelineRun& second, const fs::path& b) {
  if (!first.failure.empty() || !second.failure.empty())
    return {false, "pipeline failed: " + first.failure + second.failure};
  // The command log holds absolute paths and differs by construction.
  std::vector<std::string> differing;
  for (const auto& rel : first.artifacts)
    if (read_bytes(a / rel) != read_bytes(b / rel)) differing.push_back(rel.string());
  const bool same_set = first.artifacts == second.artifacts;
  std::string detail = std::to_string(first.artifacts.size()) + " artifacts (WAVs, manifest, features, tables, " +
                       "checkpoints, embeddings, projections, reports) compared byte for byte across two runs " +
                       "with 1 vs 3 worker threads";
  if (!same_set) detail += "; artifact sets differ";
  if (!differing.empty()) detail += "; differing: " + differing.front() + " and " +
                                    std::to_string(differing.size() - 1) + " more";
  return {same_set && differing.empty(), detail};
}

// --- criterion 8: ASVspoof-style manifest ---

Outcome fidelity_path(const Cli& cli, const fs::path& dir) {
  fs::create_directories(dir / "flac");
  const std::string common = " --seed 3";
  if (int code = cli.run("synth-corpus --out " + q(dir / "source") + " --utterances 20" + common); code != 0)
    return {false, "synth-corpus exit " + std::to_string(code)};

  // Rename the audio to LA-style ids and write a 5-column LA protocol.
  const DatasetManifest source = read_manifest_jsonl(dir / "source" / "manifest.jsonl");
  std::ofstream protocol(dir / "ASVspoof2019.LA.cm.train.trn.txt");
  int next = 1000000;
  for (const auto& rec : source.records()) {
    const std::string file_id = "LA_T_" + std::to_string(next++);
    fs::copy_file(std::get<fs::path>(rec.source), dir / "flac" / (file_id + ".wav"),
                  fs::copy_options::overwrite_existing);
    const bool bona = rec.label->is_bonafide();
    protocol << "LA_00" << (next % 40 + 10) << ' ' << file_id << " - " << (bona ? "-" : rec.label->str()) << ' '
             << (bona ? "bonafide" : "spoof") << '\n';
  }
  protocol.close();

  const auto t = [&](const char* name) { return q(dir / name); };
  const std::string failure = cli.run_all({
      "parse-protocol --protocol " + t("ASVspoof2019.LA.cm.train.trn.txt") + " --audio-dir " + t("flac") +
          " --out " + t("manifest.jsonl"),
      "extract-features --manifest " + t("manifest.jsonl") + " --out " + t("features.csv") + common,
      "eval-features --features " + t("features.csv") + " --out " + t("table1.csv") + common,
      "train-embedder --manifest " + t("manifest.jsonl") + " --out " + t("embedder.aemb") +
          " --steps 40 --split in-domain:0.9" + common,
      "embed --manifest " + t("manifest.jsonl") + " --checkpoint " + t("embedder.aemb") + " --out " +
          t("emb.jsonl") + common,
      "eval-clusters --embeddings " + t("emb.jsonl") + " --out " + t("clusters.csv") +
          " --split in-domain:0.9 --part test" + common,
      "project --input " + t("emb.jsonl") + " --out-csv " + t("scatter.csv") + " --out-svg " + t("scatter.svg") +
          common,
      "train-classifier --input " + t("emb.jsonl") + " --out " + t("clf.aclf") + " --split in-domain:0.9" + common,
      "classify --model " + t("clf.aclf") + " --input " + t("emb.jsonl") + " --out " + t("report.json") +
          " --split in-domain:0.9 --part test" + common,
  });
  if (!failure.empty()) return {false, "pipeline failed: " + failure};

  std::ifstream in(dir / "table1.csv");
  std::string line;
  std::getline(in, line);  // header
  int feature_rows = 0;
  bool has_average = false;
  while (std::getline(in, line)) {
    if (line.rfind("AVERAGE,", 0) == 0) has_average = true;
    else if (!line.empty()) ++feature_rows;
  }
  const std::size_t n_records = read_manifest_jsonl(dir / "manifest.jsonl").records().size();
  return {feature_rows == 16 && has_average && n_records == source.records().size(),
          "LA protocol with " + std::to_string(n_records) + " utterances -> eval-features " +
              std::to_string(feature_rows) + " feature rows + AVERAGE; full pipeline ran with exit 0"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = fs::absolute(argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_work"));
  fs::remove_all(work);
  fs::create_directories(work);
  const Cli cli(SPOOFPRINT_CLI_PATH, work / "commands.log");
  std::ofstream summary(work / "acceptance_report.txt");

  int failures = 0;
  const auto report = [&](int id, const char* name, const Outcome& o) {
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail;
    std::cout << line.str() << std::endl;
    summary << line.str() << std::endl;
    if (!o.pass) ++failures;
  };

  report(1, "gradient correctness", gradient_check());
  report(2, "metric oracle equivalence", metric_oracle());
  report(3, "loss sanity", loss_sanity());
  report(4, "feature oracles", feature_oracles());

  const PipelineRun first = run_pipeline(cli, work / "run_a", 1);
  report(5, "in-domain vs out-of-domain ordering", ordering(first, work / "run_a"));
  report(6, "downstream ordering", downstream(first, work / "run_a"));
  const PipelineRun second = run_pipeline(cli, work / "run_b", 3);
  report(7, "determinism", determinism(first, work / "run_a", second, work / "run_b"));
  report(8, "ASVspoof-style manifest path", fidelity_path(cli, work / "asvspoof_la"));

  std::cout << (failures == 0 ? "all 8 criteria passed" : std::to_string(failures) + " criteria failed")
            << " (pipeline " << fmt(first.total_seconds, 3) << " s; work dir " << work.string() << ")"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
