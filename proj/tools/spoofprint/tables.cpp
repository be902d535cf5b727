#include "tables.hpp"

#include <unordered_map>

#include "spoofprint/embedding_io.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/feature_table.hpp"

namespace spoofprint::cli {

bool LabeledTable::fully_labeled() const {
  for (const auto& l : labels) {
    if (!l) return false;
  }
  return true;
}

std::vector<AttackerLabel> LabeledTable::label_vector() const {
  std::vector<AttackerLabel> y;
  y.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) throw ContractError("record '" + ids[i] + "' has no label");
    y.push_back(*labels[i]);
  }
  return y;
}

LabeledTable LabeledTable::subset(const std::vector<std::size_t>& rows) const {
  LabeledTable out;
  out.columns = columns;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.ids.push_back(ids[rows[i]]);
    out.labels.push_back(labels[rows[i]]);
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

LabeledTable load_table(const std::filesystem::path& path) {
  LabeledTable t;
  const auto ext = path.extension().string();
  if (ext == ".csv") {
    const auto rows = read_feature_csv(path);
    for (auto name : LowLevelSignature::field_names()) t.columns.emplace_back(name);
    t.X.resize(static_cast<Eigen::Index>(rows.size()), LowLevelSignature::kDim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.ids.push_back(rows[i].utterance_id);
      t.labels.push_back(rows[i].label);
      const auto v = rows[i].signature.to_array();
      for (std::size_t k = 0; k < v.size(); ++k) t.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[k];
    }
  } else if (ext == ".jsonl") {
    const auto rows = read_embeddings_jsonl(path);
    const Eigen::Index d = rows.empty() ? 0 : rows.front().vector.size();
    for (Eigen::Index k = 0; k < d; ++k) t.columns.push_back("e" + std::to_string(k));
    t.X.resize(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].vector.size() != d) throw FormatError(path.string() + ": embeddings of mixed width");
      t.ids.push_back(rows[i].utterance_id);
      t.labels.push_back(rows[i].label);
      t.X.row(static_cast<Eigen::Index>(i)) = rows[i].vector.transpose();
    }
  } else {
    throw ValidationError("input table must be a feature .csv or an embeddings .jsonl: " + path.string());
  }
  if (t.size() == 0) throw FormatError(path.string() + ": no rows");
  return t;
}

SplitChain::SplitChain(const std::vector<std::string>& steps) {
  for (const auto& s : steps) {
    Step step;
    step.text = s;
    std::string spec = s;
    const auto at = s.rfind('@');
    if (at != std::string::npos) {
      step.part = s.substr(at + 1);
      spec = s.substr(0, at);
      if (*step.part != "train" && *step.part != "test") {
        throw ValidationError("split '" + s + "': part suffix must be @train or @test");
      }
    }
    step.spec = parse_split_spec(spec);
    steps_.push_back(std::move(step));
  }
}

std::string SplitChain::describe() const {
  std::string out;
  for (const auto& s : steps_) out += (out.empty() ? "" : " -> ") + s.text;
  return out.empty() ? "none" : out;
}

DatasetManifest SplitChain::apply(const DatasetManifest& m, const std::string& part, std::uint64_t seed) const {
  if (part != "train" && part != "test" && part != "all") {
    throw ValidationError("part must be train, test or all (got '" + part + "')");
  }
  DatasetManifest current = m;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const bool last = i + 1 == steps_.size();
    const std::string keep = steps_[i].part.value_or(last ? part : "train");
    if (keep == "all") break;
    Split s = apply_split(current, steps_[i].spec, seed);
    current = keep == "train" ? std::move(s.train) : std::move(s.test);
  }
  return current;
}

std::vector<std::size_t> SplitChain::select(const LabeledTable& t, const std::string& part, std::uint64_t seed) const {
  if (steps_.empty()) {
    std::vector<std::size_t> all(t.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  // Splits operate on manifests; a table becomes one with placeholder sources.
  std::vector<UtteranceRecord> recs;
  recs.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    UtteranceRecord r;
    r.utterance_id = t.ids[i];
    r.source = std::filesystem::path(t.ids[i]);
    r.label = t.labels[i];
    recs.push_back(std::move(r));
  }
  const DatasetManifest kept = apply(DatasetManifest(std::move(recs), {"derived", "table"}), part, seed);
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < t.size(); ++i) row_of.emplace(t.ids[i], i);
  std::vector<bool> mark(t.size(), false);
  for (const auto& r : kept.records()) mark[row_of.at(r.utterance_id)] = true;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (mark[i]) rows.push_back(i);
  }
  return rows;
}

}  // namespace spoofprint::cli
