#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoofprint/manifest.hpp"

namespace spoofprint::cli {

/// Rows of vectors keyed by utterance id: a feature CSV or an embeddings JSONL file.
struct LabeledTable {
  std::vector<std::string> ids;
  std::vector<std::optional<AttackerLabel>> labels;
  std::vector<std::string> columns;
  Eigen::MatrixXd X;

  std::size_t size() const { return ids.size(); }
  bool fully_labeled() const;
  std::vector<AttackerLabel> label_vector() const;  // throws ContractError on a missing label
  LabeledTable subset(const std::vector<std::size_t>& rows) const;
};

/// Dispatches on extension: .csv = feature table, .jsonl = embeddings.
LabeledTable load_table(const std::filesystem::path& path);

/// A sequence of split steps. Each step is a split spec ("in-domain:0.9",
/// "out-of-domain:A02,A04") with an optional "@train" / "@test" suffix naming the part
/// kept for the next step. Unsuffixed steps keep the train part, except the last,
/// which keeps the part passed to apply().
class SplitChain {
 public:
  SplitChain() = default;
  explicit SplitChain(const std::vector<std::string>& steps);

  bool empty() const { return steps_.empty(); }
  std::string describe() const;

  /// part is "train", "test" or "all"; "all" skips the last step.
  DatasetManifest apply(const DatasetManifest& m, const std::string& part, std::uint64_t seed) const;
  /// Row indices of `t` that survive the chain, in table order.
  std::vector<std::size_t> select(const LabeledTable& t, const std::string& part, std::uint64_t seed) const;

 private:
  struct Step {
    SplitSpec spec;
    std::string text;
    std::optional<std::string> part;
  };
  std::vector<Step> steps_;
};

}  // namespace spoofprint::cli
