#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoofprint/manifest.hpp"

namespace spoofprint {

struct EmbeddingRecord {
  std::string utterance_id;
  std::optional<AttackerLabel> label;
  Eigen::VectorXd vector;
};

/// JSON Lines: {"utterance_id": ..., "label": ... | null, "vector": [...]}.
void write_embeddings_jsonl(const std::vector<EmbeddingRecord>& rows, const std::filesystem::path& path);
std::vector<EmbeddingRecord> read_embeddings_jsonl(const std::filesystem::path& path);

}  // namespace spoofprint
