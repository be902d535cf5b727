#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spoofprint/lowlevel.hpp"
#include "spoofprint/manifest.hpp"

namespace spoofprint {

struct FeatureRow {
  std::string utterance_id;
  std::optional<AttackerLabel> label;
  LowLevelSignature signature;
};

/// Header: utterance_id,label,<16 feature names>,degraded. Floats use 9 significant digits.
void write_feature_csv(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);
std::string feature_csv_string(const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path);

}  // namespace spoofprint
