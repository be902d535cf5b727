#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "signals.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/feature_table.hpp"

using namespace spoofprint;
namespace fs = std::filesystem;

namespace {

std::vector<FeatureRow> sample_rows() {
  std::vector<FeatureRow> rows;
  FeatureRow a;
  a.utterance_id = "A01_0000";
  a.label = AttackerLabel("A01");
  a.signature = extract_signature(spoofprint::testing::sine(180.0, 0.5, 0.4), std::nullopt, FrameConfig{});
  rows.push_back(a);
  FeatureRow b;
  b.utterance_id = "odd,id \"quoted\"";
  b.signature = extract_signature(spoofprint::testing::silence(0.3), std::nullopt, FrameConfig{});
  rows.push_back(b);
  return rows;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("spoofprint_" + name + "_" +
                                      std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + ".csv");
}

}  // namespace

TEST(FeatureCsv, HeaderAndLineEndings) {
  const std::string text = feature_csv_string(sample_rows());
  const std::string header = text.substr(0, text.find("\r\n"));
  EXPECT_EQ(header.rfind("utterance_id,label,f0_mean,f0_min,", 0), 0u) << header;
  EXPECT_NE(header.find(",hnr_mean,hnr_std,degraded"), std::string::npos) << header;
  std::size_t crlf = 0;
  for (std::size_t p = text.find("\r\n"); p != std::string::npos; p = text.find("\r\n", p + 2)) ++crlf;
  EXPECT_EQ(crlf, 3u);
}

TEST(FeatureCsv, RoundTripWithinPrintedPrecision) {
  const auto rows = sample_rows();
  const fs::path p = temp_file("features");
  write_feature_csv(rows, p);
  const auto back = read_feature_csv(p);
  fs::remove(p);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].utterance_id, rows[i].utterance_id);
    EXPECT_EQ(back[i].label, rows[i].label);
    EXPECT_EQ(back[i].signature.degraded, rows[i].signature.degraded);
    const auto x = rows[i].signature.to_array();
    const auto y = back[i].signature.to_array();
    for (std::size_t k = 0; k < x.size(); ++k) {
      EXPECT_NEAR(y[k], x[k], 1e-8 * std::max(1.0, std::abs(x[k]))) << LowLevelSignature::field_names()[k];
    }
  }
}

TEST(FeatureCsv, WritingIsDeterministic) {
  EXPECT_EQ(feature_csv_string(sample_rows()), feature_csv_string(sample_rows()));
}

TEST(FeatureCsv, RejectsForeignHeader) {
  const fs::path p = temp_file("bad_header");
  std::ofstream(p) << "id,label,x\r\n";
  EXPECT_THROW(read_feature_csv(p), FormatError);
  fs::remove(p);
}

TEST(FeatureCsv, RejectsShortRowWithLineNumber) {
  const fs::path p = temp_file("short_row");
  std::string text = feature_csv_string(sample_rows());
  text = text.substr(0, text.find("\r\n") + 2) + "u1,A01,1,2,3\r\n";
  std::ofstream(p, std::ios::binary) << text;
  try {
    read_feature_csv(p);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  fs::remove(p);
}

TEST(FeatureCsv, MissingFileIsIoError) {
  EXPECT_THROW(read_feature_csv("/nonexistent_dir_xyz/f.csv"), IoError);
}
