#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "signals.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/manifest.hpp"
#include "spoofprint/rng.hpp"

namespace fs = std::filesystem;
using namespace spoofprint;

namespace {

DatasetManifest labeled(const std::map<std::string, int>& counts) {
  std::vector<UtteranceRecord> recs;
  for (const auto& [label, n] : counts) {
    for (int i = 0; i < n; ++i) {
      UtteranceRecord r;
      r.utterance_id = label + "_" + std::to_string(i);
      r.source = fs::path(r.utterance_id + ".wav");
      r.label = AttackerLabel(label);
      recs.push_back(std::move(r));
    }
  }
  return DatasetManifest(std::move(recs), {"synthetic", "test"});
}

std::set<std::string> ids(const DatasetManifest& m) {
  std::set<std::string> out;
  for (const auto& r : m.records()) out.insert(r.utterance_id);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spoofprint_manifest_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Manifest, RejectsDuplicatesAndUndeclaredLabels) {
  UtteranceRecord a;
  a.utterance_id = "x";
  a.source = fs::path("x.wav");
  a.label = AttackerLabel("A01");
  EXPECT_THROW(DatasetManifest({a, a}, {}), ContractError);
  EXPECT_THROW(DatasetManifest({}, {}), ContractError);
  EXPECT_THROW(DatasetManifest({a}, {}, std::set<AttackerLabel>{AttackerLabel("A02")}), ContractError);
}

TEST(Protocol, MapsBonafideAndSpoofRows) {
  const fs::path dir = scratch("protocol");
  write_wav(spoofprint::testing::sine(200, 0.1), dir / "LA_T_1138215.wav");
  std::ofstream(dir / "proto.txt") << "LA_0079 LA_T_1138215 - - bonafide\n"
                                       "LA_0079 LA_T_1271820 - A01 spoof\n";
  const auto parsed = parse_asvspoof_protocol(dir / "proto.txt", dir);
  ASSERT_EQ(parsed.manifest.size(), 2u);
  EXPECT_EQ(parsed.manifest.records()[0].label, AttackerLabel("A0"));
  EXPECT_TRUE(parsed.manifest.records()[0].label->is_bonafide());
  EXPECT_TRUE(parsed.manifest.records()[0].source_resolved);
  EXPECT_EQ(parsed.manifest.records()[1].label, AttackerLabel("A01"));
  EXPECT_FALSE(parsed.manifest.records()[1].source_resolved);
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_NE(parsed.warnings[0].find("LA_T_1271820"), std::string::npos);
  EXPECT_THROW(load_waveform(parsed.manifest.records()[1]), IoError);
  fs::remove_all(dir);
}

TEST(Protocol, ShortRowReportsLineNumber) {
  const fs::path dir = scratch("protocol_bad");
  std::ofstream(dir / "proto.txt") << "LA_0079 LA_T_1 - - bonafide\nLA_0079 LA_T_2 spoof\n";
  try {
    parse_asvspoof_protocol(dir / "proto.txt", dir);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(ManifestJsonl, RoundTripsRelativePaths) {
  const fs::path dir = scratch("jsonl");
  fs::create_directories(dir / "audio");
  write_wav(spoofprint::testing::sine(200, 0.1), dir / "audio" / "u1.wav");
  UtteranceRecord r;
  r.utterance_id = "u1";
  r.source = fs::absolute(dir / "audio" / "u1.wav");
  r.label = AttackerLabel("A03");
  r.gender = Gender::female;
  write_manifest_jsonl(DatasetManifest({r}, {"synthetic", "t"}), dir / "m.jsonl");

  std::ifstream in(dir / "m.jsonl");
  std::string line;
  std::getline(in, line);
  EXPECT_NE(line.find("\"path\":\"audio/u1.wav\""), std::string::npos) << line;

  const auto back = read_manifest_jsonl(dir / "m.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back.records()[0].label, AttackerLabel("A03"));
  EXPECT_EQ(back.records()[0].gender, Gender::female);
  EXPECT_EQ(load_waveform(back.records()[0]).samples.size(), 1600u);
  fs::remove_all(dir);
}

TEST(ManifestJsonl, WorkingDirectoryRelativePathsAreRebased) {
  const fs::path dir = scratch("cwd");
  fs::create_directories(dir / "corpus" / "audio");
  write_wav(spoofprint::testing::sine(200, 0.1), dir / "corpus" / "audio" / "u1.wav");
  const fs::path old_cwd = fs::current_path();
  fs::current_path(dir);
  UtteranceRecord r;
  r.utterance_id = "u1";
  r.source = fs::path("corpus/audio/u1.wav");
  write_manifest_jsonl(DatasetManifest({r}, {"synthetic", "t"}), fs::path("corpus") / "m.jsonl");
  fs::current_path(old_cwd);

  std::ifstream in(dir / "corpus" / "m.jsonl");
  std::string line;
  std::getline(in, line);
  EXPECT_NE(line.find("\"path\":\"audio/u1.wav\""), std::string::npos) << line;
  const auto back = read_manifest_jsonl(dir / "corpus" / "m.jsonl");
  EXPECT_EQ(load_waveform(back.records()[0]).samples.size(), 1600u);
  fs::remove_all(dir);
}

TEST(SplitInDomain, CountsPerLabel) {
  const auto m = labeled({{"A0", 100}, {"A01", 100}, {"A02", 100}, {"A03", 100}, {"A04", 100}});
  const auto s = split_in_domain(m, 0.9, 11);
  EXPECT_EQ(s.train.size(), 450u);
  EXPECT_EQ(s.test.size(), 50u);
  for (const auto& l : m.present_labels()) EXPECT_EQ(s.test.count(l), 10u);
}

TEST(SplitInDomain, DeterministicBySeed) {
  const auto m = labeled({{"A0", 30}, {"A01", 30}});
  EXPECT_EQ(ids(split_in_domain(m, 0.9, 5).test), ids(split_in_domain(m, 0.9, 5).test));
  EXPECT_NE(ids(split_in_domain(m, 0.9, 5).test), ids(split_in_domain(m, 0.9, 6).test));
}

TEST(SplitInDomain, Errors) {
  EXPECT_THROW(split_in_domain(labeled({{"A0", 10}, {"A01", 1}}), 0.5, 1), ContractError);
  EXPECT_THROW(split_in_domain(labeled({{"A0", 10}}), 1.0, 1), ValidationError);
  EXPECT_THROW(split_in_domain(labeled({{"A0", 10}}), 0.0, 1), ValidationError);
}

// Partition property over random label counts, fractions and seeds.
TEST(SplitInDomain, PartitionProperty) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, int> counts;
    const int k = 2 + static_cast<int>(rng.index(6));
    for (int i = 0; i < k; ++i) counts["L" + std::to_string(i)] = 2 + static_cast<int>(rng.index(60));
    const double frac = rng.uniform(0.2, 0.8);
    const auto m = labeled(counts);
    const auto s = split_in_domain(m, frac, rng.next());
    EXPECT_EQ(s.train.size() + s.test.size(), m.size());
    const auto tr = ids(s.train);
    const auto te = ids(s.test);
    for (const auto& id : te) EXPECT_FALSE(tr.contains(id));
    for (const auto& [label, n] : counts) {
      const double got = static_cast<double>(s.train.count(AttackerLabel(label)));
      EXPECT_LE(std::abs(got - n * frac), 1.0) << label;
    }
  }
}

TEST(SplitOutOfDomain, HeldOutLabelsGoEntirelyToTest) {
  const auto m = labeled({{"A0", 40}, {"A01", 40}, {"A02", 40}, {"A04", 40}, {"A12", 40}, {"A14", 40}});
  const std::set<AttackerLabel> held{AttackerLabel("A02"), AttackerLabel("A04"), AttackerLabel("A12"),
                                     AttackerLabel("A14")};
  const auto s = split_out_of_domain(m, held);
  EXPECT_EQ(s.test.size(), 160u);
  EXPECT_EQ(s.test.present_labels(), held);
  for (const auto& l : s.train.present_labels()) EXPECT_FALSE(held.contains(l));
}

TEST(SplitOutOfDomain, SingleLabelOnSyntheticShape) {
  const auto m = labeled({{"A0", 40}, {"A01", 40}, {"A02", 40}, {"A03", 40}, {"X", 40}});
  const auto s = split_out_of_domain(m, {AttackerLabel("X")});
  EXPECT_EQ(s.test.size(), 40u);
  EXPECT_EQ(s.train.size(), 160u);
}

TEST(SplitOutOfDomain, Errors) {
  const auto m = labeled({{"A0", 4}, {"A01", 4}});
  try {
    split_out_of_domain(m, {AttackerLabel("A0"), AttackerLabel("A01")});
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("no training labels remain"), std::string::npos);
  }
  try {
    split_out_of_domain(m, {AttackerLabel("A09")});
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("A09"), std::string::npos);
  }
  EXPECT_THROW(split_out_of_domain(m, {}), ContractError);
}

TEST(SplitSpec, Parses) {
  const auto a = parse_split_spec("in-domain:0.9");
  EXPECT_EQ(a.mode, SplitSpec::Mode::in_domain);
  EXPECT_DOUBLE_EQ(a.train_fraction, 0.9);
  const auto b = parse_split_spec("out-of-domain:A02,A04,A12,A14");
  EXPECT_EQ(b.mode, SplitSpec::Mode::out_of_domain);
  EXPECT_EQ(b.held_out.size(), 4u);
  EXPECT_TRUE(b.held_out.contains(AttackerLabel("A12")));
  EXPECT_THROW(parse_split_spec("in-domain:1.5"), ValidationError);
  EXPECT_THROW(parse_split_spec("sideways:1"), ValidationError);
  EXPECT_THROW(parse_split_spec("out-of-domain:"), ValidationError);
}
