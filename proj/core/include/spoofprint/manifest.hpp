#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spoofprint/waveform.hpp"

namespace spoofprint {

/// Attacker identity. "A0" is reserved for bonafide speech; labels compare by exact string.
class AttackerLabel {
 public:
  AttackerLabel() = default;
  explicit AttackerLabel(std::string id) : id_(std::move(id)) {}

  static AttackerLabel bonafide() { return AttackerLabel("A0"); }

  const std::string& str() const noexcept { return id_; }
  bool is_bonafide() const noexcept { return id_ == "A0"; }

  auto operator<=>(const AttackerLabel&) const = default;

 private:
  std::string id_;
};

enum class Gender { male, female };

std::optional<Gender> parse_gender(const std::string& s);
const char* to_string(Gender g);

/// Where an utterance's audio lives: a file on disk or samples held in memory.
using AudioSource = std::variant<std::filesystem::path, Waveform>;

struct UtteranceRecord {
  std::string utterance_id;
  AudioSource source;
  std::optional<AttackerLabel> label;
  std::optional<Gender> gender;
  /// False when a protocol row referenced audio that could not be found.
  bool source_resolved = true;
};

/// Loads the record's audio: reads the file or returns the inline copy.
Waveform load_waveform(const UtteranceRecord& rec);

struct Provenance {
  std::string kind;    // "synthetic" | "external" | "derived"
  std::string detail;  // generator config + seed, or directory + protocol file
};

/// Immutable list of utterances. Ids are unique; every label belongs to label_set().
class DatasetManifest {
 public:
  /// Declared label set defaults to the labels present in the records.
  DatasetManifest(std::vector<UtteranceRecord> records, Provenance provenance,
                  std::optional<std::set<AttackerLabel>> declared_labels = std::nullopt);

  const std::vector<UtteranceRecord>& records() const noexcept { return records_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  const std::set<AttackerLabel>& label_set() const noexcept { return labels_; }
  std::size_t size() const noexcept { return records_.size(); }

  /// Labels actually carried by at least one record, sorted.
  std::set<AttackerLabel> present_labels() const;
  std::size_t count(const AttackerLabel& label) const;
  bool fully_labeled() const;

 private:
  std::vector<UtteranceRecord> records_;
  Provenance provenance_;
  std::set<AttackerLabel> labels_;
};

/// Manifest JSON Lines: {"utterance_id", "path", "label", "gender"} per line.
/// Inline waveforms cannot be serialized; relative paths are resolved against the file's directory on read.
void write_manifest_jsonl(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest_jsonl(const std::filesystem::path& path);

struct ProtocolParse {
  DatasetManifest manifest;
  std::vector<std::string> warnings;
};

/// Parses an ASVspoof LA protocol file (speaker, file, unused, attack id or "-", key).
/// Audio is probed as audio_dir/file_id.flac then .wav; missing audio is a warning, not an error.
ProtocolParse parse_asvspoof_protocol(const std::filesystem::path& protocol_path,
                                      const std::filesystem::path& audio_dir);

struct Split {
  DatasetManifest train;
  DatasetManifest test;
};

/// Stratified split: per label, round(n * train_fraction) records go to train after a seeded shuffle.
Split split_in_domain(const DatasetManifest& m, double train_fraction, std::uint64_t seed);

/// All records of the held-out labels form the test set; everything else trains.
Split split_out_of_domain(const DatasetManifest& m, const std::set<AttackerLabel>& held_out);

/// Parsed --split value: "in-domain:0.9" or "out-of-domain:A02,A04".
struct SplitSpec {
  enum class Mode { in_domain, out_of_domain } mode = Mode::in_domain;
  double train_fraction = 0.9;
  std::set<AttackerLabel> held_out;
};

SplitSpec parse_split_spec(const std::string& text);
Split apply_split(const DatasetManifest& m, const SplitSpec& spec, std::uint64_t seed);

}  // namespace spoofprint
