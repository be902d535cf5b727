#include "spoofprint/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "spoofprint/errors.hpp"
#include "spoofprint/rng.hpp"

namespace spoofprint {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<Gender> parse_gender(const std::string& s) {
  if (s == "male" || s == "m" || s == "M") return Gender::male;
  if (s == "female" || s == "f" || s == "F") return Gender::female;
  return std::nullopt;
}

const char* to_string(Gender g) { return g == Gender::male ? "male" : "female"; }

Waveform load_waveform(const UtteranceRecord& rec) {
  if (const auto* w = std::get_if<Waveform>(&rec.source)) return *w;
  const auto& path = std::get<fs::path>(rec.source);
  if (!rec.source_resolved) {
    throw IoError(rec.utterance_id + ": audio source unresolved (" + path.string() + ")");
  }
  return read_wav(path);
}

DatasetManifest::DatasetManifest(std::vector<UtteranceRecord> records, Provenance provenance,
                                 std::optional<std::set<AttackerLabel>> declared_labels)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  if (records_.empty()) throw ContractError("manifest: no records");
  std::unordered_set<std::string> ids;
  for (const auto& r : records_) {
    if (!ids.insert(r.utterance_id).second) {
      throw ContractError("manifest: duplicate utterance_id '" + r.utterance_id + "'");
    }
  }
  if (declared_labels) {
    labels_ = std::move(*declared_labels);
    for (const auto& r : records_) {
      if (r.label && !labels_.contains(*r.label)) {
        throw ContractError("manifest: label '" + r.label->str() + "' of '" + r.utterance_id +
                            "' is not in the declared label set");
      }
    }
  } else {
    labels_ = present_labels();
  }
}

std::set<AttackerLabel> DatasetManifest::present_labels() const {
  std::set<AttackerLabel> out;
  for (const auto& r : records_) {
    if (r.label) out.insert(*r.label);
  }
  return out;
}

std::size_t DatasetManifest::count(const AttackerLabel& label) const {
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(), [&](const auto& r) { return r.label == label; }));
}

bool DatasetManifest::fully_labeled() const {
  return std::all_of(records_.begin(), records_.end(), [](const auto& r) { return r.label.has_value(); });
}

void write_manifest_jsonl(const DatasetManifest& m, const fs::path& path) {
  const fs::path base = fs::absolute(path).lexically_normal().parent_path();
  std::ostringstream out;
  for (const auto& r : m.records()) {
    const auto* p = std::get_if<fs::path>(&r.source);
    if (p == nullptr) {
      throw ContractError("manifest: record '" + r.utterance_id + "' holds inline audio; write the WAV first");
    }
    // In-memory relative paths are relative to the working directory; on disk they are
    // stored relative to the manifest when the audio lives below it.
    fs::path stored = fs::absolute(*p).lexically_normal();
    const fs::path rel = stored.lexically_relative(base);
    if (!rel.empty() && *rel.begin() != "..") stored = rel;
    json row;
    row["utterance_id"] = r.utterance_id;
    row["path"] = stored.generic_string();
    row["label"] = r.label ? json(r.label->str()) : json(nullptr);
    if (r.gender) row["gender"] = to_string(*r.gender);
    out << row.dump() << '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
  if (!f) throw IoError("write failed for " + path.string());
}

DatasetManifest read_manifest_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  std::vector<UtteranceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!row.contains("utterance_id") || !row.contains("path")) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": record needs utterance_id and path");
    }
    UtteranceRecord rec;
    rec.utterance_id = row.at("utterance_id").get<std::string>();
    fs::path p = row.at("path").get<std::string>();
    if (p.is_relative()) p = base / p;
    rec.source_resolved = fs::exists(p);
    rec.source = p;
    if (row.contains("label") && row["label"].is_string()) {
      rec.label = AttackerLabel(row["label"].get<std::string>());
    }
    if (row.contains("gender") && row["gender"].is_string()) {
      rec.gender = parse_gender(row["gender"].get<std::string>());
    }
    records.push_back(std::move(rec));
  }
  return DatasetManifest(std::move(records), {"external", path.string()});
}

ProtocolParse parse_asvspoof_protocol(const fs::path& protocol_path, const fs::path& audio_dir) {
  std::ifstream in(protocol_path);
  if (!in) throw IoError("cannot open " + protocol_path.string());
  std::vector<UtteranceRecord> records;
  std::vector<std::string> warnings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = protocol_path.string() + ":" + std::to_string(line_no) + ": ";
    if (tok.size() != 5) {
      throw FormatError(where + "expected 5 fields, found " + std::to_string(tok.size()));
    }
    const std::string& file_id = tok[1];
    const std::string& attack = tok[3];
    const std::string& key = tok[4];
    UtteranceRecord rec;
    rec.utterance_id = file_id;
    if (key == "bonafide") {
      rec.label = AttackerLabel::bonafide();
    } else if (key == "spoof") {
      if (attack == "-") throw FormatError(where + "spoof row without attack id");
      rec.label = AttackerLabel(attack);
    } else {
      throw FormatError(where + "key must be 'bonafide' or 'spoof', found '" + key + "'");
    }
    rec.source_resolved = false;
    rec.source = audio_dir / (file_id + ".flac");
    for (const char* ext : {".flac", ".wav"}) {
      const fs::path candidate = audio_dir / (file_id + ext);
      if (fs::exists(candidate)) {
        rec.source = candidate;
        rec.source_resolved = true;
        break;
      }
    }
    if (!rec.source_resolved) warnings.push_back(where + "no audio for " + file_id);
    records.push_back(std::move(rec));
  }
  return {DatasetManifest(std::move(records),
                          {"external", audio_dir.string() + " + " + protocol_path.string()}),
          std::move(warnings)};
}

Split split_in_domain(const DatasetManifest& m, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("split_in_domain: train_fraction must lie in (0, 1)");
  }
  if (!m.fully_labeled()) throw ContractError("split_in_domain: every record must be labeled");

  std::map<AttackerLabel, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < m.size(); ++i) by_label[*m.records()[i].label].push_back(i);

  std::vector<char> in_train(m.size(), 0);
  Rng rng(seed);
  for (auto& [label, idx] : by_label) {
    if (idx.size() < 2) {
      throw ContractError("split_in_domain: label '" + label.str() + "' has fewer than 2 records");
    }
    rng.shuffle(idx.begin(), idx.end());
    const auto n_train = static_cast<std::size_t>(std::llround(idx.size() * train_fraction));
    for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = 1;
  }

  std::vector<UtteranceRecord> train;
  std::vector<UtteranceRecord> test;
  for (std::size_t i = 0; i < m.size(); ++i) {
    (in_train[i] ? train : test).push_back(m.records()[i]);
  }
  if (train.empty() || test.empty()) {
    throw ContractError("split_in_domain: fraction leaves an empty partition");
  }
  Provenance p{"derived", m.provenance().detail + " | in-domain " + std::to_string(train_fraction)};
  return {DatasetManifest(std::move(train), p, m.label_set()),
          DatasetManifest(std::move(test), p, m.label_set())};
}

Split split_out_of_domain(const DatasetManifest& m, const std::set<AttackerLabel>& held_out) {
  if (held_out.empty()) throw ContractError("split_out_of_domain: held-out set is empty");
  const auto present = m.present_labels();
  for (const auto& label : held_out) {
    if (!present.contains(label)) {
      throw ContractError("split_out_of_domain: held-out label '" + label.str() +
                          "' is absent from the manifest");
    }
  }
  std::vector<UtteranceRecord> train;
  std::vector<UtteranceRecord> test;
  for (const auto& r : m.records()) {
    (r.label && held_out.contains(*r.label) ? test : train).push_back(r);
  }
  if (train.empty() || present.size() == held_out.size()) {
    throw ContractError("split_out_of_domain: no training labels remain");
  }
  std::string held;
  for (const auto& l : held_out) held += (held.empty() ? "" : ",") + l.str();
  Provenance p{"derived", m.provenance().detail + " | out-of-domain " + held};
  return {DatasetManifest(std::move(train), p, m.label_set()),
          DatasetManifest(std::move(test), p, m.label_set())};
}

SplitSpec parse_split_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("split: expected 'in-domain:<fraction>' or 'out-of-domain:<labels>'");
  }
  const std::string mode = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  SplitSpec spec;
  if (mode == "in-domain") {
    spec.mode = SplitSpec::Mode::in_domain;
    try {
      std::size_t used = 0;
      spec.train_fraction = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw ValidationError("split: bad in-domain fraction '" + arg + "'");
    }
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
      throw ValidationError("split: in-domain fraction must lie in (0, 1)");
    }
  } else if (mode == "out-of-domain") {
    spec.mode = SplitSpec::Mode::out_of_domain;
    std::istringstream labels(arg);
    for (std::string l; std::getline(labels, l, ',');) {
      if (!l.empty()) spec.held_out.insert(AttackerLabel(l));
    }
    if (spec.held_out.empty()) throw ValidationError("split: out-of-domain needs at least one label");
  } else {
    throw ValidationError("split: unknown mode '" + mode + "'");
  }
  return spec;
}

Split apply_split(const DatasetManifest& m, const SplitSpec& spec, std::uint64_t seed) {
  if (spec.mode == SplitSpec::Mode::in_domain) return split_in_domain(m, spec.train_fraction, seed);
  return split_out_of_domain(m, spec.held_out);
}

}  // namespace spoofprint
