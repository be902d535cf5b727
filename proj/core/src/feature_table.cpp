#include "spoofprint/feature_table.hpp"

#include <fstream>
#include <sstream>

#include "spoofprint/csv.hpp"
#include "spoofprint/errors.hpp"

namespace spoofprint {

std::string feature_csv_string(const std::vector<FeatureRow>& rows) {
  std::ostringstream out;
  out << "utterance_id,label";
  for (auto name : LowLevelSignature::field_names()) out << ',' << name;
  out << ",degraded\r\n";
  for (const auto& row : rows) {
    out << csv::quote(row.utterance_id) << ',' << (row.label ? csv::quote(row.label->str()) : "");
    for (double v : row.signature.to_array()) out << ',' << csv::number(v);
    out << ',' << (row.signature.degraded ? "true" : "false") << "\r\n";
  }
  return out.str();
}

void write_feature_csv(const std::vector<FeatureRow>& rows, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << feature_csv_string(rows);
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty feature table");
  const auto header = csv::split(line);
  const auto& names = LowLevelSignature::field_names();
  if (header.size() != names.size() + 3 || header[0] != "utterance_id" || header[1] != "label" ||
      header.back() != "degraded") {
    throw FormatError(path.string() + ": unexpected feature table header");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (header[i + 2] != names[i]) {
      throw FormatError(path.string() + ": column " + std::to_string(i + 2) + " should be " +
                        std::string(names[i]));
    }
  }
  std::vector<FeatureRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    }
    FeatureRow row;
    row.utterance_id = fields[0];
    if (!fields[1].empty()) row.label = AttackerLabel(fields[1]);
    std::array<double, LowLevelSignature::kDim> values{};
    try {
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::stod(fields[i + 2]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": non-numeric feature");
    }
    row.signature = LowLevelSignature::from_array(values, fields.back() == "true");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace spoofprint
