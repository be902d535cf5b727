#include "spoofprint/embedding_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spoofprint/errors.hpp"

namespace spoofprint {

using nlohmann::json;

void write_embeddings_jsonl(const std::vector<EmbeddingRecord>& rows, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& r : rows) {
    json row;
    row["utterance_id"] = r.utterance_id;
    row["label"] = r.label ? json(r.label->str()) : json(nullptr);
    row["vector"] = std::vector<double>(r.vector.data(), r.vector.data() + r.vector.size());
    out << row.dump() << '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << out.str();
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<EmbeddingRecord> read_embeddings_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<EmbeddingRecord> rows;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const json row = json::parse(line);
      EmbeddingRecord r;
      r.utterance_id = row.at("utterance_id").get<std::string>();
      if (row.contains("label") && row["label"].is_string()) r.label = AttackerLabel(row["label"].get<std::string>());
      const auto v = row.at("vector").get<std::vector<double>>();
      r.vector = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      if (dim >= 0 && r.vector.size() != dim) throw ShapeError(where + "embedding dimension changes");
      dim = r.vector.size();
      rows.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(where + e.what());
    }
  }
  return rows;
}

}  // namespace spoofprint
