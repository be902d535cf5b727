#include "spoofprint/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "spoofprint/errors.hpp"

namespace spoofprint {
namespace {

template <typename T>
void put(std::string& out, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  template <typename T>
  T get(const char* field) {
    need(sizeof(T), field);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }

  std::string bytes(std::size_t n, const char* field) {
    need(n, field);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* field) {
    if (bytes_.size() - pos_ < n) throw FormatError(what_ + ": truncated while reading " + field);
  }

  const std::string& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_container(const Container& c) {
  std::string out(c.magic.data(), c.magic.size());
  put<std::uint32_t>(out, c.version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.dims.size()));
  for (auto d : c.dims) put<std::uint64_t>(out, d);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.strings.size()));
  for (const auto& s : c.strings) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out += s;
  }
  put<std::uint64_t>(out, c.weights.size());
  for (double w : c.weights) put<double>(out, w);
  return out;
}

void write_container(const Container& c, const std::filesystem::path& path) {
  const std::string bytes = encode_container(c);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

Container decode_container(const std::string& bytes, const std::array<char, 4>& magic,
                           std::uint32_t version, const std::string& what) {
  Reader r(bytes, what);
  Container c;
  const std::string m = r.bytes(4, "magic");
  if (std::memcmp(m.data(), magic.data(), 4) != 0) {
    throw FormatError(what + ": bad magic '" + m + "', expected '" + std::string(magic.data(), 4) + "'");
  }
  c.magic = magic;
  c.version = r.get<std::uint32_t>("version");
  if (c.version != version) {
    throw VersionError(what + ": unsupported version " + std::to_string(c.version) + " (expected " +
                           std::to_string(version) + ")",
                       version, c.version);
  }
  const auto n_dims = r.get<std::uint32_t>("dimension count");
  for (std::uint32_t i = 0; i < n_dims; ++i) c.dims.push_back(r.get<std::uint64_t>("dimension table"));
  const auto n_strings = r.get<std::uint32_t>("string count");
  for (std::uint32_t i = 0; i < n_strings; ++i) {
    const auto len = r.get<std::uint32_t>("string length");
    c.strings.push_back(r.bytes(len, "string table"));
  }
  const auto n_weights = r.get<std::uint64_t>("weight count");
  if (n_weights > bytes.size() / 8) throw FormatError(what + ": truncated while reading weights");
  c.weights.reserve(n_weights);
  for (std::uint64_t i = 0; i < n_weights; ++i) c.weights.push_back(r.get<double>("weights"));
  if (!r.at_end()) throw FormatError(what + ": trailing bytes after weights");
  return c;
}

Container read_container(const std::filesystem::path& path, const std::array<char, 4>& magic,
                         std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_container(bytes, magic, version, path.string());
}

void save_checkpoint(const EmbeddingNetworkParams& p, const std::filesystem::path& path) {
  Container c;
  c.magic = kEmbedderMagic;
  c.version = kEmbedderVersion;
  c.dims = {NetworkShape::kLayers, static_cast<std::uint64_t>(p.shape.input_dim),
            static_cast<std::uint64_t>(p.shape.hidden), static_cast<std::uint64_t>(p.shape.embed_dim)};
  c.weights.reserve(2 * p.input_mean.size() + p.values.size());
  c.weights.insert(c.weights.end(), p.input_mean.data(), p.input_mean.data() + p.input_mean.size());
  c.weights.insert(c.weights.end(), p.input_scale.data(), p.input_scale.data() + p.input_scale.size());
  c.weights.insert(c.weights.end(), p.values.begin(), p.values.end());
  write_container(c, path);
}

EmbeddingNetworkParams load_checkpoint(const std::filesystem::path& path) {
  const Container c = read_container(path, kEmbedderMagic, kEmbedderVersion);
  const std::string where = path.string() + ": ";
  if (c.dims.size() != 4) throw FormatError(where + "dimension table must hold 4 entries");
  if (c.dims[0] != NetworkShape::kLayers) throw FormatError(where + "dimension mismatch in layers");
  NetworkShape shape;
  shape.input_dim = static_cast<int>(c.dims[1]);
  shape.hidden = static_cast<int>(c.dims[2]);
  shape.embed_dim = static_cast<int>(c.dims[3]);
  if (shape.input_dim < 1 || shape.hidden < 1 || shape.embed_dim < 1) {
    throw FormatError(where + "dimension mismatch: zero-sized input_dim, hidden or embed_dim");
  }
  const ParamLayout layout(shape);
  const std::size_t expect = 2 * static_cast<std::size_t>(shape.input_dim) + layout.size();
  if (c.weights.size() != expect) {
    throw FormatError(where + "dimension mismatch in weights: expected " + std::to_string(expect) +
                      ", found " + std::to_string(c.weights.size()));
  }
  EmbeddingNetworkParams p;
  p.shape = shape;
  const auto d = static_cast<std::size_t>(shape.input_dim);
  p.input_mean = Eigen::Map<const Eigen::VectorXd>(c.weights.data(), shape.input_dim);
  p.input_scale = Eigen::Map<const Eigen::VectorXd>(c.weights.data() + d, shape.input_dim);
  p.values.assign(c.weights.begin() + static_cast<std::ptrdiff_t>(2 * d), c.weights.end());
  return p;
}

}  // namespace spoofprint
