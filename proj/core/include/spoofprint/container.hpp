#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spoofprint/network.hpp"

namespace spoofprint {

/// Binary artifact shared by embedder and classifier checkpoints, all little-endian:
///   magic[4] | version u32 | n_dims u32 | dims u64[n_dims]
///   | n_strings u32 | (len u32, bytes)[n_strings] | n_weights u64 | weights f64[n_weights]
struct Container {
  std::array<char, 4> magic{};
  std::uint32_t version = 0;
  std::vector<std::uint64_t> dims;
  std::vector<std::string> strings;
  std::vector<double> weights;
};

std::string encode_container(const Container& c);
void write_container(const Container& c, const std::filesystem::path& path);

/// Throws FormatError on bad magic or truncation and VersionError on a version other than expected.
Container decode_container(const std::string& bytes, const std::array<char, 4>& magic,
                           std::uint32_t version, const std::string& what);
Container read_container(const std::filesystem::path& path, const std::array<char, 4>& magic,
                         std::uint32_t version);

inline constexpr std::array<char, 4> kEmbedderMagic{'A', 'E', 'M', 'B'};
inline constexpr std::uint32_t kEmbedderVersion = 1;

/// dims = [layers, input_dim, hidden, embed_dim]; weights = input_mean, input_scale, parameters.
void save_checkpoint(const EmbeddingNetworkParams& p, const std::filesystem::path& path);
EmbeddingNetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace spoofprint
