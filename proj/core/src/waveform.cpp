#include "spoofprint/waveform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "spoofprint/errors.hpp"

namespace spoofprint {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0) throw ContractError("waveform: sample_rate must be positive");
  if (w.samples.empty()) throw ContractError("empty waveform");
  for (double s : w.samples) {
    if (!(std::abs(s) <= 1.0)) throw ContractError("waveform: sample outside [-1, 1]");
  }
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (bytes.size() < 12) throw IoError(where + "truncated RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(where + "not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  int sample_rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size()) throw IoError(where + "truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      std::uint16_t format = le16(f);
      const std::uint16_t channels = le16(f + 2);
      sample_rate = static_cast<int>(le32(f + 4));
      const std::uint16_t bits = le16(f + 14);
      if (format == kFormatExtensible && size >= 26 && body + 26 <= bytes.size()) {
        format = le16(f + 24);  // first two bytes of the subformat GUID
      }
      if (format != kFormatPcm) {
        throw FormatError(where + "unsupported audio format tag " + std::to_string(format));
      }
      if (channels != 1) {
        throw FormatError(where + "unsupported channel count " + std::to_string(channels));
      }
      if (bits != 16) throw FormatError(where + "unsupported bit depth " + std::to_string(bits));
      if (sample_rate <= 0) throw FormatError(where + "unsupported sample rate 0");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + size > bytes.size()) throw IoError(where + "truncated data chunk");
      data = bytes.data() + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) throw FormatError(where + "missing fmt chunk");
  if (data == nullptr) throw IoError(where + "missing or truncated data chunk");
  if (data_size % 2 != 0) throw IoError(where + "data chunk holds a partial sample");

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const auto code = static_cast<std::int16_t>(le16(data + 2 * i));
    w.samples[i] = static_cast<double>(code) / 32768.0;
  }
  if (w.samples.empty()) throw FormatError(where + "empty waveform");
  return w;
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  validate(w);
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  std::string out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  out += "RIFF";
  put32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(w.sample_rate));
  put32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, 2 * n);
  for (double s : w.samples) {
    const double code = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace spoofprint
