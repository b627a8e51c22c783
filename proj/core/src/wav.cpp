#include "abshr/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "abshr/error.hpp"

namespace abshr {

namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::vector<std::uint8_t>& out, T v) {
  std::array<std::uint8_t, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  out.insert(out.end(), bytes.begin(), bytes.end());
}

void store_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioSegment read_wav(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file '" + name + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError("'" + name + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const auto len = static_cast<std::size_t>(load<std::uint32_t>(chunk + 4));
    const std::size_t body = pos + 8;
    const std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || len > avail) throw IoError("'" + name + "': truncated fmt chunk");
      format = load<std::uint16_t>(chunk + 8);
      channels = load<std::uint16_t>(chunk + 10);
      rate = load<std::uint32_t>(chunk + 12);
      bits = load<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible && len >= 40) {
        format = load<std::uint16_t>(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = std::min(len, avail);
      break;
    }
    pos = body + len + (len & 1u);
  }

  if (!have_fmt) throw IoError("'" + name + "': missing fmt chunk");
  if (data == nullptr) throw IoError("'" + name + "': missing data chunk");
  if (channels != 1) {
    throw IoError("'" + name + "': expected mono audio, found " +
                  std::to_string(channels) + " channels");
  }
  if (rate == 0) throw IoError("'" + name + "': sample rate is zero");

  std::vector<double> samples;
  if (format == kFormatPcm && bits == 16) {
    samples.resize(data_len / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = static_cast<double>(load<std::int16_t>(data + 2 * i)) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    samples.resize(data_len / 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = static_cast<double>(load<float>(data + 4 * i));
    }
  } else {
    throw IoError("'" + name + "': unsupported encoding (format " + std::to_string(format) +
                  ", " + std::to_string(bits) + " bits); expected PCM16 or float32");
  }
  try {
    return AudioSegment(std::move(samples), static_cast<double>(rate));
  } catch (const ArgumentError& e) {
    throw IoError("'" + name + "': " + e.what());
  }
}

void write_wav(const std::filesystem::path& path, const AudioSegment& segment,
               WavEncoding encoding) {
  const double rate_d = std::round(segment.sample_rate_hz());
  if (std::abs(rate_d - segment.sample_rate_hz()) > 1e-9 * rate_d) {
    throw IoError("WAV requires an integer sample rate, got " +
                  std::to_string(segment.sample_rate_hz()));
  }
  const auto rate = static_cast<std::uint32_t>(rate_d);
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const std::uint16_t block_align = bits / 8;
  const auto data_len = static_cast<std::uint32_t>(segment.size() * block_align);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  store_tag(out, "RIFF");
  store<std::uint32_t>(out, 36 + data_len);
  store_tag(out, "WAVE");
  store_tag(out, "fmt ");
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(out, 1);
  store<std::uint32_t>(out, rate);
  store<std::uint32_t>(out, rate * block_align);
  store<std::uint16_t>(out, block_align);
  store<std::uint16_t>(out, bits);
  store_tag(out, "data");
  store<std::uint32_t>(out, data_len);
  for (double v : segment.samples()) {
    if (encoding == WavEncoding::pcm16) {
      const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      store<std::int16_t>(out, static_cast<std::int16_t>(scaled));
    } else {
      store<float>(out, static_cast<float>(v));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write WAV file '" + path.string() + "'");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("short write to '" + path.string() + "'");
}

}  // namespace abshr
