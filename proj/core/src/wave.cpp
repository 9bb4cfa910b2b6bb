#include "ouphase/wave.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace ouphase {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

template <typename T>
T read_le(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(value))) {
    throw std::runtime_error(std::string("WAV: truncated file while reading ") + what);
  }
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  bool seen = false;
};

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("WAV: cannot open file: " + path.string());
  }

  char tag[4];
  if (!in.read(tag, 4) || std::memcmp(tag, "RIFF", 4) != 0) {
    throw std::runtime_error("WAV: missing RIFF header: " + path.string());
  }
  read_le<std::uint32_t>(in, "RIFF size");
  if (!in.read(tag, 4) || std::memcmp(tag, "WAVE", 4) != 0) {
    throw std::runtime_error("WAV: not a WAVE file: " + path.string());
  }

  FmtChunk fmt;
  std::vector<char> data;
  bool data_seen = false;

  // Walk chunks; unknown chunks are skipped. Data is interpreted once fmt is known.
  while (in.read(tag, 4)) {
    const auto chunk_size = read_le<std::uint32_t>(in, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw std::runtime_error("WAV: fmt chunk too small");
      }
      fmt.format = read_le<std::uint16_t>(in, "format");
      fmt.channels = read_le<std::uint16_t>(in, "channels");
      fmt.sample_rate = read_le<std::uint32_t>(in, "sample rate");
      read_le<std::uint32_t>(in, "byte rate");
      read_le<std::uint16_t>(in, "block align");
      fmt.bits_per_sample = read_le<std::uint16_t>(in, "bits per sample");
      fmt.seen = true;
      in.seekg(chunk_size - 16, std::ios::cur);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(chunk_size);
      if (!in.read(data.data(), chunk_size)) {
        throw std::runtime_error("WAV: truncated data chunk");
      }
      data_seen = true;
    } else {
      // Chunks are word-aligned; skip payload plus pad byte if odd.
      in.seekg(chunk_size + (chunk_size & 1u), std::ios::cur);
    }
    if (chunk_size & 1u && std::memcmp(tag, "data", 4) == 0) {
      in.seekg(1, std::ios::cur);
    }
  }

  if (!fmt.seen || !data_seen) {
    throw std::runtime_error("WAV: missing fmt or data chunk: " + path.string());
  }
  if (fmt.channels != 1) {
    throw std::invalid_argument("WAV: only mono input is supported (got " +
                                std::to_string(fmt.channels) + " channels)");
  }

  Waveform wave;
  wave.sample_rate = static_cast<int>(fmt.sample_rate);

  if (fmt.format == kFormatPcm && fmt.bits_per_sample == 16) {
    const std::size_t n = data.size() / 2;
    wave.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v;
      std::memcpy(&v, data.data() + 2 * i, 2);
      wave.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (fmt.format == kFormatFloat && fmt.bits_per_sample == 32) {
    const std::size_t n = data.size() / 4;
    wave.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data.data() + 4 * i, 4);
      wave.samples[i] = static_cast<double>(v);
    }
  } else {
    throw std::invalid_argument("WAV: unsupported encoding (format=" +
                                std::to_string(fmt.format) + ", bits=" +
                                std::to_string(fmt.bits_per_sample) +
                                "); expected PCM16 or float32");
  }
  return wave;
}

void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding) {
  if (wave.sample_rate <= 0) {
    throw std::invalid_argument("WAV: sample rate must be positive");
  }
  for (double s : wave.samples) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("WAV: non-finite sample");
    }
  }

  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const std::uint16_t bytes_per_sample = bits / 8;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(wave.samples.size() * bytes_per_sample);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("WAV: cannot open file for writing: " + path.string());
  }

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat);
  write_le<std::uint16_t>(out, 1);  // mono
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate) * bytes_per_sample);
  write_le<std::uint16_t>(out, bytes_per_sample);
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  if (encoding == WavEncoding::pcm16) {
    for (double s : wave.samples) {
      const double clipped = std::min(1.0, std::max(-1.0, s));
      long q = std::lrint(clipped * 32768.0);
      q = std::min<long>(32767, std::max<long>(-32768, q));
      write_le<std::int16_t>(out, static_cast<std::int16_t>(q));
    }
  } else {
    for (double s : wave.samples) {
      write_le<float>(out, static_cast<float>(s));
    }
  }
  if (!out) {
    throw std::runtime_error("WAV: write failed: " + path.string());
  }
}

}  // namespace ouphase
