#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ouphase {

/// A mono waveform with its sample rate. Samples are nominally in [-1, 1];
/// values outside the range are only clipped when quantizing to PCM16.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

enum class WavEncoding {
  pcm16,    ///< 16-bit signed integer PCM
  float32,  ///< 32-bit IEEE float
};

/// Reads a mono RIFF/WAVE file (PCM16 or float32).
/// Throws std::runtime_error on missing/corrupt files and
/// std::invalid_argument on unsupported layouts (multichannel, other codecs).
Waveform read_wav(const std::filesystem::path& path);

/// Writes a mono RIFF/WAVE file. PCM16 output clips to [-1, 1] and rounds to
/// nearest; float32 output is lossless. Non-finite samples are rejected.
void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding = WavEncoding::pcm16);

}  // namespace ouphase
