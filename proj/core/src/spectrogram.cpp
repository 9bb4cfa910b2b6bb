#include "ouphase/spectrogram.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ouphase {
namespace {

static_assert(std::endian::native == std::endian::little,
              "spectrogram container assumes a little-endian host");

constexpr char kMagic[4] = {'O', 'U', 'S', 'P'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) {
    throw std::runtime_error(std::string("spectrogram: truncated header (") + what + ")");
  }
  return v;
}

}  // namespace

void save_spec(const std::filesystem::path& path, const ComplexSpectrogram& spec) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("spectrogram: cannot open file for writing: " + path.string());
  }
  out.write(kMagic, 4);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(spec.bins()));
  put_u32(out, static_cast<std::uint32_t>(spec.frames()));
  // std::complex<double> is layout-compatible with double[2] (re, im), and the
  // array is column-major, so one contiguous write covers the payload.
  out.write(reinterpret_cast<const char*>(spec.values.data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>) * spec.values.size()));
  if (!out) {
    throw std::runtime_error("spectrogram: write failed: " + path.string());
  }
}

ComplexSpectrogram load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("spectrogram: cannot open file: " + path.string());
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("spectrogram: bad magic: " + path.string());
  }
  const std::uint32_t version = get_u32(in, "version");
  if (version != kFormatVersion) {
    throw std::runtime_error("spectrogram: unsupported format version " +
                             std::to_string(version));
  }
  const std::uint32_t k = get_u32(in, "k_bins");
  const std::uint32_t l = get_u32(in, "l_frames");
  if (k == 0 || l == 0) {
    throw std::runtime_error("spectrogram: header dimensions must be nonzero");
  }

  ComplexSpectrogram spec;
  spec.values.resize(k, l);
  const std::streamsize payload =
      static_cast<std::streamsize>(sizeof(std::complex<double>)) * k * l;
  if (!in.read(reinterpret_cast<char*>(spec.values.data()), payload)) {
    throw std::runtime_error("spectrogram: payload smaller than header claims (" +
                             std::to_string(k) + "x" + std::to_string(l) + ")");
  }
  // Reject trailing garbage as well: the file must contain exactly the payload.
  char extra;
  if (in.read(&extra, 1)) {
    throw std::runtime_error("spectrogram: payload larger than header claims");
  }
  return spec;
}

}  // namespace ouphase
