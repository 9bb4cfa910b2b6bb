#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ouphase/spectrogram.hpp"
#include "test_util.hpp"

using ouphase::ComplexSpectrogram;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void dump(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("spectrogram container round-trips bit-exactly") {
  testutil::TempDir tmp;
  ComplexSpectrogram spec;
  spec.values = testutil::random_field(7, 11, 42);
  spec.values(3, 5) = {-0.0, 1e-300};  // signed zero and subnormal-ish survive

  const auto path = tmp.file("spec.bin");
  ouphase::save_spec(path, spec);
  const ComplexSpectrogram back = ouphase::load_spec(path);

  REQUIRE(back.bins() == 7);
  REQUIRE(back.frames() == 11);
  for (Eigen::Index j = 0; j < back.frames(); ++j) {
    for (Eigen::Index i = 0; i < back.bins(); ++i) {
      CHECK(std::memcmp(&back.values(i, j), &spec.values(i, j),
                        sizeof(std::complex<double>)) == 0);
    }
  }
  // Fingerprint is intentionally not persisted.
  CHECK(back.config_fingerprint == 0);
}

TEST_CASE("container header is 16 bytes of magic, version, and shape") {
  testutil::TempDir tmp;
  ComplexSpectrogram spec;
  spec.values = testutil::random_field(3, 2, 1);

  const auto path = tmp.file("spec.bin");
  ouphase::save_spec(path, spec);
  const std::string bytes = slurp(path);

  REQUIRE(bytes.size() == 16 + 3 * 2 * 16);
  CHECK(bytes.substr(0, 4) == "OUSP");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version 1, little-endian
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);  // k bins
  CHECK(static_cast<unsigned char>(bytes[12]) == 2);  // l frames
}

TEST_CASE("load rejects bad magic") {
  testutil::TempDir tmp;
  const auto path = tmp.file("bad.bin");
  ComplexSpectrogram spec;
  spec.values = testutil::random_field(2, 2, 2);
  ouphase::save_spec(path, spec);

  std::string bytes = slurp(path);
  bytes[0] = 'X';
  dump(path, bytes);
  CHECK_THROWS_AS(ouphase::load_spec(path), std::runtime_error);
}

TEST_CASE("load rejects truncated and padded payloads") {
  testutil::TempDir tmp;
  const auto path = tmp.file("resized.bin");
  ComplexSpectrogram spec;
  spec.values = testutil::random_field(4, 4, 3);
  ouphase::save_spec(path, spec);
  const std::string bytes = slurp(path);

  dump(path, bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(ouphase::load_spec(path), std::runtime_error);

  dump(path, bytes + std::string(8, '\0'));
  CHECK_THROWS_AS(ouphase::load_spec(path), std::runtime_error);
}

TEST_CASE("load rejects zero-dimension headers and missing files") {
  testutil::TempDir tmp;
  const auto path = tmp.file("zero.bin");
  ComplexSpectrogram spec;
  spec.values = testutil::random_field(2, 3, 4);
  ouphase::save_spec(path, spec);

  std::string bytes = slurp(path);
  bytes[8] = bytes[9] = bytes[10] = bytes[11] = '\0';  // k_bins = 0
  dump(path, bytes);
  CHECK_THROWS_AS(ouphase::load_spec(path), std::runtime_error);

  CHECK_THROWS_AS(ouphase::load_spec(tmp.file("absent.bin")), std::runtime_error);
}
