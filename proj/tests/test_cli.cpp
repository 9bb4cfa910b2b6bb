#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "ouphase/synth.hpp"
#include "ouphase/training.hpp"
#include "ouphase/wave.hpp"
#include "test_util.hpp"

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(OUPHASE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::size_t line_count(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

std::filesystem::path make_tone_wav(const testutil::TempDir& tmp,
                                    const std::string& name, double seconds) {
  const auto path = tmp.file(name);
  ouphase::write_wav(path, ouphase::make_tone(1000.0, seconds, 16000));
  return path;
}

}  // namespace

TEST_CASE("cli: help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("retrieve --help") == 0);
  CHECK(run("no-such-command") == 1);
  CHECK(run("") == 1);  // subcommand required
  CHECK(run("retrieve") == 1);  // input required
}

TEST_CASE("cli: retrieve validates its sampler and mode flags") {
  testutil::TempDir tmp;
  const auto tone = make_tone_wav(tmp, "tone.wav", 0.3);
  const auto out = tmp.file("out.wav");

  // Invalid step count is a usage error (exit 1), missing input a runtime
  // error (exit 2), and --oracle/--checkpoint are mutually exclusive.
  CHECK(run("retrieve " + tone.string() + " --oracle --steps 0 -o " + out.string()) == 1);
  CHECK(run("retrieve " + tmp.file("absent.wav").string() + " --oracle -o " +
            out.string()) == 2);
  CHECK(run("retrieve " + tone.string() + " -o " + out.string()) == 1);
  CHECK(run("retrieve " + tone.string() + " --oracle --checkpoint x.ckpt -o " +
            out.string()) == 1);
}

TEST_CASE("cli: oracle retrieval writes deterministic output and a report") {
  testutil::TempDir tmp;
  const auto tone = make_tone_wav(tmp, "tone.wav", 0.3);
  const auto out_a = tmp.file("a.wav");
  const auto out_b = tmp.file("b.wav");
  const auto report = tmp.file("report.csv");

  const std::string base = "retrieve " + tone.string() + " --oracle --steps 20 --seed 5 ";
  REQUIRE(run(base + "-o " + out_a.string() + " --report " + report.string()) == 0);
  REQUIRE(run(base + "-o " + out_b.string()) == 0);

  // Same seed, same inputs: byte-identical WAVs.
  const std::string bytes_a = slurp(out_a);
  CHECK(!bytes_a.empty());
  CHECK(bytes_a == slurp(out_b));

  std::ifstream rep(report);
  std::string header;
  std::getline(rep, header);
  CHECK(header ==
        "length_s,mean_time_s,rtf,spectral_convergence,consistency_residual,si_snr_db");
  CHECK(line_count(report) == 2);
}

TEST_CASE("cli: different seeds give different waveforms") {
  testutil::TempDir tmp;
  const auto tone = make_tone_wav(tmp, "tone.wav", 0.3);
  const auto out_a = tmp.file("a.wav");
  const auto out_b = tmp.file("b.wav");

  REQUIRE(run("retrieve " + tone.string() + " --oracle --steps 20 --seed 5 -o " +
              out_a.string()) == 0);
  REQUIRE(run("retrieve " + tone.string() + " --oracle --steps 20 --seed 6 -o " +
              out_b.string()) == 0);
  CHECK(slurp(out_a) != slurp(out_b));
}

TEST_CASE("cli: gla writes a non-increasing residual trace") {
  testutil::TempDir tmp;
  const auto tone = make_tone_wav(tmp, "tone.wav", 0.3);
  const auto out = tmp.file("gla.wav");
  const auto trace = tmp.file("trace.csv");

  REQUIRE(run("gla " + tone.string() + " --iterations 15 -o " + out.string() +
              " --trace " + trace.string()) == 0);

  std::ifstream in(trace);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,residual");
  std::vector<double> residuals;
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    residuals.push_back(std::stod(line.substr(comma + 1)));
  }
  REQUIRE(residuals.size() == 15);
  for (std::size_t i = 1; i < residuals.size(); ++i) {
    CHECK(residuals[i] <= residuals[i - 1] + 1e-8);
  }
}

TEST_CASE("cli: simulate-1d honors flag-over-file precedence") {
  testutil::TempDir tmp;
  const auto conf = tmp.file("sim.conf");
  {
    std::ofstream out(conf);
    out << "n_steps = 7\nseed = 3\n";
  }
  const auto traj = tmp.file("traj.csv");
  const auto hist = tmp.file("hist.csv");
  const std::string io =
      " --out-trajectories " + traj.string() + " --out-histogram " + hist.string();

  // Config file alone: N = 7, so 5 trajectories write 5 * 8 rows + header.
  REQUIRE(run("simulate-1d --trajectories 5 --config " + conf.string() + io) == 0);
  CHECK(line_count(traj) == 1 + 5 * 8);

  // An explicit --steps flag overrides the file.
  REQUIRE(run("simulate-1d --trajectories 5 --steps 4 --config " + conf.string() + io) ==
          0);
  CHECK(line_count(traj) == 1 + 5 * 5);

  std::ifstream in(hist);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_center,count");
}

TEST_CASE("cli: unknown config keys are rejected") {
  testutil::TempDir tmp;
  const auto conf = tmp.file("bad.conf");
  {
    std::ofstream out(conf);
    out << "sigma_minn = 0.1\n";
  }
  CHECK(run("simulate-1d --config " + conf.string()) == 1);
}

TEST_CASE("cli: train then retrieve from the checkpoint") {
  testutil::TempDir tmp;
  const auto corpus = tmp.path / "corpus";
  std::filesystem::create_directories(corpus);
  ouphase::Rng rng(9);
  for (int i = 0; i < 3; ++i) {
    ouphase::write_wav(corpus / ("item" + std::to_string(i) + ".wav"),
                       ouphase::make_sinusoid_mixture(0.3, 16000, 4, rng));
  }

  const auto ckpt = tmp.file("net.ckpt");
  const auto trace = tmp.file("loss.csv");
  REQUIRE(run("train " + corpus.string() + " --train-steps 4 --slice-frames 16 " +
              "--seed 2 -o " + ckpt.string() + " --trace " + trace.string()) == 0);

  std::ifstream in(trace);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,loss");
  CHECK(line_count(trace) == 5);
  CHECK(std::filesystem::exists(ckpt));
  CHECK(std::filesystem::exists(ckpt.string() + ".manifest"));

  const auto tone = make_tone_wav(tmp, "tone.wav", 0.3);
  const auto out = tmp.file("net_out.wav");
  CHECK(run("retrieve " + tone.string() + " --checkpoint " + ckpt.string() +
            " --steps 5 -o " + out.string()) == 0);
  CHECK(std::filesystem::exists(out));

  // Resuming from the checkpoint continues the step counter.
  const auto ckpt2 = tmp.file("net2.ckpt");
  REQUIRE(run("train " + corpus.string() + " --train-steps 2 --slice-frames 16 " +
              "--resume " + ckpt.string() + " -o " + ckpt2.string()) == 0);
  const auto loaded = ouphase::load_checkpoint(ckpt2);
  CHECK(loaded.step == 6);
}

TEST_CASE("cli: train on an empty corpus fails cleanly") {
  testutil::TempDir tmp;
  const auto corpus = tmp.path / "empty";
  std::filesystem::create_directories(corpus);
  // An unusable corpus is a usage error, not an internal failure.
  CHECK(run("train " + corpus.string() + " --train-steps 1 -o " +
            tmp.file("x.ckpt").string()) == 1);
}

TEST_CASE("cli: benchmark emits the documented csv schema") {
  testutil::TempDir tmp;
  const auto csv = tmp.file("bench.csv");
  REQUIRE(run("benchmark --lengths 0.25 --n-values 3 6 --repetitions 1 "
              "--methods diffusion-oracle -o " +
              csv.string()) == 0);

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "method,length_s,n_steps,mean_time_s,rtf");
  CHECK(line_count(csv) == 3);  // two N values for one method and length
}

TEST_CASE("cli: eval compares two waveforms") {
  testutil::TempDir tmp;
  const auto tone = make_tone_wav(tmp, "tone.wav", 0.3);
  const auto report = tmp.file("eval.csv");
  REQUIRE(run("eval --reference " + tone.string() + " --estimate " + tone.string() +
              " --report " + report.string()) == 0);
  std::ifstream in(report);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header ==
        "length_s,mean_time_s,rtf,spectral_convergence,consistency_residual,si_snr_db");
  // Identical signals: SI-SNR is the 100 dB cap, the row's final column.
  REQUIRE(row.size() >= 4);
  CHECK(row.substr(row.size() - 4) == ",100");
}
