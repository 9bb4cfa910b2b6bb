#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ouphase/training.hpp"
#include "test_util.hpp"

using ouphase::ComplexField;
using ouphase::OuveParams;
using ouphase::SmallScoreNet;
using ouphase::TrainingConfig;

namespace {

std::vector<std::pair<ComplexField, ComplexField>> make_batch(int n, Eigen::Index rows,
                                                              Eigen::Index cols,
                                                              std::uint64_t seed) {
  std::vector<std::pair<ComplexField, ComplexField>> batch;
  for (int i = 0; i < n; ++i) {
    ComplexField x0 = testutil::random_field(rows, cols, seed + static_cast<unsigned>(i));
    ComplexField y = x0.abs().cast<std::complex<double>>();
    batch.emplace_back(std::move(x0), std::move(y));
  }
  return batch;
}

std::vector<ComplexField> make_dataset(int n, Eigen::Index rows, Eigen::Index cols,
                                       std::uint64_t seed) {
  std::vector<ComplexField> items;
  for (int i = 0; i < n; ++i) {
    items.push_back(testutil::random_field(rows, cols, seed + static_cast<unsigned>(i)));
  }
  return items;
}

}  // namespace

TEST_CASE("training config validation") {
  TrainingConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.learning_rate = 0.0;
  CHECK_NOTHROW(cfg.validate());  // zero is legal: parameters stay fixed

  cfg = TrainingConfig{};
  cfg.learning_rate = -1e-4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainingConfig{};
  cfg.learning_rate = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainingConfig{};
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainingConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainingConfig{};
  cfg.slice_frames = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainingConfig{};
  cfg.checkpoint_every = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("train_step returns the pre-update loss and is seed-deterministic") {
  const OuveParams params;
  TrainingConfig cfg;
  cfg.learning_rate = 0.0;
  const auto batch = make_batch(2, 16, 16, 100);

  SmallScoreNet net(1);
  const std::vector<double> before = net.serialize();

  ouphase::Rng rng_a(5), rng_b(5);
  SmallScoreNet::AdamState opt_a, opt_b;
  const double loss_a = ouphase::train_step(net, batch, rng_a, params, cfg, opt_a);
  // lr = 0: parameters unchanged, so an identical RNG stream repeats the loss.
  CHECK(net.serialize() == before);
  const double loss_b = ouphase::train_step(net, batch, rng_b, params, cfg, opt_b);
  CHECK(loss_a == loss_b);
  CHECK(loss_a > 0.0);
}

TEST_CASE("train_step rejects ragged batches and empty batches") {
  const OuveParams params;
  TrainingConfig cfg;
  SmallScoreNet net(1);
  SmallScoreNet::AdamState opt;
  ouphase::Rng rng(6);

  auto batch = make_batch(2, 8, 8, 200);
  batch[1].first = testutil::random_field(8, 9, 201);
  CHECK_THROWS_AS(ouphase::train_step(net, batch, rng, params, cfg, opt),
                  std::invalid_argument);

  std::vector<std::pair<ComplexField, ComplexField>> empty;
  CHECK_THROWS_AS(ouphase::train_step(net, empty, rng, params, cfg, opt),
                  std::invalid_argument);
}

TEST_CASE("train_step signals divergence on a non-finite loss") {
  const OuveParams params;
  TrainingConfig cfg;
  SmallScoreNet net(1);

  std::vector<double> poisoned = net.serialize();
  poisoned[10] = std::numeric_limits<double>::quiet_NaN();
  net.deserialize(poisoned);

  SmallScoreNet::AdamState opt;
  ouphase::Rng rng(7);
  const auto batch = make_batch(1, 8, 8, 300);
  CHECK_THROWS_AS(ouphase::train_step(net, batch, rng, params, cfg, opt),
                  std::runtime_error);
}

TEST_CASE("train records one loss per step and advances the counter") {
  const OuveParams params;
  TrainingConfig cfg;
  cfg.steps = 7;
  cfg.slice_frames = 12;
  cfg.seed = 11;
  const auto dataset = make_dataset(3, 16, 20, 400);

  SmallScoreNet net(2);
  const auto result = ouphase::train(net, dataset, cfg, params, /*start_step=*/5);
  CHECK(result.losses.size() == 7);
  CHECK(result.final_step == 12);
  for (double loss : result.losses) CHECK(std::isfinite(loss));
}

TEST_CASE("train is reproducible for a fixed seed") {
  const OuveParams params;
  TrainingConfig cfg;
  cfg.steps = 5;
  cfg.slice_frames = 10;
  cfg.seed = 21;
  const auto dataset = make_dataset(2, 12, 25, 500);

  SmallScoreNet net_a(3), net_b(3);
  const auto ra = ouphase::train(net_a, dataset, cfg, params);
  const auto rb = ouphase::train(net_b, dataset, cfg, params);
  CHECK(ra.losses == rb.losses);
  CHECK(net_a.serialize() == net_b.serialize());

  cfg.seed = 22;
  SmallScoreNet net_c(3);
  const auto rc = ouphase::train(net_c, dataset, cfg, params);
  CHECK(ra.losses != rc.losses);
}

TEST_CASE("items shorter than the slice are zero-padded") {
  const OuveParams params;
  TrainingConfig cfg;
  cfg.steps = 3;
  cfg.slice_frames = 40;  // wider than the 25-frame items
  cfg.seed = 31;
  const auto dataset = make_dataset(2, 12, 25, 600);
  SmallScoreNet net(4);
  CHECK_NOTHROW(ouphase::train(net, dataset, cfg, params));
}

TEST_CASE("train validates the dataset") {
  const OuveParams params;
  TrainingConfig cfg;
  SmallScoreNet net(5);
  CHECK_THROWS_AS(ouphase::train(net, {}, cfg, params), std::invalid_argument);

  auto ragged = make_dataset(2, 12, 25, 700);
  ragged.push_back(testutil::random_field(13, 25, 702));
  CHECK_THROWS_AS(ouphase::train(net, ragged, cfg, params), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip parameters, step, and config echo") {
  testutil::TempDir tmp;
  const auto path = tmp.file("model.ckpt");

  SmallScoreNet net(6);
  const std::map<std::string, std::string> echo = {{"seed", "42"}, {"n_steps", "30"}};
  ouphase::save_checkpoint(path, net, 1234, echo);

  const ouphase::Checkpoint loaded = ouphase::load_checkpoint(path);
  CHECK(loaded.step == 1234);
  CHECK(loaded.config_echo == echo);
  CHECK(loaded.net.serialize() == net.serialize());

  // The manifest sidecar is a readable text file with a versioned header.
  std::ifstream manifest(path.string() + ".manifest");
  REQUIRE(manifest.good());
  std::string first_line;
  std::getline(manifest, first_line);
  CHECK(first_line == "ouphase-checkpoint v1");
}

TEST_CASE("checkpoint loading rejects corrupt inputs") {
  testutil::TempDir tmp;
  const auto path = tmp.file("model.ckpt");
  SmallScoreNet net(7);
  ouphase::save_checkpoint(path, net, 10, {});

  CHECK_THROWS_AS(ouphase::load_checkpoint(tmp.file("absent.ckpt")),
                  std::runtime_error);

  // Truncate the parameter container.
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(ouphase::load_checkpoint(path), std::runtime_error);

  // Corrupt the manifest header.
  ouphase::save_checkpoint(path, net, 10, {});
  {
    std::ofstream manifest(path.string() + ".manifest", std::ios::trunc);
    manifest << "something else entirely\n";
  }
  CHECK_THROWS_AS(ouphase::load_checkpoint(path), std::runtime_error);
}

TEST_CASE("periodic checkpointing keeps the newest state on disk") {
  testutil::TempDir tmp;
  const auto path = tmp.file("model.ckpt");

  const OuveParams params;
  TrainingConfig cfg;
  cfg.steps = 5;
  cfg.slice_frames = 10;
  cfg.seed = 41;
  cfg.checkpoint_every = 2;
  cfg.checkpoint_path = path;
  const auto dataset = make_dataset(2, 12, 25, 800);

  SmallScoreNet net(8);
  ouphase::train(net, dataset, cfg, params);

  const ouphase::Checkpoint last = ouphase::load_checkpoint(path);
  CHECK(last.step == 5);  // the final save wins
  CHECK(last.net.serialize() == net.serialize());
}
