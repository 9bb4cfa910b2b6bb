#include "ouphase/training.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ouphase/spectrogram.hpp"

namespace ouphase {

void TrainingConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("training: learning rate must be finite and >= 0");
  }
  if (steps < 1) {
    throw std::invalid_argument("training: steps must be >= 1");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("training: batch size must be >= 1");
  }
  if (slice_frames < 1) {
    throw std::invalid_argument("training: slice_frames must be >= 1");
  }
  if (checkpoint_every < 0) {
    throw std::invalid_argument("training: checkpoint interval must be >= 0");
  }
}

double train_step(SmallScoreNet& net,
                  const std::vector<std::pair<ComplexField, ComplexField>>& batch,
                  Rng& rng, const OuveParams& params, const TrainingConfig& config,
                  SmallScoreNet::AdamState& optimizer) {
  config.validate();
  params.validate();
  if (batch.empty()) {
    throw std::invalid_argument("train_step: empty batch");
  }
  const Eigen::Index rows = batch.front().first.rows();
  const Eigen::Index cols = batch.front().first.cols();
  for (const auto& [x0, y] : batch) {
    if (x0.rows() != rows || x0.cols() != cols || y.rows() != rows || y.cols() != cols) {
      throw std::invalid_argument("train_step: batch shapes are not uniform");
    }
  }

  auto grads = net.make_gradients();
  std::uniform_real_distribution<double> t_dist(params.t_eps, params.t_max);
  double loss_sum = 0.0;
  for (const auto& [x0, y] : batch) {
    const double t = t_dist(rng);
    const ForwardSample draw = sample_forward(x0, y, t, params, rng);
    loss_sum += net.accumulate_gradients(draw.x_t, y, t, draw.z,
                                         std_dev(t, params), grads);
  }
  const double loss = loss_sum / static_cast<double>(batch.size());
  if (!std::isfinite(loss)) {
    throw std::runtime_error("train_step: non-finite loss (training diverged)");
  }
  // Mean-of-batch gradient: fold the 1/B into the moment accumulation.
  net.apply_adam(grads, optimizer, config.learning_rate,
                 1.0 / static_cast<double>(batch.size()));
  return loss;
}

namespace {

// Slice `frames` consecutive columns starting at `start`, zero-padding past
// the end (used both for short items and to honor a fixed slice width).
ComplexField slice_columns(const ComplexField& item, Eigen::Index start,
                           Eigen::Index frames) {
  ComplexField out = ComplexField::Zero(item.rows(), frames);
  const Eigen::Index avail = std::min(frames, item.cols() - start);
  if (avail > 0) {
    out.leftCols(avail) = item.middleCols(start, avail);
  }
  return out;
}

}  // namespace

TrainResult train(SmallScoreNet& net, const std::vector<ComplexField>& dataset,
                  const TrainingConfig& config, const OuveParams& params,
                  long start_step,
                  const std::map<std::string, std::string>& config_echo) {
  config.validate();
  params.validate();
  if (dataset.empty()) {
    throw std::invalid_argument("train: empty dataset");
  }
  const Eigen::Index rows = dataset.front().rows();
  for (const auto& item : dataset) {
    if (item.rows() != rows) {
      throw std::invalid_argument("train: dataset items must share the bin count");
    }
    if (item.size() == 0) {
      throw std::invalid_argument("train: empty dataset item");
    }
  }

  Rng rng(config.seed);
  SmallScoreNet::AdamState optimizer;
  TrainResult result;
  result.losses.reserve(static_cast<std::size_t>(config.steps));

  for (long s = 0; s < config.steps; ++s) {
    // Per batch element: item index, then slice offset; time and noise draws
    // follow inside train_step. This fixed order is the determinism contract.
    std::vector<std::pair<ComplexField, ComplexField>> batch;
    batch.reserve(static_cast<std::size_t>(config.batch_size));
    for (int b = 0; b < config.batch_size; ++b) {
      std::uniform_int_distribution<std::size_t> item_dist(0, dataset.size() - 1);
      const ComplexField& item = dataset[item_dist(rng)];
      Eigen::Index start = 0;
      if (item.cols() > config.slice_frames) {
        std::uniform_int_distribution<Eigen::Index> start_dist(
            0, item.cols() - config.slice_frames);
        start = start_dist(rng);
      }
      ComplexField x0 = slice_columns(item, start, config.slice_frames);
      ComplexField y = x0.abs().cast<std::complex<double>>();
      batch.emplace_back(std::move(x0), std::move(y));
    }

    result.losses.push_back(train_step(net, batch, rng, params, config, optimizer));
    result.final_step = start_step + s + 1;

    const bool last = s + 1 == config.steps;
    const bool periodic =
        config.checkpoint_every > 0 && (s + 1) % config.checkpoint_every == 0;
    if (!config.checkpoint_path.empty() && (periodic || last)) {
      save_checkpoint(config.checkpoint_path, net, result.final_step, config_echo);
    }
  }
  return result;
}

namespace {
constexpr const char* kManifestHeader = "ouphase-checkpoint v1";
}

void save_checkpoint(const std::filesystem::path& path, const SmallScoreNet& net,
                     long step, const std::map<std::string, std::string>& config_echo) {
  const std::vector<double> params = net.serialize();

  ComplexSpectrogram container;
  container.values.resize(1, static_cast<Eigen::Index>(params.size()));
  for (Eigen::Index i = 0; i < container.values.cols(); ++i) {
    container.values(0, i) = std::complex<double>(params[static_cast<std::size_t>(i)], 0.0);
  }
  save_spec(path, container);

  std::ofstream manifest(path.string() + ".manifest", std::ios::trunc);
  if (!manifest) {
    throw std::runtime_error("checkpoint: cannot write manifest for " + path.string());
  }
  manifest << kManifestHeader << "\n";
  manifest << "step = " << step << "\n";
  manifest << "parameters = " << params.size() << "\n";
  for (const auto& [name, shape] : net.tensor_shapes()) {
    manifest << "tensor " << name << " " << shape[0] << " " << shape[1] << "\n";
  }
  for (const auto& [key, value] : config_echo) {
    manifest << "config " << key << " = " << value << "\n";
  }
  if (!manifest) {
    throw std::runtime_error("checkpoint: manifest write failed for " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Checkpoint ckpt;

  std::ifstream manifest(path.string() + ".manifest");
  if (!manifest) {
    throw std::runtime_error("checkpoint: missing manifest " + path.string() + ".manifest");
  }
  std::string line;
  if (!std::getline(manifest, line) || line != kManifestHeader) {
    throw std::runtime_error("checkpoint: unrecognized manifest header");
  }

  std::size_t declared_params = 0;
  auto expected_shapes = ckpt.net.tensor_shapes();
  std::size_t tensor_idx = 0;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "step") {
      std::string eq;
      ss >> eq >> ckpt.step;
    } else if (kind == "parameters") {
      std::string eq;
      ss >> eq >> declared_params;
    } else if (kind == "tensor") {
      std::string name;
      Eigen::Index r = 0, c = 0;
      ss >> name >> r >> c;
      if (tensor_idx >= expected_shapes.size() ||
          expected_shapes[tensor_idx].first != name ||
          expected_shapes[tensor_idx].second[0] != r ||
          expected_shapes[tensor_idx].second[1] != c) {
        throw std::runtime_error("checkpoint: tensor layout mismatch at '" + name +
                                 "' (incompatible architecture)");
      }
      ++tensor_idx;
    } else if (kind == "config") {
      std::string key, eq, value;
      ss >> key >> eq;
      std::getline(ss, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ckpt.config_echo[key] = value;
    } else {
      throw std::runtime_error("checkpoint: unrecognized manifest line: " + line);
    }
  }
  if (tensor_idx != expected_shapes.size()) {
    throw std::runtime_error("checkpoint: manifest lists too few tensors");
  }

  const ComplexSpectrogram container = load_spec(path);
  if (container.values.rows() != 1 ||
      static_cast<std::size_t>(container.values.cols()) != ckpt.net.parameter_count() ||
      declared_params != ckpt.net.parameter_count()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  std::vector<double> params(static_cast<std::size_t>(container.values.cols()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = container.values(0, static_cast<Eigen::Index>(i)).real();
  }
  ckpt.net.deserialize(params);
  return ckpt;
}

}  // namespace ouphase
