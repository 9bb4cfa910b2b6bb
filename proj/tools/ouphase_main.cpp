// Command-line front end: phase retrieval via the reverse diffusion sampler,
// score-network training, the Griffin-Lim baseline, a 1-D process demo,
// benchmarking, and metric evaluation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ouphase/config.hpp"
#include "ouphase/griffin_lim.hpp"
#include "ouphase/metrics.hpp"
#include "ouphase/sampler.hpp"
#include "ouphase/score.hpp"
#include "ouphase/score_net.hpp"
#include "ouphase/sde.hpp"
#include "ouphase/spectrogram.hpp"
#include "ouphase/stft.hpp"
#include "ouphase/synth.hpp"
#include "ouphase/training.hpp"
#include "ouphase/transforms.hpp"
#include "ouphase/wave.hpp"

namespace {

using namespace ouphase;

// ---------------------------------------------------------------------------
// Shared flags and config layering: flag > config file > built-in default.

struct SharedOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  int steps = 0;
  double sigma_min = 0, sigma_max = 0, gamma = 0, t_eps = 0, alpha = 0, beta = 0;
  int window = 0, hop = 0;

  CLI::Option *o_seed = nullptr, *o_steps = nullptr, *o_sigma_min = nullptr,
              *o_sigma_max = nullptr, *o_gamma = nullptr, *o_t_eps = nullptr,
              *o_alpha = nullptr, *o_beta = nullptr, *o_window = nullptr,
              *o_hop = nullptr;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    o_seed = cmd->add_option("--seed", seed, "RNG seed");
    o_steps = cmd->add_option("--steps", steps, "reverse-SDE step count N");
    o_sigma_min = cmd->add_option("--sigma-min", sigma_min, "noise scale at t=0");
    o_sigma_max = cmd->add_option("--sigma-max", sigma_max, "noise scale at t=1");
    o_gamma = cmd->add_option("--gamma", gamma, "mean-reversion stiffness");
    o_t_eps = cmd->add_option("--t-eps", t_eps, "reverse-time truncation");
    o_alpha = cmd->add_option("--alpha", alpha, "compression exponent");
    o_beta = cmd->add_option("--beta", beta, "compression scale");
    o_window = cmd->add_option("--window", window, "analysis window length (samples)");
    o_hop = cmd->add_option("--hop", hop, "hop size (samples)");
  }

  // Applies the three config layers and validates the result. `file_keys`
  // optionally receives the keys the config file set (for per-command
  // defaults that should not shadow explicit configuration).
  PipelineConfig resolve(KeyValueMap* file_keys = nullptr) const {
    PipelineConfig cfg;
    if (!config_path.empty()) {
      const KeyValueMap file = parse_key_value_file(config_path);
      cfg.apply(file);
      if (file_keys) *file_keys = file;
    }
    if (*o_seed) {
      cfg.sampler.seed = seed;
      cfg.training.seed = seed;
    }
    if (*o_steps) cfg.sampler.n_steps = steps;
    if (*o_sigma_min) cfg.ouve.sigma_min = sigma_min;
    if (*o_sigma_max) cfg.ouve.sigma_max = sigma_max;
    if (*o_gamma) cfg.ouve.gamma = gamma;
    if (*o_t_eps) cfg.ouve.t_eps = t_eps;
    if (*o_alpha) cfg.compression.alpha = alpha;
    if (*o_beta) cfg.compression.beta = beta;
    if (*o_window) cfg.stft.window_len = window;
    if (*o_hop) cfg.stft.hop = hop;
    cfg.validate();
    return cfg;
  }
};

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---------------------------------------------------------------------------
// Input handling: WAV files carry a reference waveform; ".spec" containers
// carry only a magnitude (no reference metrics possible).

struct LoadedInput {
  RealField magnitude;
  std::optional<Waveform> reference;
  Eigen::Index target_len = 0;
};

LoadedInput load_input(const std::string& path, const StftEngine& engine) {
  LoadedInput in;
  if (has_suffix(path, ".spec")) {
    const ComplexSpectrogram spec = load_spec(path);
    if (spec.bins() != engine.config().bins()) {
      throw std::invalid_argument("input spectrogram has " + std::to_string(spec.bins()) +
                                  " bins but the configuration expects " +
                                  std::to_string(engine.config().bins()));
    }
    in.magnitude = spec.values.abs();
    in.target_len = spec.frames() * engine.config().hop - 1;
  } else {
    Waveform wave = read_wav(path);
    const ComplexSpectrogram spec = engine.stft(wave);
    in.magnitude = spec.values.abs();
    in.target_len = static_cast<Eigen::Index>(wave.samples.size());
    in.reference = std::move(wave);
  }
  return in;
}

EvalReport evaluate_estimate(const RealField& reference_magnitude,
                             const Waveform& estimate,
                             const std::optional<Waveform>& reference,
                             const StftEngine& engine, double wall_time_s) {
  EvalReport report;
  const ComplexSpectrogram est_spec = engine.stft(estimate);
  report.spectral_convergence = spectral_convergence(reference_magnitude, est_spec.values);
  report.consistency_residual = consistency_residual(est_spec, engine);
  report.si_snr_db = reference ? si_snr(*reference, estimate) : std::nan("");
  report.wall_time_s = wall_time_s;
  report.rtf = estimate.duration_s() > 0 ? wall_time_s / estimate.duration_s() : 0.0;
  return report;
}

void append_report_row(const std::string& path, double length_s, const EvalReport& r) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw std::runtime_error("report: cannot open " + path);
  }
  if (fresh) {
    out << "length_s,mean_time_s,rtf,spectral_convergence,consistency_residual,si_snr_db\n";
  }
  out.precision(12);
  out << length_s << ',' << r.wall_time_s << ',' << r.rtf << ','
      << r.spectral_convergence << ',' << r.consistency_residual << ','
      << r.si_snr_db << '\n';
}

void print_report(const EvalReport& r) {
  std::cout.precision(6);
  std::cout << "spectral_convergence = " << r.spectral_convergence << "\n"
            << "consistency_residual = " << r.consistency_residual << "\n"
            << "si_snr_db = " << r.si_snr_db << "\n"
            << "wall_time_s = " << r.wall_time_s << "\n"
            << "rtf = " << r.rtf << "\n";
}

std::shared_ptr<const SmallScoreNet> load_net(const std::string& checkpoint) {
  if (!std::filesystem::exists(checkpoint)) {
    throw std::invalid_argument("checkpoint not found: " + checkpoint);
  }
  Checkpoint ckpt = load_checkpoint(checkpoint);
  return std::make_shared<const SmallScoreNet>(std::move(ckpt.net));
}

// ---------------------------------------------------------------------------
// retrieve

struct RetrieveArgs {
  SharedOpts shared;
  std::string input, output = "retrieved.wav", checkpoint, report;
  bool oracle = false;
  bool no_enforce = false;
};

int cmd_retrieve(const RetrieveArgs& args) {
  PipelineConfig cfg = args.shared.resolve();
  if (args.no_enforce) cfg.sampler.enforce_magnitude = false;
  if (args.oracle == !args.checkpoint.empty()) {
    // both set or neither set
    throw std::invalid_argument("retrieve: pass exactly one of --oracle or --checkpoint");
  }

  const StftEngine engine(cfg.stft);
  const LoadedInput in = load_input(args.input, engine);

  std::unique_ptr<ScoreEstimator> score;
  std::shared_ptr<const SmallScoreNet> net;  // owns network for NetScore
  if (args.oracle) {
    if (!in.reference) {
      throw std::invalid_argument(
          "retrieve: --oracle needs a WAV input (the reference signal)");
    }
    const ComplexSpectrogram ref_spec = engine.stft(*in.reference);
    score = std::make_unique<AnalyticScore>(compress(ref_spec.values, cfg.compression),
                                            cfg.ouve);
  } else {
    net = load_net(args.checkpoint);
    score = std::make_unique<NetScore>(net, cfg.ouve);
  }

  const RetrievalResult result =
      retrieve_phase(in.magnitude, *score, cfg.sampler, cfg.ouve, cfg.compression,
                     engine, in.target_len);
  write_wav(args.output, result.waveform);

  const EvalReport report = evaluate_estimate(in.magnitude, result.waveform,
                                              in.reference, engine,
                                              result.diagnostics.wall_time_s);
  print_report(report);
  if (!args.report.empty()) {
    if (in.reference) {
      append_report_row(args.report, result.waveform.duration_s(), report);
    } else {
      std::cerr << "retrieve: no reference available; report row not written\n";
    }
  }
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  SharedOpts shared;
  std::string corpus_dir, output = "score_net.ckpt", trace, resume;
  double learning_rate = 0;
  long train_steps = 0;
  int batch_size = 0, slice_frames = 0;
  long checkpoint_every = 0;
  CLI::Option *o_lr = nullptr, *o_steps = nullptr, *o_batch = nullptr,
              *o_slice = nullptr, *o_every = nullptr;
};

int cmd_train(const TrainArgs& args) {
  PipelineConfig cfg = args.shared.resolve();
  if (*args.o_lr) cfg.training.learning_rate = args.learning_rate;
  if (*args.o_steps) cfg.training.steps = args.train_steps;
  if (*args.o_batch) cfg.training.batch_size = args.batch_size;
  if (*args.o_slice) cfg.training.slice_frames = args.slice_frames;
  if (*args.o_every) cfg.training.checkpoint_every = args.checkpoint_every;
  cfg.training.checkpoint_path = args.output;
  cfg.validate();

  // Corpus: every .wav in the directory, sorted for determinism.
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(args.corpus_dir)) {
    throw std::invalid_argument("train: not a directory: " + args.corpus_dir);
  }
  for (const auto& entry : std::filesystem::directory_iterator(args.corpus_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::invalid_argument("train: no .wav files in " + args.corpus_dir);
  }

  const StftEngine engine(cfg.stft);
  std::vector<ComplexField> dataset;
  dataset.reserve(files.size());
  for (const auto& file : files) {
    const Waveform wave = read_wav(file);
    dataset.push_back(compress(engine.stft(wave).values, cfg.compression));
  }
  std::cerr << "loaded " << dataset.size() << " corpus items\n";

  SmallScoreNet net(cfg.training.seed);
  long start_step = 0;
  if (!args.resume.empty()) {
    Checkpoint ckpt = load_checkpoint(args.resume);
    net = std::move(ckpt.net);
    start_step = ckpt.step;
    std::cerr << "resuming from step " << start_step << "\n";
  }

  const TrainResult result =
      train(net, dataset, cfg.training, cfg.ouve, start_step, cfg.to_map());

  const std::string trace_path =
      args.trace.empty() ? args.output + ".loss.csv" : args.trace;
  std::ofstream trace(trace_path, std::ios::trunc);
  if (!trace) {
    throw std::runtime_error("train: cannot write " + trace_path);
  }
  trace << "step,loss\n";
  trace.precision(12);
  for (std::size_t i = 0; i < result.losses.size(); ++i) {
    trace << (start_step + static_cast<long>(i) + 1) << ',' << result.losses[i] << '\n';
  }

  std::cout << "trained to step " << result.final_step << "; checkpoint " << args.output
            << "; loss trace " << trace_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gla

struct GlaArgs {
  SharedOpts shared;
  std::string input, output = "gla.wav", report, trace;
  int iterations = 0;
  CLI::Option* o_iters = nullptr;
};

int cmd_gla(const GlaArgs& args) {
  PipelineConfig cfg = args.shared.resolve();
  if (*args.o_iters) cfg.gla_iterations = args.iterations;
  cfg.validate();

  const StftEngine engine(cfg.stft);
  const LoadedInput in = load_input(args.input, engine);

  GlaConfig gla_cfg;
  gla_cfg.iterations = cfg.gla_iterations;
  const auto start = std::chrono::steady_clock::now();
  const GlaResult result = gla(in.magnitude, gla_cfg, engine);
  const Waveform estimate = engine.istft(result.spectrogram, in.target_len);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_wav(args.output, estimate);
  const EvalReport report =
      evaluate_estimate(in.magnitude, estimate, in.reference, engine, wall);
  print_report(report);
  if (!args.report.empty() && in.reference) {
    append_report_row(args.report, estimate.duration_s(), report);
  }
  if (!args.trace.empty()) {
    std::ofstream trace(args.trace, std::ios::trunc);
    trace << "iteration,residual\n";
    trace.precision(12);
    for (std::size_t k = 0; k < result.residual_trace.size(); ++k) {
      trace << k << ',' << result.residual_trace[k] << '\n';
    }
  }
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate-1d

struct SimArgs {
  SharedOpts shared;
  double x0 = 0.02, y = 0.0;
  int trajectories = 1000;
  std::string out_traj = "trajectories.csv", out_hist = "histogram.csv";
  int hist_bins = 60;
};

int cmd_simulate(const SimArgs& args) {
  KeyValueMap file_keys;
  PipelineConfig cfg = args.shared.resolve(&file_keys);
  // This command defaults to a finer grid than retrieval; an explicit
  // --steps or config-file n_steps still wins.
  int n = cfg.sampler.n_steps;
  if (!*args.shared.o_steps && !file_keys.count("n_steps")) {
    n = 200;
  }
  if (args.trajectories < 1) {
    throw std::invalid_argument("simulate-1d: trajectories must be >= 1");
  }
  if (n < 1) {
    throw std::invalid_argument("simulate-1d: N must be >= 1");
  }

  const ScalarSimResult sim = simulate_scalar_reverse(
      args.x0, args.y, args.trajectories, n, cfg.sampler.seed, cfg.ouve);

  {
    std::ofstream out(args.out_traj, std::ios::trunc);
    if (!out) throw std::runtime_error("simulate-1d: cannot write " + args.out_traj);
    out << "t,trajectory,x\n";
    out.precision(12);
    for (Eigen::Index traj = 0; traj < sim.states.rows(); ++traj) {
      for (Eigen::Index i = 0; i < sim.t_grid.size(); ++i) {
        out << sim.t_grid[i] << ',' << traj << ',' << sim.states(traj, i) << '\n';
      }
    }
  }

  {
    const double lo = sim.states.minCoeff();
    const double hi = sim.states.maxCoeff();
    const double width = (hi > lo) ? (hi - lo) / args.hist_bins : 1.0;
    std::ofstream out(args.out_hist, std::ios::trunc);
    if (!out) throw std::runtime_error("simulate-1d: cannot write " + args.out_hist);
    out << "t,x_center,count\n";
    out.precision(12);
    for (Eigen::Index i = 0; i < sim.t_grid.size(); ++i) {
      std::vector<long> counts(static_cast<std::size_t>(args.hist_bins), 0);
      for (Eigen::Index traj = 0; traj < sim.states.rows(); ++traj) {
        int bin = static_cast<int>((sim.states(traj, i) - lo) / width);
        bin = std::clamp(bin, 0, args.hist_bins - 1);
        ++counts[static_cast<std::size_t>(bin)];
      }
      for (int b = 0; b < args.hist_bins; ++b) {
        out << sim.t_grid[i] << ',' << lo + (b + 0.5) * width << ','
            << counts[static_cast<std::size_t>(b)] << '\n';
      }
    }
  }

  // Terminal concentration summary (the quantitative side of the figure).
  const auto terminal = sim.states.col(sim.states.cols() - 1);
  const double mean = terminal.mean();
  const double sd = std::sqrt((terminal - mean).square().sum() /
                              std::max<Eigen::Index>(1, terminal.size() - 1));
  const double se = sd / std::sqrt(static_cast<double>(terminal.size()));
  std::cout.precision(6);
  std::cout << "trajectories = " << args.trajectories << ", steps = " << n << "\n"
            << "terminal mean = " << mean << " (x0 = " << args.x0 << ", |dev| = "
            << std::abs(mean - args.x0) << ", 3*SE = " << 3.0 * se << ")\n"
            << "terminal sd = " << sd << " (sigma(t_eps) = "
            << std_dev(cfg.ouve.t_eps, cfg.ouve) << ")\n"
            << "wrote " << args.out_traj << " and " << args.out_hist << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchArgs {
  SharedOpts shared;
  std::vector<double> lengths{1.0, 2.0, 4.0};
  std::vector<int> n_values{10, 20, 50, 100};
  int repetitions = 3;
  std::string output = "benchmark.csv", checkpoint;
  std::vector<std::string> methods;
};

int cmd_benchmark(const BenchArgs& args) {
  PipelineConfig cfg = args.shared.resolve();
  if (args.repetitions < 1) {
    throw std::invalid_argument("benchmark: repetitions must be >= 1");
  }

  std::vector<std::string> methods = args.methods;
  if (methods.empty()) {
    methods = {"diffusion-oracle", "gla"};
    if (!args.checkpoint.empty()) methods.push_back("diffusion-checkpoint");
  }

  const StftEngine engine(cfg.stft);

  // Precompute inputs per length outside the timed region.
  struct Item {
    RealField magnitude;
    ComplexField x0_compressed;
    Eigen::Index target_len = 0;
  };
  std::map<double, Item> items;
  Rng rng(cfg.sampler.seed);
  for (double length : args.lengths) {
    if (!(length > 0.0)) {
      throw std::invalid_argument("benchmark: lengths must be positive");
    }
    const Waveform wave = make_sinusoid_mixture(length, cfg.stft.sample_rate, 6, rng);
    Item item;
    const ComplexSpectrogram spec = engine.stft(wave);
    item.magnitude = spec.values.abs();
    item.x0_compressed = compress(spec.values, cfg.compression);
    item.target_len = static_cast<Eigen::Index>(wave.samples.size());
    items.emplace(length, std::move(item));
  }

  std::shared_ptr<const SmallScoreNet> net;
  if (std::find(methods.begin(), methods.end(), "diffusion-checkpoint") != methods.end()) {
    if (args.checkpoint.empty()) {
      throw std::invalid_argument("benchmark: diffusion-checkpoint needs --checkpoint");
    }
    net = load_net(args.checkpoint);
  }

  std::ofstream out(args.output, std::ios::trunc);
  if (!out) throw std::runtime_error("benchmark: cannot write " + args.output);
  out << "method,length_s,n_steps,mean_time_s,rtf\n";
  out.precision(12);

  for (const std::string& method : methods) {
    // GLA has no N dependence; its row uses the iteration count instead.
    const std::vector<int> sweep =
        method == "gla" ? std::vector<int>{cfg.gla_iterations} : args.n_values;
    for (int n : sweep) {
      auto runner = [&](double length) {
        const Item& item = items.at(length);
        if (method == "gla") {
          GlaConfig gla_cfg;
          gla_cfg.iterations = n;
          const GlaResult r = gla(item.magnitude, gla_cfg, engine);
          (void)engine.istft(r.spectrogram, item.target_len);
          return;
        }
        SamplerConfig sampler_cfg = cfg.sampler;
        sampler_cfg.n_steps = n;
        std::unique_ptr<ScoreEstimator> score;
        if (method == "diffusion-oracle") {
          score = std::make_unique<AnalyticScore>(item.x0_compressed, cfg.ouve);
        } else if (method == "diffusion-checkpoint") {
          score = std::make_unique<NetScore>(net, cfg.ouve);
        } else {
          throw std::invalid_argument("benchmark: unknown method '" + method + "'");
        }
        (void)retrieve_phase(item.magnitude, *score, sampler_cfg, cfg.ouve,
                             cfg.compression, engine, item.target_len);
      };

      const std::vector<BenchmarkRow> rows =
          benchmark(runner, args.lengths, args.repetitions);
      for (const BenchmarkRow& row : rows) {
        out << method << ',' << row.length_s << ',' << n << ',' << row.mean_time_s
            << ',' << row.rtf << '\n';
      }
      std::cerr << method << " N=" << n << " done\n";
    }
  }
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  SharedOpts shared;
  std::string reference, estimate, report;
};

int cmd_eval(const EvalArgs& args) {
  PipelineConfig cfg = args.shared.resolve();
  const StftEngine engine(cfg.stft);

  const Waveform ref = read_wav(args.reference);
  const Waveform est = read_wav(args.estimate);
  const RealField ref_mag = engine.stft(ref).values.abs();

  const EvalReport report = evaluate_estimate(ref_mag, est, ref, engine, 0.0);
  print_report(report);
  if (!args.report.empty()) {
    append_report_row(args.report, est.duration_s(), report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STFT phase retrieval by reverse diffusion of a mean-reverting "
               "exploding-noise process, with analytic and learned scores"};
  app.require_subcommand(1);

  RetrieveArgs retrieve_args;
  CLI::App* retrieve = app.add_subcommand(
      "retrieve", "reconstruct phase for a magnitude spectrogram or WAV");
  retrieve->add_option("input", retrieve_args.input, "input WAV or .spec container")
      ->required();
  retrieve->add_option("-o,--output", retrieve_args.output, "output WAV path");
  retrieve->add_option("--checkpoint", retrieve_args.checkpoint, "trained score network");
  retrieve->add_flag("--oracle", retrieve_args.oracle,
                     "use the analytic score built from the input WAV itself");
  retrieve->add_option("--report", retrieve_args.report, "append metrics CSV here");
  retrieve->add_flag("--no-enforce", retrieve_args.no_enforce,
                     "skip final magnitude enforcement");
  retrieve_args.shared.add_to(retrieve);

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train the score network on a WAV corpus");
  train_cmd->add_option("corpus", train_args.corpus_dir, "directory of .wav files")
      ->required();
  train_cmd->add_option("-o,--output", train_args.output, "checkpoint path");
  train_cmd->add_option("--trace", train_args.trace, "loss trace CSV (default <output>.loss.csv)");
  train_cmd->add_option("--resume", train_args.resume, "checkpoint to resume from");
  train_args.o_lr = train_cmd->add_option("--learning-rate", train_args.learning_rate,
                                          "SGD learning rate");
  train_args.o_steps = train_cmd->add_option("--train-steps", train_args.train_steps,
                                             "number of training steps");
  train_args.o_batch = train_cmd->add_option("--batch-size", train_args.batch_size,
                                             "slices per step");
  train_args.o_slice = train_cmd->add_option("--slice-frames", train_args.slice_frames,
                                             "frames per training slice");
  train_args.o_every = train_cmd->add_option("--checkpoint-every", train_args.checkpoint_every,
                                             "periodic checkpoint interval (steps)");
  train_args.shared.add_to(train_cmd);

  GlaArgs gla_args;
  CLI::App* gla_cmd = app.add_subcommand("gla", "alternating-projection baseline");
  gla_cmd->add_option("input", gla_args.input, "input WAV or .spec container")->required();
  gla_cmd->add_option("-o,--output", gla_args.output, "output WAV path");
  gla_args.o_iters = gla_cmd->add_option("--iterations", gla_args.iterations,
                                         "projection iterations");
  gla_cmd->add_option("--report", gla_args.report, "append metrics CSV here");
  gla_cmd->add_option("--trace", gla_args.trace, "residual trace CSV");
  gla_args.shared.add_to(gla_cmd);

  SimArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate-1d", "1-D reverse-process demo with the analytic score");
  sim_cmd->add_option("--x0", sim_args.x0, "target value");
  sim_cmd->add_option("--y", sim_args.y, "conditioner value");
  sim_cmd->add_option("--trajectories", sim_args.trajectories, "ensemble size");
  sim_cmd->add_option("--out-trajectories", sim_args.out_traj, "per-step states CSV");
  sim_cmd->add_option("--out-histogram", sim_args.out_hist, "binned (t, x) histogram CSV");
  sim_cmd->add_option("--hist-bins", sim_args.hist_bins, "histogram bins");
  sim_args.shared.add_to(sim_cmd);

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "runtime sweep over lengths and N");
  bench_cmd->add_option("--lengths", bench_args.lengths, "input lengths in seconds");
  bench_cmd->add_option("--n-values", bench_args.n_values, "reverse-SDE step counts");
  bench_cmd->add_option("--repetitions", bench_args.repetitions, "timed repetitions");
  bench_cmd->add_option("-o,--output", bench_args.output, "output CSV");
  bench_cmd->add_option("--checkpoint", bench_args.checkpoint,
                        "score checkpoint for diffusion-checkpoint");
  bench_cmd->add_option("--methods", bench_args.methods,
                        "subset of {diffusion-oracle, diffusion-checkpoint, gla}");
  bench_args.shared.add_to(bench_cmd);

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "metrics for an estimate against a reference");
  eval_cmd->add_option("--reference", eval_args.reference, "reference WAV")->required();
  eval_cmd->add_option("--estimate", eval_args.estimate, "estimate WAV")->required();
  eval_cmd->add_option("--report", eval_args.report, "append metrics CSV here");
  eval_args.shared.add_to(eval_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (retrieve->parsed()) return cmd_retrieve(retrieve_args);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (gla_cmd->parsed()) return cmd_gla(gla_args);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args);
    if (bench_cmd->parsed()) return cmd_benchmark(bench_args);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
