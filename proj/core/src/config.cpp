#include "ouphase/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ouphase {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" +
                                value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" +
                                value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: key '" + key + "' expects true/false, got '" +
                              value + "'");
}

}  // namespace

KeyValueMap parse_key_value_text(const std::string& text, const std::string& origin) {
  KeyValueMap map;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: " + origin + ":" + std::to_string(line_no) +
                                  ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config: " + origin + ":" + std::to_string(line_no) +
                                  ": empty key");
    }
    map[key] = value;
  }
  return map;
}

KeyValueMap parse_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_key_value_text(buffer.str(), path.filename().string());
}

void PipelineConfig::apply(const KeyValueMap& keys) {
  for (const auto& [key, value] : keys) {
    if (key == "sigma_min") {
      ouve.sigma_min = parse_double(key, value);
    } else if (key == "sigma_max") {
      ouve.sigma_max = parse_double(key, value);
    } else if (key == "gamma") {
      ouve.gamma = parse_double(key, value);
    } else if (key == "t_max") {
      ouve.t_max = parse_double(key, value);
    } else if (key == "t_eps") {
      ouve.t_eps = parse_double(key, value);
    } else if (key == "alpha") {
      compression.alpha = parse_double(key, value);
    } else if (key == "beta") {
      compression.beta = parse_double(key, value);
    } else if (key == "window_len") {
      stft.window_len = static_cast<int>(parse_int(key, value));
    } else if (key == "hop") {
      stft.hop = static_cast<int>(parse_int(key, value));
    } else if (key == "sample_rate") {
      stft.sample_rate = static_cast<int>(parse_int(key, value));
    } else if (key == "n_steps") {
      sampler.n_steps = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      sampler.seed = static_cast<std::uint64_t>(parse_int(key, value));
      training.seed = sampler.seed;
    } else if (key == "enforce_magnitude") {
      sampler.enforce_magnitude = parse_bool(key, value);
    } else if (key == "learning_rate") {
      training.learning_rate = parse_double(key, value);
    } else if (key == "train_steps") {
      training.steps = parse_int(key, value);
    } else if (key == "batch_size") {
      training.batch_size = static_cast<int>(parse_int(key, value));
    } else if (key == "slice_frames") {
      training.slice_frames = static_cast<int>(parse_int(key, value));
    } else if (key == "checkpoint_every") {
      training.checkpoint_every = parse_int(key, value);
    } else if (key == "gla_iterations") {
      gla_iterations = static_cast<int>(parse_int(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

void PipelineConfig::validate() const {
  ouve.validate();
  compression.validate();
  stft.validate();
  sampler.validate();
  training.validate();
  if (gla_iterations < 0) {
    throw std::invalid_argument("config: gla_iterations must be >= 0");
  }
}

KeyValueMap PipelineConfig::to_map() const {
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
  };
  KeyValueMap map;
  map["sigma_min"] = fmt(ouve.sigma_min);
  map["sigma_max"] = fmt(ouve.sigma_max);
  map["gamma"] = fmt(ouve.gamma);
  map["t_max"] = fmt(ouve.t_max);
  map["t_eps"] = fmt(ouve.t_eps);
  map["alpha"] = fmt(compression.alpha);
  map["beta"] = fmt(compression.beta);
  map["window_len"] = std::to_string(stft.window_len);
  map["hop"] = std::to_string(stft.hop);
  map["sample_rate"] = std::to_string(stft.sample_rate);
  map["n_steps"] = std::to_string(sampler.n_steps);
  map["seed"] = std::to_string(sampler.seed);
  map["enforce_magnitude"] = sampler.enforce_magnitude ? "true" : "false";
  map["learning_rate"] = fmt(training.learning_rate);
  map["train_steps"] = std::to_string(training.steps);
  map["batch_size"] = std::to_string(training.batch_size);
  map["slice_frames"] = std::to_string(training.slice_frames);
  map["checkpoint_every"] = std::to_string(training.checkpoint_every);
  map["gla_iterations"] = std::to_string(gla_iterations);
  return map;
}

}  // namespace ouphase
