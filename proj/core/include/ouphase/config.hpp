#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "ouphase/griffin_lim.hpp"
#include "ouphase/sampler.hpp"
#include "ouphase/sde.hpp"
#include "ouphase/stft.hpp"
#include "ouphase/training.hpp"
#include "ouphase/transforms.hpp"

namespace ouphase {

using KeyValueMap = std::map<std::string, std::string>;

/// Parses a line-based key=value document: '#' starts a comment, blank lines
/// are skipped, keys and values are whitespace-trimmed. Duplicate keys keep
/// the last occurrence. Throws std::invalid_argument on malformed lines.
KeyValueMap parse_key_value_file(const std::filesystem::path& path);
KeyValueMap parse_key_value_text(const std::string& text, const std::string& origin);

/// Flat configuration for the whole pipeline, mirroring the component
/// parameter structs with built-in defaults. Layers are applied in order
/// (defaults, then file, then explicit flags), so later keys win.
struct PipelineConfig {
  OuveParams ouve;
  CompressionParams compression;
  StftConfig stft;
  SamplerConfig sampler;
  TrainingConfig training;
  int gla_iterations = 200;

  /// Applies the given keys over the current values. Unknown keys and
  /// unparseable values throw std::invalid_argument.
  void apply(const KeyValueMap& keys);

  /// Validates every owned parameter struct (throws std::invalid_argument).
  void validate() const;

  /// Known keys and current values, for config echo in artifacts.
  KeyValueMap to_map() const;
};

}  // namespace ouphase
