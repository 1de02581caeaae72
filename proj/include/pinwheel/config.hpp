#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "pinwheel/completion.hpp"

namespace pw {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, std::string key, int line)
      : std::runtime_error(msg), key(std::move(key)), line(line) {}
  std::string key;  // "section.key", empty when not key-specific
  int line;         // 1-based, 0 when unknown
};

/// Sectioned key = value text. '#' starts a comment.
struct ConfigDocument {
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, int> lines;  // "section.key" -> line
};

ConfigDocument parse_config_document(const std::string& text);
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical text: fixed section and key order, doubles printed round-trip exact.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text, so independent of key order and formatting in the source file.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hex64(std::uint64_t v);

}  // namespace pw
