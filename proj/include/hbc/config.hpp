#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hbc/counting.hpp"
#include "hbc/pipeline.hpp"
#include "hbc/presets.hpp"
#include "json.hpp"

namespace hbc {

using Preset = std::variant<LegPreset, GymPreset, CollabPreset>;

struct DataSource {
  std::vector<std::filesystem::path> sessions;  // explicit session CSVs
  std::optional<std::filesystem::path> dir;     // every *.csv inside
  std::optional<Preset> simulate;               // generate in memory
};

struct GridSpec {
  std::vector<int> n_trees{10, 20, 50, 100};
  std::vector<int> max_depth{5, 10, 15, 20};
};

struct PairwiseSpec {
  std::optional<std::filesystem::path> pairs;  // default: all pairs per group session
  MappingMode mode = MappingMode::kPairwise;
  bool hard_lift_drop = true;
};

// Whole run configuration. Every section is parsed and checked up front;
// unknown keys and bad values raise ConfigError naming the offending key.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "hbc-out";
  LabelSetId label_set = LabelSetId::kLeg7;
  DataSource data;
  FeaturizeConfig featurize;
  HarnessConfig harness;
  GridSpec grid;
  CountingConfig counting;
  PairwiseSpec pairwise;
  std::vector<std::filesystem::path> report_inputs;
  nlohmann::json raw;
  std::string hash;  // FNV-1a of the canonical config text
};

RunConfig parse_run_config(const nlohmann::json& j);
// Reads and parses; malformed JSON is a ConfigError with key "<json>".
RunConfig load_run_config(const std::filesystem::path& path);

// Sessions named or generated by the data section, in a stable order.
std::vector<Session> load_sessions(const RunConfig& cfg);

}  // namespace hbc
