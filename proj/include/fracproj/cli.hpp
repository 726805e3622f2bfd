#pragma once

#include "fracproj/measure_zoo.hpp"
#include "fracproj/projection_scan.hpp"
#include "fracproj/tree_lifting.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fracproj::cli {

/// Invalid configuration, anchored at a line of the config text (0 if unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, int line, const std::string& what);
  int line() const noexcept { return line_; }
  const std::string& file() const noexcept { return file_; }
  /// "file:line: message"
  std::string located() const;

 private:
  std::string file_;
  int line_;
};

struct DimSettings {
  MeasureSpec measure;
  std::size_t depth = 15;
  std::size_t samples = 500;
};

struct ScanSettings {
  MeasureSpec measure;
  std::vector<double> slopes;
  bool axes = true;
  EstimatorConfig estimator;
  double epsilon = 0.05;
  std::optional<PartitionOperator> op;
};

struct ChainSettings {
  std::optional<MeasureSpec> measure;  // exact tree along BaseB
  std::optional<MeasureSpec> mu, nu;   // x2x3 chain along Rw
  std::optional<double> w0;
  std::size_t steps = 10000;
  std::size_t every = 1;
  std::vector<std::string> functionals;
  double slope = 1.0;
  int q = 8;
};

struct BcGridSettings {
  std::vector<double> t{0.30, 0.35, 0.40, 0.45, 0.50};
  double p = 0.5;
  std::vector<int> blocks{4, 8, 12};
  int atoms_extra = 8;
};

struct ConvolveSettings {
  MeasureSpec measure;
  int level = 10;
  int iterations = 2;
};

struct LiftSettings {
  CylinderMap map;
  std::string map_label;
  std::optional<MeasureSpec> measure;
  std::size_t depth = 8;
  std::size_t defect_from = 3;
};

using Settings = std::variant<DimSettings, ScanSettings, ChainSettings, BcGridSettings, ConvolveSettings, LiftSettings>;

struct ExperimentConfig {
  std::string file = "<config>";
  std::string text;
  nlohmann::json doc;
  std::string tag;
  std::uint64_t seed = 0;
  std::string output;
  unsigned workers = 0;
  Settings settings;
  std::vector<std::pair<std::string, std::string>> knobs;  // effective values, defaults included
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& file = "<config>");
ExperimentConfig load_config(const std::string& path);

/// A MeasureSpec from its tagged JSON record. `where` is a key path used for
/// line anchoring against `text`.
MeasureSpec parse_measure(const nlohmann::json& j, const std::string& text, const std::string& file,
                          std::vector<std::string> where);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunResult {
  Table table;
  nlohmann::json summary;
};

/// Fixed 6 significant digits.
std::string format_number(double v);

RunResult run_experiment(const ExperimentConfig& cfg);

/// Comment header, column line, rows.
std::string render_csv(const ExperimentConfig& cfg, const Table& table);

/// Writes the CSV and `<output>.manifest.json`.
void write_outputs(const ExperimentConfig& cfg, const RunResult& result, double wall_seconds);

/// (name, config text) for one full example per experiment tag.
std::vector<std::pair<std::string, std::string>> schema_examples();

std::string schema_text();

/// Exit codes: 0 ok, 2 config error, 3 runtime error.
int main_entry(int argc, char** argv);

}  // namespace fracproj::cli
