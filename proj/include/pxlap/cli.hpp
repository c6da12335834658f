#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pxlap/params.hpp"

namespace pxlap::cli {

enum class Command { Norm, Infconv, Solve, CheckWeak, CheckViscosity, Pipeline, Compare, Denoise };

Command parse_command(const std::string& name);
std::string command_name(Command c);
std::vector<std::string> command_names();

struct PresetSpec {
  std::string preset;
  Params params;
};

struct GridSpec {
  int dim = 1;
  int n = 65;
  double lo = 0.0;
  double hi = 1.0;
  std::optional<double> y_lo;
  std::optional<double> y_hi;
};

struct ExperimentConfig {
  Command command = Command::Solve;
  std::uint64_t seed = 1;
  GridSpec grid;
  PresetSpec exponent{"constant", {{"c", 2.0}}};
  PresetSpec source{"zero", {}};
  PresetSpec boundary{"constant", {{"c", 0.0}}};
  PresetSpec u{"solution", {}};
  PresetSpec v{"solution", {}};
  std::optional<PresetSpec> exact;

  // [solver]
  double tol = 1e-10;
  int max_iterations = 200000;
  double delta = 0.0;
  int max_outer = 200;
  double omega = 0.5;
  double outer_tol = 1e-10;
  // [growth]
  int growth_samples = 2000;
  double t_bound = 10.0;
  double eta_radius = 10.0;
  // [norm]
  double norm_tol = 1e-10;
  // [infconv]
  std::vector<double> infconv_epsilons{0.4, 0.2, 0.1, 0.05};
  std::optional<double> q;
  std::optional<double> infconv_tol;
  // [check]
  std::optional<double> check_tol;
  std::string kind = "super";
  int lattice = 3;
  // [pipeline]
  std::vector<double> pipeline_epsilons{0.2, 0.1, 0.05, 0.025};
  std::optional<double> pipeline_tol;
  // [compare]
  int boxes = 4;
  std::optional<double> compare_tol;
  // [denoise]
  std::string input;
  double beta = 1.0;
  double sigma = 1.5;
  double k = 100.0;
  double dt = 0.2;
  int steps = 100;
  bool dirichlet = false;
  std::string scheme = "semi-implicit";

  // Directory that relative paths in the config resolve against.
  std::filesystem::path base_dir = ".";
  // Every explicitly given key, as "section.key" -> value text.
  std::map<std::string, std::string> given;
};

// Flat key=value text with [section] headers; '#' starts a comment. Keys
// before the first header belong to the top level (command, seed).
// Throws ConfigError naming the line on syntax errors, unknown keys and
// failed validation.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Applies "section.key=value" overrides, then revalidates.
void apply_override(ExperimentConfig& config, const std::string& assignment);

// Precondition checks shared by the parser and the dispatcher.
void validate(const ExperimentConfig& config);

// Help text listing every section and key with its default.
std::string config_reference();

struct RunResult {
  int status = 0;  // 0 pass, 1 failed check
  std::vector<std::string> artifacts;
};

// Runs the experiment, writes artifacts and manifest.txt into outdir.
// Library errors propagate; the caller maps them to exit status 2.
RunResult run(const ExperimentConfig& config, const std::filesystem::path& outdir,
              std::ostream& log, const std::string& config_origin = "");

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace pxlap::cli
