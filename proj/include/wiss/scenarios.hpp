#pragma once

// Named end-to-end reproductions, system presets for ad-hoc runs, and the
// per-run artifact directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wiss/envelope.hpp"
#include "wiss/testers.hpp"

namespace wiss {

/// Overrides; unset fields take each scenario's defaults.
struct ScenarioParams {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> p;
  std::optional<Eigen::Index> truncation;
  std::uint64_t seed = 1;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
};

/// Catalog of the seven scenarios.
const std::vector<ScenarioInfo>& list();

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Whitespace-separated plot table.
struct DataTable {
  std::string name;  // file stem
  std::string caption;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ScenarioReport {
  std::string name;
  std::string summary;
  std::vector<std::string> settings;  // resolved parameters, one "key = value" each
  std::vector<PropertyVerdict> verdicts;
  std::vector<Assertion> assertions;
  Trajectory trajectory;
  std::string trajectory_label;
  std::optional<EnvelopeResult> envelope;
  std::string envelope_note;
  std::vector<DataTable> tables;
  std::vector<std::string> notes;

  bool passed() const;
};

/// Throws std::invalid_argument for unknown names.
ScenarioReport run(const std::string& name, const ScenarioParams& params = {});

/// A configured system with a default initial state, input and comparison data.
struct Preset {
  std::string name;
  SystemConfig cfg;
  State x0;
  Signal u;
  CompFn sigma;  // σ̲ in the stability bound
  Gain gain;     // gain used for envelopes and eventual bounds
  double p = 2.0;
  double dt = 0.01;
  double horizon = 10.0;
};

/// Systems: ex41, prop41, prop42, ex43, ex51, prop51.
const std::vector<std::string>& preset_names();
Preset make_preset(const std::string& system, const ScenarioParams& params = {});

// Ad-hoc runs behind the command line.
ScenarioReport run_simulate(const std::string& system, const ScenarioParams& params = {});
ScenarioReport run_envelope(const std::string& system, const ScenarioParams& params = {});
ScenarioReport run_falsify(const std::string& system, const ScenarioParams& params = {});
ScenarioReport run_axioms(const std::string& system, const ScenarioParams& params = {});

/// report.txt, trajectory.csv, envelope.csv, verdicts.csv and one .dat per table.
void write_artifacts(const ScenarioReport& report, const std::filesystem::path& dir);

}  // namespace wiss
