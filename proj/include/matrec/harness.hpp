#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "matrec/identifiability.hpp"
#include "matrec/recovery.hpp"

namespace matrec {

enum class TestKind { LocalRank, AeRecovery, Everywhere };

const char* to_string(TestKind t);
TestKind test_kind_from_string(const std::string& s);

/// A recovered variety paired with a measurement-ensemble family. Thresholds
/// are always recomputed from the dimension formulas, never stored.
struct Scenario {
  VarietySpec recovered;
  EnsembleKindSpec ensemble;

  Field counting() const { return counting_field(recovered); }
  int dim() const { return variety_dim(recovered); }
  int ae_threshold() const { return variety_dim(recovered) + 1; }
  std::optional<int> everywhere_threshold() const;

  /// Concrete ensemble spec for one trial; shape and field come from the
  /// recovered variety.
  EnsembleSpec ensemble_spec(int n, std::uint64_t seed) const;
};

/// Throws unless the ensemble kind can measure the recovered variety
/// (matching shape/field; rank-one readouts need symmetric/Hermitian targets).
void validate(const Scenario& scenario);

struct SweepConfig {
  Scenario scenario;
  int n_lo = 0;
  int n_hi = 0;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::vector<TestKind> tests;
  SolveConfig solve;
  int workers = 1;
};

void validate(const SweepConfig& cfg);
SweepConfig sweep_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SweepConfig& cfg);

struct TrialRow {
  int n = 0;
  TestKind test = TestKind::LocalRank;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double detail = 0.0;  // fiber dim / best residual; -1 flags a recorded error
};

struct RateSummary {
  int n = 0;
  TestKind test = TestKind::LocalRank;
  int successes = 0;
  int trials = 0;
  double rate = 0.0;
};

struct SweepResult {
  SweepConfig config;
  std::vector<TrialRow> rows;        // ordered by (N, test, trial)
  std::vector<RateSummary> summaries;
};

/// One (N, trial) cell: derives the trial seed from (base_seed, N, trial),
/// generates the ensemble and a planted point, and runs the requested tests.
/// Module errors are recorded as failed rows with detail -1, never thrown.
std::vector<TrialRow> run_trial(const Scenario& scenario, int n, int trial_index,
                                std::uint64_t base_seed, const std::vector<TestKind>& tests,
                                const SolveConfig& solve_cfg);

/// All cells of the config. The result is independent of worker count and
/// execution order.
SweepResult run_sweep(const SweepConfig& cfg);

/// Smallest N whose success rate is >= 0.5 with every larger sampled N also
/// >= 0.5; empty when no such N exists.
std::optional<int> estimate_transition(const SweepResult& result, TestKind test);

/// Threshold column for report overlays: the first N at which the test is
/// expected to succeed (dim for LocalRank, dim+1 for AeRecovery,
/// dim(delta M) for Everywhere).
std::optional<int> theoretical_threshold(const Scenario& scenario, TestKind test);

std::string to_csv(const SweepResult& result);
nlohmann::ordered_json summary_to_json(const SweepResult& result);

/// Rebuilds config and rate summaries from a summary JSON document (rows are
/// not persisted there); enough for report generation.
SweepResult summary_from_json(const nlohmann::json& j);
std::string rate_curve(const SweepResult& result, TestKind test, bool with_threshold);

/// Writes via a temp file in the same directory followed by an atomic rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace matrec
