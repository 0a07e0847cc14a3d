#include "matrec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace matrec {

const char* to_string(TestKind t) {
  switch (t) {
    case TestKind::LocalRank: return "local_rank";
    case TestKind::AeRecovery: return "ae_recovery";
    case TestKind::Everywhere: return "everywhere";
  }
  return "?";
}

TestKind test_kind_from_string(const std::string& s) {
  if (s == "local_rank") return TestKind::LocalRank;
  if (s == "ae_recovery") return TestKind::AeRecovery;
  if (s == "everywhere") return TestKind::Everywhere;
  throw std::invalid_argument("unknown test kind '" + s + "'");
}

std::optional<int> Scenario::everywhere_threshold() const {
  try {
    return variety_dim(delta_spec(recovered));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

EnsembleSpec Scenario::ensemble_spec(int n, std::uint64_t seed) const {
  EnsembleSpec e;
  e.kind = ensemble.kind;
  e.N = n;
  e.p = recovered.p;
  e.q = recovered.q;
  e.s = ensemble.s;
  e.seed = seed;
  switch (ensemble.kind) {
    case EnsembleKind::Gaussian:
    case EnsembleKind::LowRankMeas:
      e.field = recovered.field;
      break;
    case EnsembleKind::OrthogonalMeas:
    case EnsembleKind::ProjectionMeas:
    case EnsembleKind::RankOneSym:
      e.field = Field::Real;
      break;
    case EnsembleKind::RankOneHerm:
      e.field = Field::Complex;
      break;
  }
  return e;
}

void validate(const Scenario& sc) {
  validate(sc.recovered);
  if (sc.recovered.kind != VarietyKind::LowRank && sc.recovered.kind != VarietyKind::Symmetric &&
      sc.recovered.kind != VarietyKind::Hermitian)
    throw std::invalid_argument("Scenario: recovered variety must be a bounded-rank kind");
  switch (sc.ensemble.kind) {
    case EnsembleKind::RankOneSym:
      if (sc.recovered.kind != VarietyKind::Symmetric || sc.recovered.field != Field::Real)
        throw std::invalid_argument(
            "Scenario: rank-one symmetric readouts need a real symmetric target");
      break;
    case EnsembleKind::RankOneHerm:
      if (sc.recovered.kind != VarietyKind::Hermitian)
        throw std::invalid_argument(
            "Scenario: rank-one Hermitian readouts need a Hermitian target");
      break;
    case EnsembleKind::OrthogonalMeas:
    case EnsembleKind::ProjectionMeas:
      if (sc.recovered.p != sc.recovered.q || sc.recovered.field != Field::Real)
        throw std::invalid_argument(
            "Scenario: orthogonal/projection measurements need a square real target");
      break;
    default:
      break;
  }
  // a throwaway spec validates N-independent invariants (ranks, fields)
  const EnsembleSpec probe = sc.ensemble_spec(1, 0);
  validate(probe);
  // thresholds compare N against dimensions in the counting field, so each
  // measurement must be worth exactly one counting-field scalar (a complex
  // Gaussian readout of a Hermitian target would be worth two real rows)
  if (measurement_scalar_field(probe) != counting_field(sc.recovered))
    throw std::invalid_argument(
        "Scenario: measurement scalar field must match the recovered variety's counting field");
}

void validate(const SweepConfig& cfg) {
  validate(cfg.scenario);
  validate(cfg.solve);
  if (cfg.n_hi < cfg.n_lo) throw std::invalid_argument("SweepConfig: empty N range");
  if (cfg.n_lo < 0) throw std::invalid_argument("SweepConfig: N must be nonnegative");
  if (cfg.trials < 1) throw std::invalid_argument("SweepConfig: trials must be >= 1");
  if (cfg.tests.empty()) throw std::invalid_argument("SweepConfig: no tests selected");
  if (cfg.workers < 1) throw std::invalid_argument("SweepConfig: workers must be >= 1");
}

std::vector<TrialRow> run_trial(const Scenario& sc, int n, int trial_index,
                                std::uint64_t base_seed, const std::vector<TestKind>& tests,
                                const SolveConfig& solve_cfg) {
  const std::uint64_t trial_seed =
      derive(base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial_index));
  std::vector<TrialRow> rows;
  rows.reserve(tests.size());

  MeasurementEnsemble ensemble;
  FieldMat plant;
  bool setup_ok = true;
  try {
    ensemble = generate(sc.ensemble_spec(n, derive(trial_seed, 0)));
    Rng rng(derive(trial_seed, 1));
    plant = sample_point(sc.recovered, rng);
  } catch (const std::exception&) {
    setup_ok = false;
  }

  for (size_t ti = 0; ti < tests.size(); ++ti) {
    const TestKind test = tests[ti];
    TrialRow row;
    row.n = n;
    row.test = test;
    row.trial = trial_index;
    row.seed = trial_seed;
    if (!setup_ok) {
      row.success = false;
      row.detail = -1.0;
      rows.push_back(row);
      continue;
    }
    try {
      switch (test) {
        case TestKind::LocalRank: {
          const TangentBasis tb = tangent_basis(sc.recovered, plant);
          const int fiber = fiber_dim_estimate(measurement_jacobian(ensemble, tb));
          row.success = fiber == 0;
          row.detail = static_cast<double>(fiber);
          break;
        }
        case TestKind::AeRecovery: {
          const SolveOutcome out = distinct_solution_search(ensemble, plant, sc.recovered,
                                                            solve_cfg, derive(trial_seed, 2));
          row.success = out.status != SolveStatus::Converged;
          row.detail = out.residual;
          break;
        }
        case TestKind::Everywhere: {
          const SolveOutcome out =
              counterexample_search(ensemble, sc.recovered, solve_cfg, derive(trial_seed, 3));
          row.success = out.status != SolveStatus::Converged;
          row.detail = out.residual;
          break;
        }
      }
    } catch (const std::exception&) {
      row.success = false;
      row.detail = -1.0;
    }
    rows.push_back(row);
  }
  return rows;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const int n_count = cfg.n_hi - cfg.n_lo + 1;
  const int tests = static_cast<int>(cfg.tests.size());
  const int cells = n_count * cfg.trials;

  SweepResult result;
  result.config = cfg;
  result.rows.resize(static_cast<size_t>(cells) * static_cast<size_t>(tests));

  // rows land at (N, test, trial) slots regardless of execution order
  auto run_cell = [&](int cell) {
    const int n = cfg.n_lo + cell / cfg.trials;
    const int trial = cell % cfg.trials;
    const std::vector<TrialRow> rows =
        run_trial(cfg.scenario, n, trial, cfg.base_seed, cfg.tests, cfg.solve);
    for (int ti = 0; ti < tests; ++ti) {
      const size_t slot = (static_cast<size_t>(n - cfg.n_lo) * static_cast<size_t>(tests) +
                           static_cast<size_t>(ti)) *
                              static_cast<size_t>(cfg.trials) +
                          static_cast<size_t>(trial);
      result.rows[slot] = rows[static_cast<size_t>(ti)];
    }
  };

  const int workers = std::min(cfg.workers, cells);
  if (workers <= 1) {
    for (int cell = 0; cell < cells; ++cell) run_cell(cell);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (int cell = next.fetch_add(1); cell < cells; cell = next.fetch_add(1)) run_cell(cell);
      });
    for (std::thread& t : pool) t.join();
  }

  for (int ni = 0; ni < n_count; ++ni)
    for (int ti = 0; ti < tests; ++ti) {
      RateSummary s;
      s.n = cfg.n_lo + ni;
      s.test = cfg.tests[static_cast<size_t>(ti)];
      s.trials = cfg.trials;
      for (int tr = 0; tr < cfg.trials; ++tr) {
        const size_t slot =
            (static_cast<size_t>(ni) * static_cast<size_t>(tests) + static_cast<size_t>(ti)) *
                static_cast<size_t>(cfg.trials) +
            static_cast<size_t>(tr);
        if (result.rows[slot].success) ++s.successes;
      }
      s.rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
      result.summaries.push_back(s);
    }
  return result;
}

std::optional<int> estimate_transition(const SweepResult& result, TestKind test) {
  std::vector<std::pair<int, double>> rates;
  for (const RateSummary& s : result.summaries)
    if (s.test == test) rates.emplace_back(s.n, s.rate);
  if (rates.empty()) throw std::invalid_argument("estimate_transition: test not in result");
  std::sort(rates.begin(), rates.end());
  std::optional<int> transition;
  for (auto it = rates.rbegin(); it != rates.rend(); ++it) {
    if (it->second >= 0.5)
      transition = it->first;
    else
      break;
  }
  return transition;
}

std::optional<int> theoretical_threshold(const Scenario& sc, TestKind test) {
  switch (test) {
    case TestKind::LocalRank: return sc.dim();
    case TestKind::AeRecovery: return sc.ae_threshold();
    case TestKind::Everywhere: return sc.everywhere_threshold();
  }
  return std::nullopt;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "N,test,trial,seed,success,detail\n";
  for (const TrialRow& r : result.rows)
    os << r.n << "," << to_string(r.test) << "," << r.trial << "," << r.seed << ","
       << (r.success ? 1 : 0) << "," << fmt_double(r.detail) << "\n";
  return os.str();
}

nlohmann::ordered_json to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["recovered"] = format(cfg.scenario.recovered);
  j["ensemble"] = format(cfg.scenario.ensemble);
  j["n_range"] = {cfg.n_lo, cfg.n_hi};
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  nlohmann::ordered_json tests = nlohmann::ordered_json::array();
  for (TestKind t : cfg.tests) tests.push_back(to_string(t));
  j["tests"] = std::move(tests);
  j["solve"] = to_json(cfg.solve);
  j["workers"] = cfg.workers;
  return j;
}

SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  cfg.scenario.recovered = parse_variety(j.at("recovered").get<std::string>());
  cfg.scenario.ensemble = parse_ensemble_kind(j.at("ensemble").get<std::string>());
  const auto& range = j.at("n_range");
  if (!range.is_array() || range.size() != 2)
    throw std::invalid_argument("sweep config: n_range must be [lo, hi]");
  cfg.n_lo = range.at(0).get<int>();
  cfg.n_hi = range.at(1).get<int>();
  cfg.trials = j.value("trials", 1);
  cfg.base_seed = j.value("base_seed", static_cast<std::uint64_t>(0));
  if (j.contains("tests")) {
    for (const auto& t : j.at("tests")) cfg.tests.push_back(test_kind_from_string(t.get<std::string>()));
  } else {
    cfg.tests = {TestKind::LocalRank, TestKind::AeRecovery, TestKind::Everywhere};
  }
  cfg.solve = j.contains("solve") ? solve_config_from_json(j.at("solve")) : SolveConfig{};
  cfg.workers = j.value("workers", 1);
  validate(cfg);
  return cfg;
}

nlohmann::ordered_json summary_to_json(const SweepResult& result) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["config"] = to_json(result.config);
  nlohmann::ordered_json sums = nlohmann::ordered_json::array();
  for (const RateSummary& s : result.summaries) {
    nlohmann::ordered_json row;
    row["N"] = s.n;
    row["test"] = to_string(s.test);
    row["successes"] = s.successes;
    row["trials"] = s.trials;
    row["rate"] = s.rate;
    sums.push_back(std::move(row));
  }
  j["summaries"] = std::move(sums);
  nlohmann::ordered_json transitions;
  nlohmann::ordered_json thresholds;
  for (TestKind t : result.config.tests) {
    const auto est = estimate_transition(result, t);
    transitions[to_string(t)] = est ? nlohmann::ordered_json(*est) : nlohmann::ordered_json(nullptr);
    const auto thr = theoretical_threshold(result.config.scenario, t);
    thresholds[to_string(t)] = thr ? nlohmann::ordered_json(*thr) : nlohmann::ordered_json(nullptr);
  }
  j["transitions"] = std::move(transitions);
  j["theoretical_thresholds"] = std::move(thresholds);
  return j;
}

SweepResult summary_from_json(const nlohmann::json& j) {
  if (j.value("schema", 0) != 1)
    throw std::invalid_argument("sweep summary: missing or unsupported schema field");
  SweepResult result;
  result.config = sweep_config_from_json(j.at("config"));
  for (const auto& row : j.at("summaries")) {
    RateSummary s;
    s.n = row.at("N").get<int>();
    s.test = test_kind_from_string(row.at("test").get<std::string>());
    s.successes = row.at("successes").get<int>();
    s.trials = row.at("trials").get<int>();
    s.rate = row.at("rate").get<double>();
    result.summaries.push_back(s);
  }
  return result;
}

std::string rate_curve(const SweepResult& result, TestKind test, bool with_threshold) {
  std::ostringstream os;
  const auto thr = theoretical_threshold(result.config.scenario, test);
  os << "# " << to_string(test) << ": N rate";
  if (with_threshold) os << " threshold";
  os << "\n";
  for (const RateSummary& s : result.summaries) {
    if (s.test != test) continue;
    os << s.n << " " << fmt_double(s.rate);
    if (with_threshold) os << " " << (thr ? std::to_string(*thr) : "nan");
    os << "\n";
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace matrec
