// Acceptance suite: one pass/fail line per criterion. Exit code is the number
// of failed criteria.

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "matrec/harness.hpp"

using namespace matrec;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// 1. dimension formulas, exact over the full small-size grid

bool dims_exact(std::string& detail) {
  Rng rng(1001);
  std::vector<VarietySpec> specs;
  for (int p = 2; p <= 6; ++p)
    for (int q = 2; q <= 6; ++q)
      for (int r = 1; r <= std::min(p, q); ++r) {
        specs.push_back(VarietySpec::low_rank(p, q, r, Field::Real));
        specs.push_back(VarietySpec::low_rank(p, q, r, Field::Complex));
      }
  for (int p = 1; p <= 6; ++p)
    for (int r = 1; r <= p; ++r) {
      specs.push_back(VarietySpec::symmetric(p, r));
      specs.push_back(VarietySpec::hermitian(p, r));
    }
  for (int d = 1; d <= 6; ++d) specs.push_back(VarietySpec::orthogonal(d));
  for (int d = 2; d <= 6; ++d)
    for (int r = 1; r <= d - 1; ++r) specs.push_back(VarietySpec::projection(d, r));

  int checked = 0;
  for (const VarietySpec& s : specs) {
    const int want = variety_dim_real(s);
    const int got = numerical_variety_dim(s, 3, rng);
    ++checked;
    if (got != want) {
      detail = format(s) + ": numerical " + std::to_string(got) + " != formula " +
               std::to_string(want);
      return false;
    }
  }
  detail = std::to_string(checked) + " specs, 3 sample points each, integer equality";
  return true;
}

// ---------------------------------------------------------------------------
// 2. local identifiability step functions

bool local_rank_step(const std::string& recovered, const std::string& ensemble, int dim,
                     int n_lo, int n_hi, std::uint64_t seed, std::string& detail) {
  SweepConfig cfg;
  cfg.scenario.recovered = parse_variety(recovered);
  cfg.scenario.ensemble = parse_ensemble_kind(ensemble);
  cfg.n_lo = n_lo;
  cfg.n_hi = n_hi;
  cfg.trials = 50;
  cfg.base_seed = seed;
  cfg.tests = {TestKind::LocalRank};
  cfg.workers = 2;
  const SweepResult res = run_sweep(cfg);
  for (const RateSummary& s : res.summaries) {
    if (s.n < dim && s.rate != 0.0) {
      detail = recovered + " N=" + std::to_string(s.n) + " rate " + std::to_string(s.rate);
      return false;
    }
    if (s.n >= dim && s.rate != 1.0) {
      detail = recovered + " N=" + std::to_string(s.n) + " rate " + std::to_string(s.rate);
      return false;
    }
  }
  return true;
}

bool local_transitions(std::string& detail) {
  if (!local_rank_step("lowrank:4x4:r1:C", "gauss", 7, 1, 10, 2001, detail)) return false;
  if (!local_rank_step("sym:4:r1", "rank1sym", 4, 1, 7, 2002, detail)) return false;
  if (!local_rank_step("herm:4:r1", "rank1herm", 7, 3, 10, 2003, detail)) return false;
  detail = "rate steps 0 -> 1 exactly at dim for all three scenarios, 50 trials per N";
  return true;
}

// ---------------------------------------------------------------------------
// 3. a.e.-recovery transition

int count_distinct_found(const std::string& recovered, const std::string& ensemble, int n,
                         int trials, std::uint64_t seed, const SolveConfig& solve_cfg) {
  Scenario sc;
  sc.recovered = parse_variety(recovered);
  sc.ensemble = parse_ensemble_kind(ensemble);
  int found = 0;
  for (int t = 0; t < trials; ++t) {
    const auto rows = run_trial(sc, n, t, seed, {TestKind::AeRecovery}, solve_cfg);
    if (!rows[0].success && rows[0].detail >= 0.0) ++found;  // a distinct preimage appeared
  }
  return found;
}

bool ae_transition(std::string& detail) {
  const SolveConfig cfg;
  const int found6 = count_distinct_found("lowrank:4x4:r1:C", "gauss", 6, 100, 3001, cfg);
  if (found6 < 90) {
    detail = "N=6: distinct preimages in only " + std::to_string(found6) + "/100";
    return false;
  }
  const int found8 = count_distinct_found("lowrank:4x4:r1:C", "gauss", 8, 100, 3002, cfg);
  if (100 - found8 < 95) {
    detail = "N=8: spurious distinct preimages in " + std::to_string(found8) + "/100";
    return false;
  }

  SweepConfig pr;
  pr.scenario.recovered = parse_variety("sym:4:r1");
  pr.scenario.ensemble = parse_ensemble_kind("rank1sym");
  pr.n_lo = 3;
  pr.n_hi = 8;
  pr.trials = 50;
  pr.base_seed = 3003;
  pr.tests = {TestKind::AeRecovery};
  pr.workers = 2;
  const SweepResult res = run_sweep(pr);
  const auto est = estimate_transition(res, TestKind::AeRecovery);
  if (!est || *est != 5) {
    detail = "phase retrieval transition " + (est ? std::to_string(*est) : std::string("none")) +
             " != 5";
    return false;
  }
  detail = "N=6 distinct " + std::to_string(found6) + "/100, N=8 unique " +
           std::to_string(100 - found8) + "/100, phase-retrieval transition 5";
  return true;
}

// ---------------------------------------------------------------------------
// 4. everywhere-recovery transition

struct KernelCounts {
  int found_verified = 0;  // certificate at the 1e-8 tolerance, independently verified
  int clean_floor = 0;     // no certificate and best residual >= 1e-3
  int none_found = 0;      // no certificate at the 1e-8 tolerance
};

KernelCounts kernel_stats(const std::string& recovered, const std::string& ensemble, int n,
                          int trials, std::uint64_t seed, const SolveConfig& cfg) {
  Scenario sc;
  sc.recovered = parse_variety(recovered);
  sc.ensemble = parse_ensemble_kind(ensemble);
  KernelCounts out;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive(seed, static_cast<std::uint64_t>(n), t);
    const MeasurementEnsemble e = generate(sc.ensemble_spec(n, derive(trial_seed, 0)));
    const SolveOutcome res = counterexample_search(e, sc.recovered, cfg, derive(trial_seed, 3));
    if (res.status == SolveStatus::Converged &&
        verify_counterexample(e, *res.solution, sc.recovered, cfg.residual_success_tol)) {
      ++out.found_verified;
    } else if (res.status != SolveStatus::Converged) {
      ++out.none_found;
      if (res.residual >= 1e-3) ++out.clean_floor;
    }
  }
  return out;
}

bool everywhere_transition(std::string& detail) {
  SolveConfig cfg;
  cfg.restarts = 20;
  const KernelCounts c11 = kernel_stats("lowrank:4x4:r1:C", "gauss", 11, 100, 4001, cfg);
  if (c11.found_verified < 95) {
    detail = "N=11: verified kernel certificates in only " + std::to_string(c11.found_verified) +
             "/100";
    return false;
  }
  // at N = 12 the spec pins both "no certificate" and the 1e-3 residual floor
  const KernelCounts c12 = kernel_stats("lowrank:4x4:r1:C", "gauss", 12, 100, 4002, cfg);
  if (c12.clean_floor < 95) {
    detail = "N=12: clean residual floors in only " + std::to_string(c12.clean_floor) + "/100";
    return false;
  }
  const KernelCounts s6 = kernel_stats("sym:4:r1", "rank1sym", 6, 100, 4003, cfg);
  if (s6.found_verified < 95) {
    detail = "sym N=6: verified kernel certificates in only " +
             std::to_string(s6.found_verified) + "/100";
    return false;
  }
  // the rank-one criterion asks for "none at N = 7": no certificate at 1e-8
  const KernelCounts s7 = kernel_stats("sym:4:r1", "rank1sym", 7, 100, 4004, cfg);
  if (s7.none_found < 95) {
    detail = "sym N=7: kernel certificates appeared in " + std::to_string(100 - s7.none_found) +
             "/100";
    return false;
  }
  detail = "gauss C: " + std::to_string(c11.found_verified) + "/100 at N=11, " +
           std::to_string(c12.clean_floor) + "/100 floors at N=12; rank-one sym: " +
           std::to_string(s6.found_verified) + "/100 at N=6, " + std::to_string(s7.none_found) +
           "/100 none at N=7 (" + std::to_string(s7.clean_floor) + " above the 1e-3 floor)";
  return true;
}

// ---------------------------------------------------------------------------
// 5. admissibility regression

bool admissibility_regression(std::string& detail) {
  struct Case {
    VarietySpec variety;
    VarietySpec functional_source;  // P drawn from its difference set
  };
  const std::vector<Case> cases = {
      {VarietySpec::low_rank(4, 4, 2, Field::Complex),
       VarietySpec::low_rank(4, 4, 1, Field::Complex)},
      {VarietySpec::orthogonal(4), VarietySpec::low_rank(4, 4, 1, Field::Real)},
      {VarietySpec::projection(4, 2), VarietySpec::low_rank(4, 4, 1, Field::Real)},
  };
  Rng rng(5001);
  for (const Case& c : cases) {
    for (int k = 0; k < 100; ++k) {
      const FieldMat x = sample_point(c.functional_source, rng);
      const FieldMat y = sample_point(c.functional_source, rng);
      const FieldMat p = FieldMat(x.m - y.m, c.functional_source.field);
      if (p.norm() == 0.0) continue;
      const AdmissibilityVerdict v = admissibility_probe(c.variety, p, 100, rng);
      if (v.verdict != Admissibility::Admissible) {
        detail = format(c.variety) + ": functional " + std::to_string(k) + " gave " +
                 to_string(v.verdict);
        return false;
      }
    }
  }
  for (int k = 0; k < 10; ++k) {
    const Eigen::MatrixXd g = gaussian_real(4, 4, rng);
    const FieldMat skew = FieldMat::real(g - g.transpose());
    const AdmissibilityVerdict v =
        admissibility_probe(VarietySpec::symmetric(4, 4), skew, 100, rng);
    if (v.verdict != Admissibility::NotAdmissible) {
      detail = "skew control " + std::to_string(k) + " gave " + std::string(to_string(v.verdict));
      return false;
    }
  }
  detail = "3 measurement varieties x 100 functionals x 100 probes admissible; skew control "
           "not admissible";
  return true;
}

// ---------------------------------------------------------------------------
// 6. numerical property suite

Eigen::VectorXd fd_gradient(const FactoredPoint& x, const MeasurementEnsemble& e,
                            const MeasVec& b, double h) {
  const Eigen::VectorXd theta = x.params();
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    FactoredPoint plus = x, minus = x;
    Eigen::VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    plus.set_params(tp);
    minus.set_params(tm);
    g[k] = (residual_and_gradient(plus, e, b).first - residual_and_gradient(minus, e, b).first) /
           (2.0 * h);
  }
  return g;
}

bool property_suite(std::string& detail) {
  struct Case {
    VarietySpec spec;
    EnsembleKind meas;
  };
  const std::vector<Case> cases = {
      {VarietySpec::low_rank(4, 3, 2, Field::Real), EnsembleKind::Gaussian},
      {VarietySpec::low_rank(3, 4, 1, Field::Complex), EnsembleKind::Gaussian},
      {VarietySpec::symmetric(4, 2), EnsembleKind::RankOneSym},
      {VarietySpec::hermitian(4, 2), EnsembleKind::RankOneHerm},
  };
  int case_idx = 0;
  for (const Case& c : cases) {
    for (int t = 0; t < 50; ++t) {
      const std::uint64_t s = derive(6001, case_idx, t);
      const MeasurementEnsemble e =
          generate(EnsembleSpec{c.meas, 6, c.spec.p, c.spec.q, 0, c.spec.field, s});
      FactoredPoint x = FactoredPoint::make(c.spec);
      Rng rng(derive(s, 1));
      const Field f = c.spec.kind == VarietyKind::Hermitian ? Field::Complex : c.spec.field;
      x.a = gaussian(x.a.rows(), x.a.cols(), f, rng).m;
      x.b = gaussian(x.b.rows(), x.b.cols(), f, rng).m;
      MeasVec b;
      b.field = e.scalar_field;
      b.values = Eigen::VectorXcd::Zero(e.size());
      for (int j = 0; j < e.size(); ++j)
        b.values[j] = e.scalar_field == Field::Real ? Cplx(rng.gauss(), 0.0)
                                                    : Cplx(rng.gauss(), rng.gauss());
      const Eigen::VectorXd analytic = residual_and_gradient(x, e, b).second;
      const Eigen::VectorXd fd = fd_gradient(x, e, b, 1e-6);
      const double rel = (analytic - fd).norm() / std::max(1e-8, analytic.norm());
      if (rel > 1e-5) {
        detail = "gradient mismatch " + std::to_string(rel) + " on " + format(c.spec);
        return false;
      }
    }
    ++case_idx;
  }

  // tangent second-order membership decay
  Rng rng(6002);
  const std::vector<VarietySpec> tangent_specs = {
      VarietySpec::low_rank(4, 4, 2, Field::Real),
      VarietySpec::low_rank(3, 3, 1, Field::Complex),
      VarietySpec::symmetric(4, 1),
      VarietySpec::hermitian(3, 1),
      VarietySpec::orthogonal(3),
      VarietySpec::projection(4, 2),
  };
  for (const VarietySpec& s : tangent_specs) {
    const FieldMat x = sample_point(s, rng);
    const TangentBasis tb = tangent_basis(s, x);
    for (const FieldMat& t : tb.basis) {
      const double d1 = distance_to_variety(s, FieldMat(x.m + 1e-4 * t.m, s.field));
      const double d2 = distance_to_variety(s, FieldMat(x.m + 1e-5 * t.m, s.field));
      if (d1 <= 1e-11) continue;
      const double r1 = d1 / 1e-8;
      const double r2 = d2 / 1e-10;
      if (r1 / r2 >= 10.0 || r2 / r1 >= 10.0) {
        detail = "second-order decay violated on " + format(s);
        return false;
      }
    }
  }

  // measurement-map linearity
  Rng rng2(6003);
  for (int t = 0; t < 50; ++t) {
    const MeasurementEnsemble e = generate(
        EnsembleSpec{EnsembleKind::Gaussian, 8, 3, 4, 0, Field::Complex, derive(6004, t)});
    const FieldMat p = gaussian(3, 4, Field::Complex, rng2);
    const FieldMat q = gaussian(3, 4, Field::Complex, rng2);
    const double alpha = rng2.gauss();
    const Eigen::VectorXcd lhs =
        apply_measurement_map(e, FieldMat(p.m + alpha * q.m, Field::Complex)).values;
    const Eigen::VectorXcd rhs =
        apply_measurement_map(e, p).values + alpha * apply_measurement_map(e, q).values;
    if ((lhs - rhs).norm() > 1e-12 * (1.0 + rhs.norm())) {
      detail = "linearity violated at trial " + std::to_string(t);
      return false;
    }
  }

  // sweep byte-reproducibility, 1 vs 4 workers
  SweepConfig cfg;
  cfg.scenario.recovered = parse_variety("lowrank:4x4:r1:C");
  cfg.scenario.ensemble = parse_ensemble_kind("gauss");
  cfg.n_lo = 6;
  cfg.n_hi = 8;
  cfg.trials = 5;
  cfg.base_seed = 6005;
  cfg.tests = {TestKind::LocalRank, TestKind::AeRecovery, TestKind::Everywhere};
  SweepConfig cfg4 = cfg;
  cfg4.workers = 4;
  const std::string csv1 = to_csv(run_sweep(cfg));
  const std::string csv4 = to_csv(run_sweep(cfg4));
  if (csv1 != csv4) {
    detail = "sweep rows differ between 1 and 4 workers";
    return false;
  }

  detail = "gradients (200 instances), tangent decay, linearity, worker-count reproducibility";
  return true;
}

}  // namespace

int main() {
  std::string detail;

  bool ok = dims_exact(detail);
  report(1, "dimension formulas (exact)", ok, detail);

  detail.clear();
  ok = local_transitions(detail);
  report(2, "local identifiability transition (exact step at dim)", ok, detail);

  detail.clear();
  ok = ae_transition(detail);
  report(3, "a.e.-recovery transition (statistical)", ok, detail);

  detail.clear();
  ok = everywhere_transition(detail);
  report(4, "everywhere-recovery transition", ok, detail);

  detail.clear();
  ok = admissibility_regression(detail);
  report(5, "admissibility regression", ok, detail);

  detail.clear();
  ok = property_suite(detail);
  report(6, "numerical property suite", ok, detail);

  return g_failures;
}
