#include "matrec/recovery.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace matrec {

namespace {

Eigen::MatrixXcd sym_of(const Eigen::MatrixXcd& c) { return 0.5 * (c + c.transpose()); }
Eigen::MatrixXcd herm_of(const Eigen::MatrixXcd& c) { return 0.5 * (c + c.adjoint()); }

Field entry_field(const FactoredPoint& x) {
  return x.kind == VarietyKind::Hermitian ? Field::Complex : x.field;
}

}  // namespace

FactoredPoint FactoredPoint::make(const VarietySpec& spec) {
  validate(spec);
  FactoredPoint x;
  x.kind = spec.kind;
  x.field = spec.field;
  switch (spec.kind) {
    case VarietyKind::LowRank:
      x.a = Eigen::MatrixXcd::Zero(spec.p, spec.r);
      x.b = Eigen::MatrixXcd::Zero(spec.q, spec.r);
      break;
    case VarietyKind::Symmetric:
    case VarietyKind::Hermitian:
      x.a = Eigen::MatrixXcd::Zero(spec.p, spec.r);
      x.b = Eigen::MatrixXcd::Zero(spec.r, spec.r);
      break;
    default:
      throw std::invalid_argument("FactoredPoint: variety kind has no factor parametrization");
  }
  return x;
}

FieldMat FactoredPoint::assembled() const {
  switch (kind) {
    case VarietyKind::LowRank:
      return FieldMat(a * b.transpose(), field);
    case VarietyKind::Symmetric:
      return FieldMat(a * sym_of(b) * a.transpose(), field);
    case VarietyKind::Hermitian: {
      // hermitize the product as well; roundoff must not trip the x^*Px check
      const Eigen::MatrixXcd p = a * herm_of(b) * a.adjoint();
      return FieldMat(herm_of(p), Field::Complex);
    }
    default:
      throw std::logic_error("FactoredPoint: bad kind");
  }
}

int FactoredPoint::param_count() const {
  const int per = entry_field(*this) == Field::Complex ? 2 : 1;
  return per * static_cast<int>(a.size() + b.size());
}

Eigen::VectorXd FactoredPoint::params() const {
  const Field f = entry_field(*this);
  const Eigen::VectorXd va = realify(a, f);
  const Eigen::VectorXd vb = realify(b, f);
  Eigen::VectorXd out(va.size() + vb.size());
  out << va, vb;
  return out;
}

void FactoredPoint::set_params(const Eigen::VectorXd& v) {
  const Field f = entry_field(*this);
  const int per = f == Field::Complex ? 2 : 1;
  const Eigen::Index na = per * a.size();
  if (v.size() != na + per * b.size())
    throw std::invalid_argument("FactoredPoint::set_params: wrong parameter count");
  a = unrealify(v.head(na), a.rows(), a.cols(), f).m;
  b = unrealify(v.tail(per * b.size()), b.rows(), b.cols(), f).m;
}

Eigen::VectorXd FactoredPoint::param_gradient(const Eigen::MatrixXcd& g) const {
  const Field f = entry_field(*this);
  Eigen::MatrixXcd ga, gb;
  switch (kind) {
    case VarietyKind::LowRank:
      ga = g * b.conjugate();
      gb = g.transpose() * a.conjugate();
      break;
    case VarietyKind::Symmetric: {
      const Eigen::MatrixXcd s = sym_of(b);
      ga = (g + g.transpose()) * a.conjugate() * s.conjugate();
      const Eigen::MatrixXcd m = a.adjoint() * g * a.conjugate();
      gb = 0.5 * (m + m.transpose());
      break;
    }
    case VarietyKind::Hermitian: {
      const Eigen::MatrixXcd h = herm_of(b);
      ga = (g + g.adjoint()) * a * h;
      const Eigen::MatrixXcd m = a.adjoint() * g * a;
      gb = 0.5 * (m + m.adjoint());
      break;
    }
    default:
      throw std::logic_error("FactoredPoint: bad kind");
  }
  if (f == Field::Real) {
    ga = ga.real().cast<Cplx>();
    gb = gb.real().cast<Cplx>();
  }
  const Eigen::VectorXd va = realify(ga, f);
  const Eigen::VectorXd vb = realify(gb, f);
  Eigen::VectorXd out(va.size() + vb.size());
  out << va, vb;
  return out;
}

void validate(const SolveConfig& cfg) {
  if (cfg.max_iters < 1 || cfg.restarts < 1)
    throw std::invalid_argument("SolveConfig: max_iters and restarts must be positive");
  if (cfg.grad_tol <= 0 || cfg.residual_success_tol <= 0 || cfg.lambda0 <= 0 ||
      cfg.success_rel_err <= 0 || cfg.separation_tol <= 0)
    throw std::invalid_argument("SolveConfig: tolerances must be positive");
}

SolveConfig solve_config_from_json(const nlohmann::json& j) {
  SolveConfig cfg;
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.restarts = j.value("restarts", cfg.restarts);
  cfg.grad_tol = j.value("grad_tol", cfg.grad_tol);
  cfg.residual_success_tol = j.value("residual_success_tol", cfg.residual_success_tol);
  cfg.lambda0 = j.value("lambda0", cfg.lambda0);
  cfg.success_rel_err = j.value("success_rel_err", cfg.success_rel_err);
  cfg.separation_tol = j.value("separation_tol", cfg.separation_tol);
  validate(cfg);
  return cfg;
}

nlohmann::ordered_json to_json(const SolveConfig& cfg) {
  nlohmann::ordered_json j;
  j["max_iters"] = cfg.max_iters;
  j["restarts"] = cfg.restarts;
  j["grad_tol"] = cfg.grad_tol;
  j["residual_success_tol"] = cfg.residual_success_tol;
  j["lambda0"] = cfg.lambda0;
  j["success_rel_err"] = cfg.success_rel_err;
  j["separation_tol"] = cfg.separation_tol;
  return j;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::NoSolutionFound: return "NoSolutionFound";
    case SolveStatus::MaxItersExhausted: return "MaxItersExhausted";
  }
  return "?";
}

namespace {

// Least-squares model shared by the planted solve (residual L_A(P) - b) and
// the Rayleigh-normalized kernel search (residual L_A(P / ||P||)).
struct Problem {
  const MeasurementEnsemble& e;
  const MeasVec* b;  // null in normalized mode
  bool normalized = false;

  Eigen::VectorXcd measure(const FieldMat& p) const {
    Eigen::VectorXcd v(e.size());
    if (e.rank_one_quadratic()) {
      for (int j = 0; j < e.size(); ++j) {
        const Eigen::VectorXcd& x = e.vectors[static_cast<size_t>(j)];
        const Cplx q = x.adjoint() * p.m * x;
        v[j] = Cplx(q.real(), 0.0);
      }
    } else {
      for (int j = 0; j < e.size(); ++j) v[j] = trace_inner(e.matrices[static_cast<size_t>(j)].m, p.m);
    }
    return v;
  }

  Eigen::VectorXd residual(const FieldMat& p) const {
    Eigen::VectorXcd v = measure(p);
    if (normalized) {
      const double s = p.norm();
      v /= std::max(s, 1e-300);
    } else if (b) {
      v -= b->values;
    }
    if (e.scalar_field == Field::Real) return v.real();
    Eigen::VectorXd out(2 * v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      out[2 * j] = v[j].real();
      out[2 * j + 1] = v[j].imag();
    }
    return out;
  }

  Eigen::MatrixXd jacobian(const FactoredPoint& x, const FieldMat& p,
                           const Eigen::VectorXcd& values) const {
    const int rows_per = e.scalar_field == Field::Complex ? 2 : 1;
    const Cplx im(0.0, 1.0);
    Eigen::MatrixXd jac(rows_per * e.size(), x.param_count());
    const double s = std::max(p.norm(), 1e-300);
    for (int j = 0; j < e.size(); ++j) {
      Eigen::MatrixXcd f;
      if (e.rank_one_quadratic()) {
        const Eigen::VectorXcd& xv = e.vectors[static_cast<size_t>(j)];
        f = xv * xv.adjoint();
      } else {
        f = e.matrices[static_cast<size_t>(j)].m.conjugate();
      }
      if (!normalized) {
        jac.row(rows_per * j) = x.param_gradient(f).transpose();
        if (rows_per == 2) jac.row(rows_per * j + 1) = x.param_gradient(im * f).transpose();
      } else {
        const Cplx mj = values[j];
        const Eigen::MatrixXcd g_re = f / s - (mj.real() / (s * s * s)) * p.m;
        jac.row(rows_per * j) = x.param_gradient(g_re).transpose();
        if (rows_per == 2) {
          const Eigen::MatrixXcd g_im = (im * f) / s - (mj.imag() / (s * s * s)) * p.m;
          jac.row(rows_per * j + 1) = x.param_gradient(g_im).transpose();
        }
      }
    }
    return jac;
  }
};

struct LmRun {
  double residual_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool hit_max_iters = false;
};

// keep the normalized search well scaled: assembled() has unit norm
void renormalize(FactoredPoint& x) {
  const double s = x.assembled().norm();
  if (s > 0.0) x.b /= s;
}

LmRun lm_minimize(FactoredPoint& x, const Problem& prob, const SolveConfig& cfg,
                  double success_thresh) {
  LmRun run;
  if (prob.normalized) renormalize(x);
  Eigen::VectorXd r = prob.residual(x.assembled());
  double f = 0.5 * r.squaredNorm();
  double lambda = cfg.lambda0;
  int stale = 0;

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    if (r.norm() <= 0.5 * success_thresh) break;
    const FieldMat p = x.assembled();
    const Eigen::VectorXcd values = prob.measure(p);
    const Eigen::MatrixXd jac = prob.jacobian(x, p, values);
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) break;

    Eigen::MatrixXd h = jac.transpose() * jac;
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd damped = h;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd delta = damped.ldlt().solve(-grad);
      FactoredPoint cand = x;
      cand.set_params(x.params() + delta);
      if (prob.normalized) renormalize(cand);
      const Eigen::VectorXd r2 = prob.residual(cand.assembled());
      const double f2 = 0.5 * r2.squaredNorm();
      if (f2 < f) {
        const double drop = f - f2;
        x = cand;
        r = r2;
        f = f2;
        lambda = std::max(lambda * 0.1, 1e-14);
        stale = drop <= 1e-14 * std::max(f, 1e-300) ? stale + 1 : 0;
        accepted = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!accepted || stale >= 3) break;  // stationary or stalled
  }
  run.residual_norm = r.norm();
  run.iterations = iter;
  run.hit_max_iters = iter >= cfg.max_iters;
  return run;
}

FactoredPoint random_init(const VarietySpec& spec, Rng& rng, double target_scale) {
  FactoredPoint x = FactoredPoint::make(spec);
  const Field f = spec.kind == VarietyKind::Hermitian ? Field::Complex : spec.field;
  x.a = gaussian(x.a.rows(), x.a.cols(), f, rng).m;
  x.b = gaussian(x.b.rows(), x.b.cols(), f, rng).m;
  const double cur = x.assembled().norm();
  if (cur > 0.0 && target_scale > 0.0) x.b *= target_scale / cur;  // assembled is linear in b
  return x;
}

void check_scenario(const MeasurementEnsemble& e, const VarietySpec& spec) {
  if (e.spec.p != spec.p || e.spec.q != spec.q)
    throw std::invalid_argument("recovery: ensemble/variety shape mismatch");
  if (!e.rank_one_quadratic() && e.spec.field != spec.field)
    throw std::invalid_argument("recovery: ensemble/variety field mismatch");
  if (e.spec.kind == EnsembleKind::RankOneHerm && spec.field != Field::Complex)
    throw std::invalid_argument("recovery: rank-one Hermitian readouts need complex matrices");
  if (e.spec.kind == EnsembleKind::RankOneSym && spec.field != Field::Real)
    throw std::invalid_argument("recovery: rank-one symmetric readouts need real matrices");
}

double success_scale(const MeasVec& b) {
  const double n = b.values.norm();
  return n > 0.0 ? n : 1.0;
}

}  // namespace

std::pair<double, Eigen::VectorXd> residual_and_gradient(const FactoredPoint& x,
                                                         const MeasurementEnsemble& e,
                                                         const MeasVec& b) {
  if (b.size() != e.size())
    throw std::invalid_argument("residual_and_gradient: measurement count mismatch");
  const Problem prob{e, &b, false};
  const FieldMat p = x.assembled();
  const Eigen::VectorXd r = prob.residual(p);
  const double f = 0.5 * r.squaredNorm();
  // G = sum_j rho_j conj(A_j) (or rho_j x_j x_j^* for quadratic readouts)
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(e.spec.p, e.spec.q);
  const Eigen::VectorXcd values = prob.measure(p);
  for (int j = 0; j < e.size(); ++j) {
    const Cplx rho = values[j] - b.values[j];
    if (e.rank_one_quadratic()) {
      const Eigen::VectorXcd& xv = e.vectors[static_cast<size_t>(j)];
      g += rho.real() * (xv * xv.adjoint());
    } else {
      g += rho * e.matrices[static_cast<size_t>(j)].m.conjugate();
    }
  }
  return {f, x.param_gradient(g)};
}

SolveOutcome solve(const MeasurementEnsemble& e, const MeasVec& b, const VarietySpec& spec,
                   const SolveConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  check_scenario(e, spec);
  if (b.size() != e.size()) throw std::invalid_argument("solve: measurement count mismatch");
  const double thresh = cfg.residual_success_tol * success_scale(b);
  const double init_scale =
      e.size() > 0 ? b.values.norm() / std::sqrt(static_cast<double>(e.size())) : 1.0;
  const Problem prob{e, &b, false};

  SolveOutcome best;
  bool best_hit_max = false;
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng rng(derive(seed, static_cast<std::uint64_t>(k)));
    FactoredPoint x = random_init(spec, rng, init_scale > 0.0 ? init_scale : 1.0);
    const LmRun run = lm_minimize(x, prob, cfg, thresh);
    if (run.residual_norm < best.residual) {
      best.residual = run.residual_norm;
      best.solution = x.assembled();
      best.iterations = run.iterations;
      best.restart_index = k;
      best_hit_max = run.hit_max_iters;
    }
    if (best.residual <= thresh) break;
  }
  best.status = best.residual <= thresh
                    ? SolveStatus::Converged
                    : (best_hit_max ? SolveStatus::MaxItersExhausted : SolveStatus::NoSolutionFound);
  return best;
}

SolveOutcome distinct_solution_search(const MeasurementEnsemble& e, const FieldMat& p,
                                      const VarietySpec& spec, const SolveConfig& cfg,
                                      std::uint64_t seed) {
  validate(cfg);
  check_scenario(e, spec);
  const double member = membership_residual(spec, p);
  if (!(member <= 1e-8))
    throw std::invalid_argument("distinct_solution_search: the planted point is off the variety");
  const MeasVec b = apply_measurement_map(e, p);
  const double thresh = cfg.residual_success_tol * success_scale(b);
  const double init_scale =
      e.size() > 0 ? b.values.norm() / std::sqrt(static_cast<double>(e.size())) : 1.0;
  const double denom = std::max(p.norm(), 1e-300);
  const Problem prob{e, &b, false};

  SolveOutcome best;
  bool best_hit_max = false;
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng rng(derive(seed, static_cast<std::uint64_t>(k)));
    FactoredPoint x = random_init(spec, rng, init_scale > 0.0 ? init_scale : 1.0);
    const LmRun run = lm_minimize(x, prob, cfg, thresh);
    const FieldMat q = x.assembled();
    const double separation = (q.m - p.m).norm() / denom;
    if (separation <= cfg.separation_tol) continue;  // converged back to the plant
    if (run.residual_norm < best.residual) {
      best.residual = run.residual_norm;
      best.solution = q;
      best.iterations = run.iterations;
      best.restart_index = k;
      best_hit_max = run.hit_max_iters;
    }
    if (best.residual <= thresh) break;
  }
  best.status = best.residual <= thresh
                    ? SolveStatus::Converged
                    : (best_hit_max ? SolveStatus::MaxItersExhausted : SolveStatus::NoSolutionFound);
  return best;
}

SolveOutcome counterexample_search(const MeasurementEnsemble& e, const VarietySpec& spec,
                                   const SolveConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  check_scenario(e, spec);
  const VarietySpec dspec = delta_spec(spec);
  const double thresh = cfg.residual_success_tol;
  const Problem prob{e, nullptr, true};

  SolveOutcome best;
  bool best_hit_max = false;
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng rng(derive(seed, static_cast<std::uint64_t>(k)));
    FactoredPoint x = random_init(dspec, rng, 1.0);
    const LmRun run = lm_minimize(x, prob, cfg, thresh);
    FieldMat w = x.assembled();
    const double wn = w.norm();
    if (wn <= 0.0) continue;
    w.m /= wn;
    const double resid = prob.residual(w).norm();  // == ||L_A(w)||_2 at unit norm
    if (resid < best.residual) {
      best.residual = resid;
      best.solution = w;
      best.iterations = run.iterations;
      best.restart_index = k;
      best_hit_max = run.hit_max_iters;
    }
    if (best.residual <= thresh) break;
  }
  best.status = best.residual <= thresh
                    ? SolveStatus::Converged
                    : (best_hit_max ? SolveStatus::MaxItersExhausted : SolveStatus::NoSolutionFound);
  return best;
}

bool verify_counterexample(const MeasurementEnsemble& e, const FieldMat& w,
                           const VarietySpec& spec, double tol) {
  const VarietySpec dspec = delta_spec(spec);
  const double wn = w.norm();
  if (wn <= 0.0) return false;
  FieldMat unit = w;
  unit.m /= wn;
  if (membership_residual(dspec, unit) > 1e-8) return false;
  const MeasVec v = apply_measurement_map(e, unit);
  return realify(v).norm() <= tol;
}

nlohmann::ordered_json solution_to_json(const SolveOutcome& out) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["status"] = to_string(out.status);
  j["residual"] = out.residual;
  j["iterations"] = out.iterations;
  j["restart_index"] = out.restart_index;
  if (out.solution) j["solution"] = matrix_to_json(*out.solution);
  return j;
}

FieldMat solution_from_json(const nlohmann::json& j) {
  return matrix_from_json(j.at("solution"));
}

}  // namespace matrec
