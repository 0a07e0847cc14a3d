#pragma once

#include <optional>

#include <json.hpp>

#include "matrec/ensembles.hpp"
#include "matrec/varieties.hpp"

namespace matrec {

/// Overparametrized point on a bounded-rank variety. LowRank assembles
/// U V^T; Symmetric assembles Y S Y^T and Hermitian Y H Y^* where S/H is the
/// symmetrized/Hermitized core, so assembled() lies on the variety by
/// construction for any parameter values.
struct FactoredPoint {
  VarietyKind kind = VarietyKind::LowRank;
  Field field = Field::Real;
  Eigen::MatrixXcd a;  // U (p x r) or Y (p x r)
  Eigen::MatrixXcd b;  // V (q x r) or the free core C (r x r)

  static FactoredPoint make(const VarietySpec& spec);

  FieldMat assembled() const;
  int param_count() const;
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& v);

  /// Realified parameter gradient of P -> Re<G, P>_F through the factors.
  Eigen::VectorXd param_gradient(const Eigen::MatrixXcd& g_ambient) const;
};

struct SolveConfig {
  int max_iters = 500;
  int restarts = 20;
  double grad_tol = 1e-10;
  double residual_success_tol = 1e-8;  // relative to ||b||_2, or to 1 when b = 0
  double lambda0 = 1e-3;               // Levenberg-Marquardt damping, adapted x/÷ 10
  double success_rel_err = 1e-6;
  double separation_tol = 1e-3;
};

void validate(const SolveConfig& cfg);
SolveConfig solve_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SolveConfig& cfg);

enum class SolveStatus { Converged, NoSolutionFound, MaxItersExhausted };
const char* to_string(SolveStatus s);

struct SolveOutcome {
  std::optional<FieldMat> solution;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int restart_index = -1;
  SolveStatus status = SolveStatus::NoSolutionFound;
};

/// Objective value 1/2 ||L_A(assembled(x)) - b||^2 over realified measurement
/// scalars, with its gradient in realified factor parameters.
std::pair<double, Eigen::VectorXd> residual_and_gradient(const FactoredPoint& x,
                                                         const MeasurementEnsemble& ensemble,
                                                         const MeasVec& b);

/// Multi-start Levenberg-Marquardt over the factored variety. Restart k draws
/// its initialization from derive(seed, k); lowest residual wins, ties broken
/// by restart index. Converged means residual <= tol * max(||b||, 1).
SolveOutcome solve(const MeasurementEnsemble& ensemble, const MeasVec& b, const VarietySpec& spec,
                   const SolveConfig& cfg, std::uint64_t seed);

/// Hunts for a preimage of L_A(p) on the variety other than p itself;
/// convergences within separation_tol of p are excluded. Converged means a
/// distinct preimage was found (a witness against a.e. recovery of p).
SolveOutcome distinct_solution_search(const MeasurementEnsemble& ensemble, const FieldMat& p,
                                      const VarietySpec& spec, const SolveConfig& cfg,
                                      std::uint64_t seed);

/// Minimizes ||L_A(W)|| / ||W||_F over the difference variety delta_spec(spec).
/// Converged means a unit-norm W with ||L_A(W)||_2 <= residual_success_tol was
/// found: a certificate that everywhere-recovery fails for this ensemble.
SolveOutcome counterexample_search(const MeasurementEnsemble& ensemble, const VarietySpec& spec,
                                   const SolveConfig& cfg, std::uint64_t seed);

/// Optimizer-independent check of a kernel certificate: w must be unit-norm
/// within tolerance after normalization, lie on delta_spec(spec), and satisfy
/// ||L_A(w)||_2 <= tol.
bool verify_counterexample(const MeasurementEnsemble& ensemble, const FieldMat& w,
                           const VarietySpec& spec, double tol);

nlohmann::ordered_json solution_to_json(const SolveOutcome& outcome);
FieldMat solution_from_json(const nlohmann::json& j);

}  // namespace matrec
