#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "matrec/varieties.hpp"

namespace matrec {

enum class EnsembleKind {
  Gaussian,        // i.i.d. standard normal entries
  LowRankMeas,     // points of LowRank(p,q,s)
  OrthogonalMeas,  // Haar orthogonal, p = q, R
  ProjectionMeas,  // Haar rank-s projections, p = q, R
  RankOneSym,      // x x^T with Gaussian x in R^p
  RankOneHerm,     // x x^* with complex Gaussian x
};

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Gaussian;
  int N = 0;
  int p = 0;
  int q = 0;
  int s = 0;  // measurement rank, LowRankMeas/ProjectionMeas only
  Field field = Field::Real;
  std::uint64_t seed = 0;
};

void validate(const EnsembleSpec& spec);

/// Real for the rank-one quadratic readouts, the matrix field otherwise.
Field measurement_scalar_field(const EnsembleSpec& spec);

/// The variety each measurement matrix is drawn from.
VarietySpec measurement_variety_of(const EnsembleSpec& spec);

struct MeasurementEnsemble {
  EnsembleSpec spec;
  std::vector<FieldMat> matrices;
  std::vector<Eigen::VectorXcd> vectors;  // generating x_j for rank-one kinds
  Field scalar_field = Field::Real;

  int size() const { return static_cast<int>(matrices.size()); }
  bool rank_one_quadratic() const {
    return spec.kind == EnsembleKind::RankOneSym || spec.kind == EnsembleKind::RankOneHerm;
  }
};

/// Deterministic generation: matrix j is drawn from the stream derive(seed, j),
/// so the result is independent of generation order and worker chunking.
MeasurementEnsemble generate(const EnsembleSpec& spec);

/// b = L_A(P): value j is Tr(A_j^T P), or x_j^* P x_j coerced to a real scalar
/// for the rank-one kinds (P must then be symmetric/Hermitian within
/// tolerance).
MeasVec apply_measurement_map(const MeasurementEnsemble& ensemble, const FieldMat& p);

/// Canonical text form, e.g. gauss:N20:4x4:C:seed7, rank1herm:N9:4:seed3,
/// lowrankmeas:N6:5x5:s2:R:seed1.
std::string format(const EnsembleSpec& spec);
EnsembleSpec parse_ensemble(const std::string& text);

/// Kind-only text (no N/seed/shape), used by sweep configs where shape and
/// field come from the recovered variety: gauss, lowrankmeas:s2, orthmeas,
/// projmeas:s1, rank1sym, rank1herm.
struct EnsembleKindSpec {
  EnsembleKind kind = EnsembleKind::Gaussian;
  int s = 0;
};
EnsembleKindSpec parse_ensemble_kind(const std::string& text);
std::string format(const EnsembleKindSpec& kind);

nlohmann::ordered_json to_json(const MeasurementEnsemble& ensemble);
MeasurementEnsemble ensemble_from_json(const nlohmann::json& j);

nlohmann::ordered_json matrix_to_json(const FieldMat& m);
FieldMat matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json meas_to_json(const MeasVec& v);
MeasVec meas_from_json(const nlohmann::json& j);

}  // namespace matrec
