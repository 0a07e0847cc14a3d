#pragma once

#include <json.hpp>

#include "matrec/ensembles.hpp"
#include "matrec/varieties.hpp"

namespace matrec {

/// Rank certificate for the measurement map restricted to a tangent space.
/// Complex-counted scenarios rank the N x dim complex Jacobian over C; all
/// real-counted scenarios rank a realified Jacobian over R (each complex
/// measurement then contributes two real rows).
struct RankReport {
  int jacobian_rows = 0;
  int jacobian_cols = 0;
  Eigen::VectorXd singular_values;  // descending
  int rank = 0;
  double tolerance_used = 0.0;
  Field rank_field = Field::Real;
};

RankReport measurement_jacobian(const MeasurementEnsemble& ensemble, const TangentBasis& tb);

/// dim(tangent) - rank: the local dimension of {T : L_A(T) = 0}. Zero
/// certifies local identifiability at the base point.
int fiber_dim_estimate(const RankReport& report);

/// Max over `trials` sample points of the realified tangent rank, in real
/// units. Sampling retries up to 10 times per trial if a draw lands on a
/// singular stratum.
int numerical_variety_dim(const VarietySpec& spec, int trials, Rng& rng);

enum class Admissibility { Admissible, NotAdmissible, Inconclusive };

const char* to_string(Admissibility a);

struct AdmissibilityVerdict {
  VarietySpec variety;
  FieldMat functional_witness;  // the P of L_P(Q) = Tr(P^T Q)
  int probes_tried = 0;
  Admissibility verdict = Admissibility::Inconclusive;
  double max_abs_value = 0.0;  // max |Tr(P^T v)| over the probes
};

/// Samples `probes` points v of V. Admissible as soon as one probe has
/// |Tr(P^T v)| > 1e-8 ||P|| ||v||; NotAdmissible when every probe value is
/// below 1e-12 relative and the functional also vanishes along every tangent
/// direction at every probe point; Inconclusive otherwise.
AdmissibilityVerdict admissibility_probe(const VarietySpec& v, const FieldMat& p, int probes,
                                         Rng& rng);

nlohmann::ordered_json to_json(const RankReport& report);

}  // namespace matrec
