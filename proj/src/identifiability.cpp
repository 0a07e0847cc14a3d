#include "matrec/identifiability.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace matrec {

namespace {

// One measurement's derivative along a tangent direction.
Cplx measure_direction(const MeasurementEnsemble& e, int j, const FieldMat& t) {
  if (e.rank_one_quadratic()) {
    const Eigen::VectorXcd& x = e.vectors[static_cast<size_t>(j)];
    const Cplx v = x.adjoint() * t.m * x;
    return v;
  }
  return trace_inner(e.matrices[static_cast<size_t>(j)], t);
}

}  // namespace

RankReport measurement_jacobian(const MeasurementEnsemble& e, const TangentBasis& tb) {
  const int n = e.size();
  const int dim = static_cast<int>(tb.basis.size());
  if (n > 0 && dim > 0) {
    const FieldMat& t0 = tb.basis.front();
    if (t0.rows() != e.spec.p || t0.cols() != e.spec.q)
      throw std::invalid_argument("measurement_jacobian: shape mismatch");
    if (!e.rank_one_quadratic() && t0.field != e.spec.field)
      throw std::invalid_argument("measurement_jacobian: field mismatch");
  }

  RankReport rep;
  rep.jacobian_cols = dim;

  const bool complex_rank =
      tb.counting_field == Field::Complex && e.scalar_field == Field::Complex;
  if (n == 0 || dim == 0) {
    rep.jacobian_rows = n * (complex_rank || e.scalar_field == Field::Real ? 1 : 2);
    rep.rank_field = complex_rank ? Field::Complex : Field::Real;
    rep.singular_values = Eigen::VectorXd();
    rep.rank = 0;
    return rep;
  }
  if (complex_rank) {
    // complex-linear map on a complex tangent space: rank over C
    Eigen::MatrixXcd jac(n, dim);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < dim; ++k)
        jac(j, k) = measure_direction(e, j, tb.basis[static_cast<size_t>(k)]);
    rep.jacobian_rows = n;
    rep.rank_field = Field::Complex;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
    rep.singular_values = svd.singularValues();
  } else {
    // real-linear map: realify measurements (two rows per complex scalar)
    const int rows_per = e.scalar_field == Field::Complex ? 2 : 1;
    Eigen::MatrixXd jac(rows_per * n, dim);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < dim; ++k) {
        const Cplx v = measure_direction(e, j, tb.basis[static_cast<size_t>(k)]);
        jac(rows_per * j, k) = v.real();
        if (rows_per == 2) jac(rows_per * j + 1, k) = v.imag();
      }
    rep.jacobian_rows = rows_per * n;
    rep.rank_field = Field::Real;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    rep.singular_values = svd.singularValues();
  }
  rep.rank = numerical_rank(rep.singular_values, std::max(rep.jacobian_rows, 1),
                            std::max(rep.jacobian_cols, 1), &rep.tolerance_used);
  return rep;
}

int fiber_dim_estimate(const RankReport& rep) { return rep.jacobian_cols - rep.rank; }

int numerical_variety_dim(const VarietySpec& spec, int trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("numerical_variety_dim: trials must be >= 1");
  validate(spec);
  int best = 0;
  for (int t = 0; t < trials; ++t) {
    TangentBasis tb;
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
      const FieldMat x = sample_point(spec, rng);
      try {
        tb = tangent_basis(spec, x);
        ok = true;
      } catch (const std::runtime_error&) {
        // singular-stratum draw; retry
      }
    }
    if (!ok)
      throw std::runtime_error("numerical_variety_dim: could not sample a smooth point in 10 tries");
    const Eigen::MatrixXd rows = realified_tangent_rows(tb);
    if (rows.size() == 0) continue;  // zero-dimensional variety
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    best = std::max(best, numerical_rank(svd.singularValues(), rows.rows(), rows.cols()));
  }
  return best;
}

const char* to_string(Admissibility a) {
  switch (a) {
    case Admissibility::Admissible: return "Admissible";
    case Admissibility::NotAdmissible: return "NotAdmissible";
    case Admissibility::Inconclusive: return "Inconclusive";
  }
  return "?";
}

AdmissibilityVerdict admissibility_probe(const VarietySpec& v, const FieldMat& p, int probes,
                                         Rng& rng) {
  validate(v);
  if (p.norm() == 0.0) throw std::invalid_argument("admissibility_probe: zero functional");
  if (p.rows() != v.p || p.cols() != v.q)
    throw std::invalid_argument("admissibility_probe: functional shape mismatch");

  AdmissibilityVerdict out;
  out.variety = v;
  out.functional_witness = p;
  out.probes_tried = probes;

  const double pnorm = p.norm();
  bool all_tiny = true;
  bool tangents_vanish = true;
  for (int k = 0; k < probes; ++k) {
    const FieldMat probe = sample_point(v, rng);
    const double value = std::abs(trace_inner(p.m, probe.m));
    out.max_abs_value = std::max(out.max_abs_value, value);
    const double scale = pnorm * std::max(probe.norm(), 1e-300);
    if (value > 1e-8 * scale) {
      out.verdict = Admissibility::Admissible;
      return out;
    }
    if (value > 1e-12 * scale) all_tiny = false;
    if (all_tiny && tangents_vanish) {
      // hyperplane containment also kills every tangent direction
      try {
        const TangentBasis tb = tangent_basis(v, probe);
        for (const FieldMat& t : tb.basis) {
          const double tv = std::abs(trace_inner(p.m, t.m));
          if (tv > 1e-12 * pnorm * std::max(t.norm(), 1e-300)) {
            tangents_vanish = false;
            break;
          }
        }
      } catch (const std::runtime_error&) {
        tangents_vanish = false;  // singular draw; cannot certify
      }
    }
  }
  out.verdict = (all_tiny && tangents_vanish) ? Admissibility::NotAdmissible
                                              : Admissibility::Inconclusive;
  return out;
}

nlohmann::ordered_json to_json(const RankReport& rep) {
  nlohmann::ordered_json out;
  out["schema"] = 1;
  out["jacobian_rows"] = rep.jacobian_rows;
  out["jacobian_cols"] = rep.jacobian_cols;
  out["rank"] = rep.rank;
  out["rank_field"] = to_string(rep.rank_field);
  out["tolerance_used"] = rep.tolerance_used;
  nlohmann::ordered_json sv = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < rep.singular_values.size(); ++i)
    sv.push_back(rep.singular_values[i]);
  out["singular_values"] = std::move(sv);
  return out;
}

}  // namespace matrec
