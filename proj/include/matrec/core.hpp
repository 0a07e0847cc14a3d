#pragma once

#include <Eigen/Dense>

#include "matrec/field.hpp"
#include "matrec/seeding.hpp"

namespace matrec {

/// Field-tagged dense matrix. Storage is always complex; a Real tag asserts
/// that every imaginary part is zero, which keeps one code path through the
/// ensembles, solvers, and serializers regardless of the scenario field.
struct FieldMat {
  Eigen::MatrixXcd m;
  Field field = Field::Real;

  FieldMat() = default;
  FieldMat(Eigen::MatrixXcd mat, Field f);

  static FieldMat real(const Eigen::MatrixXd& mat);
  static FieldMat complex(Eigen::MatrixXcd mat);
  static FieldMat zero(Eigen::Index rows, Eigen::Index cols, Field f);

  Eigen::Index rows() const { return m.rows(); }
  Eigen::Index cols() const { return m.cols(); }
  double norm() const { return m.norm(); }

  /// Real part as a real matrix; valid for any tag, exact for Real.
  Eigen::MatrixXd real_part() const { return m.real(); }
};

/// The scalars actually measured. The scalar field may be Real even when the
/// measured matrices are Complex (Hermitian rank-one readouts are real).
struct MeasVec {
  Eigen::VectorXcd values;
  Field field = Field::Real;

  Eigen::Index size() const { return values.size(); }
};

/// Trace pairing Tr(A^T P) = sum_ij A_ij P_ij: the plain transpose, no
/// conjugation, over either field.
template <class DerivedA, class DerivedP>
typename DerivedA::Scalar trace_inner(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedP>& p) {
  return a.cwiseProduct(p).sum();
}

/// Same pairing on tagged matrices, with shape/field validation.
Cplx trace_inner(const FieldMat& a, const FieldMat& p);

// Realification layout, fixed across the project: entries are visited in
// row-major order; a Real matrix contributes one coordinate per entry, a
// Complex matrix contributes the pair (re, im) per entry. The map is
// real-linear, injective, and isometric: ||realify(M)||_2 = ||M||_F.
Eigen::VectorXd realify(const FieldMat& m);
Eigen::VectorXd realify(const Eigen::MatrixXcd& m, Field field);
Eigen::VectorXd realify(const MeasVec& v);

/// Inverse of realify for the given shape/field.
FieldMat unrealify(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols, Field field);

/// Frobenius-relative Hermitian deviation ||P - P^*||_F / max(1, ||P||_F).
double hermitian_deviation(const Eigen::MatrixXcd& p);

inline constexpr double kHermitianTol = 1e-10;

/// Quadratic readout x^* P x for the Hermitian rank-one scenario. Requires P
/// Hermitian within kHermitianTol (relative); reports the real part.
double quad_form(const Eigen::VectorXcd& x, const FieldMat& p);

/// i.i.d. standard Gaussian matrix; Complex entries have independent N(0,1)
/// real and imaginary parts.
Eigen::MatrixXd gaussian_real(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Eigen::MatrixXcd gaussian_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng);
FieldMat gaussian(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng);

void require_same_shape(const FieldMat& a, const FieldMat& b, const char* what);
void require_same_field(const FieldMat& a, const FieldMat& b, const char* what);

}  // namespace matrec
