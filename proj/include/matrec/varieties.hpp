#pragma once

#include <string>
#include <vector>

#include "matrec/core.hpp"

namespace matrec {

enum class VarietyKind {
  LowRank,     // p x q matrices of rank <= r, over R or C
  Symmetric,   // p x p symmetric of rank <= r, over R or C
  Hermitian,   // p x p Hermitian of rank <= r (a real variety in C^{pxp})
  Orthogonal,  // d x d orthogonal matrices, over R
  Projection,  // d x d orthogonal projections of rank r, over R
  RankOnePSD,  // x x^T (R) or x x^* (C)
  FullSpace,   // all of H^{pxq}
};

/// Descriptor of a recovered-matrix or measurement variety. For square kinds
/// q mirrors p. The rank parameter is ignored by Orthogonal, RankOnePSD and
/// FullSpace.
struct VarietySpec {
  VarietyKind kind = VarietyKind::LowRank;
  int p = 0;
  int q = 0;
  int r = 0;
  Field field = Field::Real;

  static VarietySpec low_rank(int p, int q, int r, Field f);
  static VarietySpec symmetric(int p, int r, Field f = Field::Real);
  static VarietySpec hermitian(int p, int r);
  static VarietySpec orthogonal(int d);
  static VarietySpec projection(int d, int r);
  static VarietySpec rank_one_psd(int p, Field f);
  static VarietySpec full_space(int p, int q, Field f);
};

/// Throws std::invalid_argument unless the spec satisfies its invariants
/// (positive sizes, 1 <= r <= min(p,q), square kinds with p == q, Orthogonal
/// and Projection over R, Hermitian over C, 1 <= r <= d-1 for Projection).
void validate(const VarietySpec& spec);

/// The field in which variety_dim counts parameters. Hermitian, Orthogonal,
/// Projection and RankOnePSD varieties are real even when their entries are
/// complex; LowRank/Symmetric/FullSpace count in their own field.
Field counting_field(const VarietySpec& spec);

/// Dimension in counting_field units:
///   LowRank    (p+q)r - r^2        Symmetric   pr - r(r-1)/2
///   Hermitian  2pr - r^2 (real)    Orthogonal  d(d-1)/2 (real)
///   Projection r(d-r) (real)       RankOnePSD  p over R, 2p-1 over C (real)
///   FullSpace  pq
int variety_dim(const VarietySpec& spec);

/// Dimension in real units (doubles complex-counted dimensions).
int variety_dim_real(const VarietySpec& spec);

/// Dimension, in counting_field units, of the smallest linear matrix space
/// containing the variety: pq for LowRank/FullSpace, the symmetric space
/// p(p+1)/2 for Symmetric / Projection / real RankOnePSD, the Hermitian space
/// p^2 (real) for Hermitian / complex RankOnePSD, d^2 for Orthogonal.
int ambient_dim(const VarietySpec& spec);
int ambient_dim_real(const VarietySpec& spec);

/// Spec containing all differences x - y of points of the variety: the rank
/// bound doubles, capped at the ambient rank. Defined for the bounded-rank
/// kinds only; RankOnePSD differences land in Symmetric/Hermitian rank <= 2.
VarietySpec delta_spec(const VarietySpec& spec);

/// Random point on the variety (absolutely continuous on the smooth stratum;
/// Haar for Orthogonal/Projection). The sample has exact rank r with
/// probability one.
FieldMat sample_point(const VarietySpec& spec, Rng& rng);

/// Defining-equation residual, scale-relative; ~1e-15 for true members.
double membership_residual(const VarietySpec& spec, const FieldMat& point);

/// Basis of the tangent space at a smooth point. `basis` holds exactly
/// variety_dim(spec) matrices when counting_field(spec) matches the entry
/// field, and the realified span has rank variety_dim_real(spec).
struct TangentBasis {
  VarietySpec spec;
  FieldMat base_point;
  std::vector<FieldMat> basis;
  Field counting_field = Field::Real;
};

/// Tangent basis at `point`, which must lie on the variety (membership
/// residual <= 1e-8) with exact numerical rank r; a lower-stratum point is
/// rejected with std::runtime_error.
TangentBasis tangent_basis(const VarietySpec& spec, const FieldMat& point);

/// Rows = realified tangent directions. For complex-counted varieties each
/// basis element T contributes realify(T) and realify(iT), so the row count
/// is always variety_dim_real(spec).
Eigen::MatrixXd realified_tangent_rows(const TangentBasis& tb);

/// Distance from `x` to the variety via rank truncation (bounded-rank kinds),
/// the polar factor (Orthogonal), or spectral rounding (Projection).
double distance_to_variety(const VarietySpec& spec, const FieldMat& x);

/// Canonical text form, e.g. lowrank:4x4:r1:C, sym:4:r2, herm:5:r2, orth:6,
/// proj:6:r2, rank1psd:4:C, full:3x4:R.
std::string format(const VarietySpec& spec);
VarietySpec parse_variety(const std::string& text);

// Numerical-rank tolerance used across the project: singular values are kept
// while sigma_k > max(rows, cols) * eps * sigma_1 * 64.
int numerical_rank(const Eigen::VectorXd& singular_values, Eigen::Index rows, Eigen::Index cols,
                   double* tolerance_out = nullptr);

/// Haar-distributed orthogonal (R) or unitary (C) matrix: QR of a Gaussian
/// matrix with the R-diagonal sign/phase fix.
Eigen::MatrixXd haar_orthogonal(int d, Rng& rng);
Eigen::MatrixXcd haar_unitary(int d, Rng& rng);

}  // namespace matrec
