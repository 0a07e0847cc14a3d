#include "matrec/varieties.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace matrec {

namespace {

constexpr double kEps = 2.220446049250313e-16;
constexpr double kMembershipTol = 1e-8;

Eigen::MatrixXcd symmetrize(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.transpose()); }
Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

[[noreturn]] void bad_spec(const std::string& why) {
  throw std::invalid_argument("VarietySpec: " + why);
}

}  // namespace

VarietySpec VarietySpec::low_rank(int p, int q, int r, Field f) {
  return VarietySpec{VarietyKind::LowRank, p, q, r, f};
}
VarietySpec VarietySpec::symmetric(int p, int r, Field f) {
  return VarietySpec{VarietyKind::Symmetric, p, p, r, f};
}
VarietySpec VarietySpec::hermitian(int p, int r) {
  return VarietySpec{VarietyKind::Hermitian, p, p, r, Field::Complex};
}
VarietySpec VarietySpec::orthogonal(int d) {
  return VarietySpec{VarietyKind::Orthogonal, d, d, 0, Field::Real};
}
VarietySpec VarietySpec::projection(int d, int r) {
  return VarietySpec{VarietyKind::Projection, d, d, r, Field::Real};
}
VarietySpec VarietySpec::rank_one_psd(int p, Field f) {
  return VarietySpec{VarietyKind::RankOnePSD, p, p, 0, f};
}
VarietySpec VarietySpec::full_space(int p, int q, Field f) {
  return VarietySpec{VarietyKind::FullSpace, p, q, 0, f};
}

void validate(const VarietySpec& s) {
  if (s.p < 1 || s.q < 1) bad_spec("sizes must be positive");
  switch (s.kind) {
    case VarietyKind::LowRank:
      if (s.r < 1 || s.r > std::min(s.p, s.q)) bad_spec("LowRank needs 1 <= r <= min(p,q)");
      break;
    case VarietyKind::Symmetric:
      if (s.p != s.q) bad_spec("Symmetric needs p == q");
      if (s.r < 1 || s.r > s.p) bad_spec("Symmetric needs 1 <= r <= p");
      break;
    case VarietyKind::Hermitian:
      if (s.p != s.q) bad_spec("Hermitian needs p == q");
      if (s.field != Field::Complex) bad_spec("Hermitian is a variety of complex matrices");
      if (s.r < 1 || s.r > s.p) bad_spec("Hermitian needs 1 <= r <= p");
      break;
    case VarietyKind::Orthogonal:
      if (s.p != s.q) bad_spec("Orthogonal needs p == q");
      if (s.field != Field::Real) bad_spec("Orthogonal is supported over R only");
      break;
    case VarietyKind::Projection:
      if (s.p != s.q) bad_spec("Projection needs p == q");
      if (s.field != Field::Real) bad_spec("Projection is supported over R only");
      if (s.r < 1 || s.r > s.p - 1) bad_spec("Projection needs 1 <= r <= d-1");
      break;
    case VarietyKind::RankOnePSD:
      if (s.p != s.q) bad_spec("RankOnePSD needs p == q");
      break;
    case VarietyKind::FullSpace:
      break;
  }
}

Field counting_field(const VarietySpec& s) {
  switch (s.kind) {
    case VarietyKind::LowRank:
    case VarietyKind::Symmetric:
    case VarietyKind::FullSpace:
      return s.field;
    default:
      return Field::Real;  // real varieties, possibly embedded in complex space
  }
}

int variety_dim(const VarietySpec& s) {
  validate(s);
  const int p = s.p, q = s.q, r = s.r;
  switch (s.kind) {
    case VarietyKind::LowRank:
      return (p + q) * r - r * r;
    case VarietyKind::Symmetric:
      return p * r - r * (r - 1) / 2;
    case VarietyKind::Hermitian:
      return 2 * p * r - r * r;
    case VarietyKind::Orthogonal:
      return p * (p - 1) / 2;
    case VarietyKind::Projection:
      return r * (p - r);
    case VarietyKind::RankOnePSD:
      return s.field == Field::Real ? p : 2 * p - 1;
    case VarietyKind::FullSpace:
      return p * q;
  }
  bad_spec("unreachable");
}

int variety_dim_real(const VarietySpec& s) {
  return variety_dim(s) * (counting_field(s) == Field::Complex ? 2 : 1);
}

int ambient_dim(const VarietySpec& s) {
  validate(s);
  const int p = s.p, q = s.q;
  switch (s.kind) {
    case VarietyKind::LowRank:
    case VarietyKind::FullSpace:
      return p * q;
    case VarietyKind::Symmetric:
      return p * (p + 1) / 2;
    case VarietyKind::Hermitian:
      return p * p;
    case VarietyKind::Orthogonal:
      return p * p;
    case VarietyKind::Projection:
      return p * (p + 1) / 2;
    case VarietyKind::RankOnePSD:
      return s.field == Field::Real ? p * (p + 1) / 2 : p * p;
  }
  bad_spec("unreachable");
}

int ambient_dim_real(const VarietySpec& s) {
  return ambient_dim(s) * (counting_field(s) == Field::Complex ? 2 : 1);
}

VarietySpec delta_spec(const VarietySpec& s) {
  validate(s);
  switch (s.kind) {
    case VarietyKind::LowRank:
      return VarietySpec::low_rank(s.p, s.q, std::min(2 * s.r, std::min(s.p, s.q)), s.field);
    case VarietyKind::Symmetric:
      return VarietySpec::symmetric(s.p, std::min(2 * s.r, s.p), s.field);
    case VarietyKind::Hermitian:
      return VarietySpec::hermitian(s.p, std::min(2 * s.r, s.p));
    case VarietyKind::RankOnePSD:
      return s.field == Field::Real ? VarietySpec::symmetric(s.p, std::min(2, s.p))
                                    : VarietySpec::hermitian(s.p, std::min(2, s.p));
    default:
      throw std::invalid_argument(
          "delta_spec: differences of this variety are not a bounded-rank variety");
  }
}

int numerical_rank(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols,
                   double* tolerance_out) {
  if (sv.size() == 0 || sv[0] <= 0.0) {
    if (tolerance_out) *tolerance_out = 0.0;
    return 0;
  }
  const double tol = static_cast<double>(std::max(rows, cols)) * kEps * 64.0 * sv[0];
  if (tolerance_out) *tolerance_out = tol;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  return rank;
}

Eigen::MatrixXd haar_orthogonal(int d, Rng& rng) {
  const Eigen::MatrixXd g = gaussian_real(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

Eigen::MatrixXcd haar_unitary(int d, Rng& rng) {
  const Eigen::MatrixXcd g = gaussian_complex(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Cplx rii = r(i, i);
    const double a = std::abs(rii);
    if (a > 0.0) q.col(i) *= rii / a;
  }
  return q;
}

FieldMat sample_point(const VarietySpec& s, Rng& rng) {
  validate(s);
  const int p = s.p, q = s.q, r = s.r;
  switch (s.kind) {
    case VarietyKind::LowRank: {
      const FieldMat g = gaussian(p, r, s.field, rng);
      const FieldMat h = gaussian(q, r, s.field, rng);
      return FieldMat(g.m * h.m.transpose(), s.field);
    }
    case VarietyKind::Symmetric: {
      const FieldMat y = gaussian(p, r, s.field, rng);
      const FieldMat b = gaussian(r, r, s.field, rng);
      const Eigen::MatrixXcd c = symmetrize(b.m);
      return FieldMat(y.m * c * y.m.transpose(), s.field);
    }
    case VarietyKind::Hermitian: {
      const Eigen::MatrixXcd y = gaussian_complex(p, r, rng);
      const Eigen::MatrixXcd c = hermitize(gaussian_complex(r, r, rng));
      return FieldMat::complex(y * c * y.adjoint());
    }
    case VarietyKind::Orthogonal:
      return FieldMat::real(haar_orthogonal(p, rng));
    case VarietyKind::Projection: {
      const Eigen::MatrixXd u = haar_orthogonal(p, rng).leftCols(r);
      return FieldMat::real(u * u.transpose());
    }
    case VarietyKind::RankOnePSD: {
      if (s.field == Field::Real) {
        const Eigen::VectorXd x = gaussian_real(p, 1, rng);
        return FieldMat::real(x * x.transpose());
      }
      const Eigen::VectorXcd x = gaussian_complex(p, 1, rng);
      return FieldMat::complex(x * x.adjoint());
    }
    case VarietyKind::FullSpace:
      return gaussian(p, q, s.field, rng);
  }
  bad_spec("unreachable");
}

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

double rank_excess(const Eigen::MatrixXcd& m, int r) {
  const Eigen::VectorXd sv = singular_values(m);
  if (sv.size() == 0 || sv[0] <= 0.0) return 0.0;
  if (r >= sv.size()) return 0.0;
  return sv[r] / sv[0];
}

}  // namespace

double membership_residual(const VarietySpec& s, const FieldMat& x) {
  validate(s);
  if ((x.field == Field::Complex) != (s.field == Field::Complex))
    return std::numeric_limits<double>::infinity();
  if (x.rows() != s.p || x.cols() != s.q) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd& m = x.m;
  const double scale = std::max(1.0, x.norm());
  switch (s.kind) {
    case VarietyKind::LowRank:
      return rank_excess(m, s.r);
    case VarietyKind::Symmetric:
      return (m - m.transpose()).norm() / scale + rank_excess(m, s.r);
    case VarietyKind::Hermitian:
      return (m - m.adjoint()).norm() / scale + rank_excess(m, s.r);
    case VarietyKind::Orthogonal:
      return (m * m.transpose() - Eigen::MatrixXcd::Identity(s.p, s.p)).norm();
    case VarietyKind::Projection:
      return (m * m - m).norm() + (m - m.transpose()).norm() +
             std::abs(m.trace().real() - static_cast<double>(s.r));
    case VarietyKind::RankOnePSD: {
      const double dev = s.field == Field::Real ? (m - m.transpose()).norm() / scale
                                                : (m - m.adjoint()).norm() / scale;
      const Eigen::VectorXd sv = singular_values(m);
      if (sv.size() == 0 || sv[0] <= 0.0) return dev;
      // leading eigenvalue must be the positive one
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitize(m));
      const double top = eig.eigenvalues().maxCoeff();
      return dev + rank_excess(m, 1) + std::max(0.0, -top) / sv[0] +
             std::abs(top - sv[0]) / sv[0];
    }
    case VarietyKind::FullSpace:
      return 0.0;
  }
  bad_spec("unreachable");
}

namespace {

// Orthonormal column-space basis of a rank-r matrix plus its complement,
// with the stratum check: exactly r singular values above the rank cutoff.
struct RangeSplit {
  Eigen::MatrixXcd u;       // p x r
  Eigen::MatrixXcd u_perp;  // p x (p-r)
};

RangeSplit range_split(const Eigen::MatrixXcd& m, int r, const char* what) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  const int nrank = numerical_rank(sv, m.rows(), m.cols());
  if (nrank < r)
    throw std::runtime_error(std::string(what) +
                             ": point lies on a singular stratum (numerical rank " +
                             std::to_string(nrank) + " < " + std::to_string(r) + ")");
  if (nrank > r)
    throw std::runtime_error(std::string(what) + ": point has rank above the variety bound");
  RangeSplit out;
  out.u = svd.matrixU().leftCols(r);
  out.u_perp = svd.matrixU().rightCols(m.rows() - r);
  return out;
}

// Deterministic greedy pivoted orthogonalization: selects `target` candidate
// indices whose realified vectors are numerically independent.
std::vector<int> pivot_select(const Eigen::MatrixXd& cols, int target) {
  Eigen::MatrixXd w = cols;
  std::vector<bool> used(static_cast<size_t>(cols.cols()), false);
  std::vector<int> chosen;
  chosen.reserve(static_cast<size_t>(target));
  for (int step = 0; step < target; ++step) {
    int best = -1;
    double best_norm = -1.0;
    for (int j = 0; j < cols.cols(); ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      const double n = w.col(j).norm();
      if (n > best_norm) {
        best_norm = n;
        best = j;
      }
    }
    if (best < 0 || best_norm <= 0.0)
      throw std::runtime_error("tangent_basis: pivoted orthogonalization ran out of directions");
    used[static_cast<size_t>(best)] = true;
    chosen.push_back(best);
    const Eigen::VectorXd dir = w.col(best) / best_norm;
    for (int j = 0; j < cols.cols(); ++j)
      if (!used[static_cast<size_t>(j)]) w.col(j) -= dir * dir.dot(w.col(j));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

void push(std::vector<FieldMat>& v, Eigen::MatrixXcd m, Field f) {
  v.emplace_back(std::move(m), f);
}

}  // namespace

TangentBasis tangent_basis(const VarietySpec& s, const FieldMat& x) {
  validate(s);
  const double res = membership_residual(s, x);
  if (!(res <= kMembershipTol))
    throw std::runtime_error("tangent_basis: point is off the variety (residual " +
                             std::to_string(res) + ")");
  const int p = s.p, q = s.q, r = s.r;
  TangentBasis tb;
  tb.spec = s;
  tb.base_point = x;
  tb.counting_field = counting_field(s);

  switch (s.kind) {
    case VarietyKind::LowRank: {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd sv = svd.singularValues();
      const int nrank = numerical_rank(sv, p, q);
      if (nrank != r)
        throw std::runtime_error("tangent_basis: LowRank point is not on the rank-r stratum");
      const Eigen::MatrixXcd u = svd.matrixU();
      const Eigen::MatrixXcd v = svd.matrixV();  // x = u * sv * v^*
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) push(tb.basis, u.col(i) * v.col(j).adjoint(), s.field);
      for (int a = r; a < p; ++a)
        for (int j = 0; j < r; ++j) push(tb.basis, u.col(a) * v.col(j).adjoint(), s.field);
      for (int i = 0; i < r; ++i)
        for (int b = r; b < q; ++b) push(tb.basis, u.col(i) * v.col(b).adjoint(), s.field);
      break;
    }
    case VarietyKind::Symmetric: {
      const RangeSplit rs = range_split(x.m, r, "tangent_basis(Symmetric)");
      const auto& u = rs.u;
      const auto& w = rs.u_perp;
      for (int i = 0; i < r; ++i) push(tb.basis, u.col(i) * u.col(i).transpose(), s.field);
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
          push(tb.basis, u.col(i) * u.col(j).transpose() + u.col(j) * u.col(i).transpose(),
               s.field);
      for (int a = 0; a < p - r; ++a)
        for (int i = 0; i < r; ++i)
          push(tb.basis, w.col(a) * u.col(i).transpose() + u.col(i) * w.col(a).transpose(),
               s.field);
      break;
    }
    case VarietyKind::Hermitian: {
      const RangeSplit rs = range_split(x.m, r, "tangent_basis(Hermitian)");
      const auto& u = rs.u;
      const auto& w = rs.u_perp;
      const Cplx im(0.0, 1.0);
      for (int i = 0; i < r; ++i) push(tb.basis, u.col(i) * u.col(i).adjoint(), s.field);
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
          push(tb.basis, u.col(i) * u.col(j).adjoint() + u.col(j) * u.col(i).adjoint(), s.field);
          push(tb.basis,
               im * (u.col(i) * u.col(j).adjoint()) - im * (u.col(j) * u.col(i).adjoint()),
               s.field);
        }
      for (int a = 0; a < p - r; ++a)
        for (int i = 0; i < r; ++i) {
          push(tb.basis, w.col(a) * u.col(i).adjoint() + u.col(i) * w.col(a).adjoint(), s.field);
          push(tb.basis,
               im * (w.col(a) * u.col(i).adjoint()) - im * (u.col(i) * w.col(a).adjoint()),
               s.field);
        }
      break;
    }
    case VarietyKind::Orthogonal: {
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
          Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(p, p);
          skew(i, j) = 1.0;
          skew(j, i) = -1.0;
          push(tb.basis, skew * x.m, s.field);
        }
      break;
    }
    case VarietyKind::Projection: {
      std::vector<Eigen::MatrixXcd> cand;
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
          Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(p, p);
          skew(i, j) = 1.0;
          skew(j, i) = -1.0;
          cand.push_back(skew * x.m - x.m * skew);
        }
      Eigen::MatrixXd cols(p * p, static_cast<Eigen::Index>(cand.size()));
      for (size_t k = 0; k < cand.size(); ++k)
        cols.col(static_cast<Eigen::Index>(k)) = realify(cand[k], Field::Real);
      const int target = r * (p - r);
      for (int idx : pivot_select(cols, target)) push(tb.basis, cand[static_cast<size_t>(idx)], s.field);
      break;
    }
    case VarietyKind::RankOnePSD: {
      // recover the generating vector from the leading eigenpair
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitize(x.m));
      const int top = static_cast<int>(eig.eigenvalues().size()) - 1;
      const double lam = eig.eigenvalues()[top];
      if (lam <= 0.0)
        throw std::runtime_error("tangent_basis: RankOnePSD point has no positive direction");
      const Eigen::VectorXcd xv = std::sqrt(lam) * eig.eigenvectors().col(top);
      if (s.field == Field::Real) {
        const Eigen::VectorXcd xr = xv.real().cast<Cplx>();
        for (int i = 0; i < p; ++i) {
          Eigen::VectorXcd e = Eigen::VectorXcd::Zero(p);
          e[i] = 1.0;
          push(tb.basis, e * xr.transpose() + xr * e.transpose(), s.field);
        }
      } else {
        const Cplx im(0.0, 1.0);
        std::vector<Eigen::MatrixXcd> cand;
        for (int i = 0; i < p; ++i) {
          Eigen::VectorXcd e = Eigen::VectorXcd::Zero(p);
          e[i] = 1.0;
          cand.push_back(e * xv.adjoint() + xv * e.adjoint());
          const Eigen::MatrixXcd t = im * (e * xv.adjoint());
          cand.push_back(t + t.adjoint());
        }
        Eigen::MatrixXd cols(2 * p * p, static_cast<Eigen::Index>(cand.size()));
        for (size_t k = 0; k < cand.size(); ++k)
          cols.col(static_cast<Eigen::Index>(k)) = realify(cand[k], Field::Complex);
        for (int idx : pivot_select(cols, 2 * p - 1))
          push(tb.basis, cand[static_cast<size_t>(idx)], s.field);
      }
      break;
    }
    case VarietyKind::FullSpace: {
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) {
          Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(p, q);
          e(i, j) = 1.0;
          push(tb.basis, std::move(e), s.field);
        }
      break;
    }
  }

  if (static_cast<int>(tb.basis.size()) != variety_dim(s))
    throw std::runtime_error("tangent_basis: internal count mismatch");
  return tb;
}

Eigen::MatrixXd realified_tangent_rows(const TangentBasis& tb) {
  const bool augment = tb.counting_field == Field::Complex;
  const Eigen::Index n = static_cast<Eigen::Index>(tb.basis.size());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::Index width = realify(tb.basis[0]).size();
  Eigen::MatrixXd rows(augment ? 2 * n : n, width);
  const Cplx im(0.0, 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    rows.row(augment ? 2 * k : k) = realify(tb.basis[static_cast<size_t>(k)]).transpose();
    if (augment)
      rows.row(2 * k + 1) =
          realify(Eigen::MatrixXcd(im * tb.basis[static_cast<size_t>(k)].m), Field::Complex)
              .transpose();
  }
  return rows;
}

double distance_to_variety(const VarietySpec& s, const FieldMat& x) {
  validate(s);
  const Eigen::MatrixXcd& m = x.m;
  switch (s.kind) {
    case VarietyKind::LowRank:
    case VarietyKind::Symmetric: {
      // rank truncation; symmetric inputs have symmetric truncations
      const Eigen::VectorXd sv = singular_values(m);
      double acc = 0.0;
      for (Eigen::Index i = s.r; i < sv.size(); ++i) acc += sv[i] * sv[i];
      return std::sqrt(acc);
    }
    case VarietyKind::Hermitian: {
      const Eigen::MatrixXcd h = hermitize(m);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
      Eigen::VectorXd lam = eig.eigenvalues();
      std::vector<int> order(static_cast<size_t>(lam.size()));
      for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return std::abs(lam[a]) > std::abs(lam[b]); });
      Eigen::VectorXd kept = Eigen::VectorXd::Zero(lam.size());
      for (int i = 0; i < s.r && i < static_cast<int>(order.size()); ++i)
        kept[order[static_cast<size_t>(i)]] = lam[order[static_cast<size_t>(i)]];
      const Eigen::MatrixXcd approx =
          eig.eigenvectors() * kept.cast<Cplx>().asDiagonal() * eig.eigenvectors().adjoint();
      return (m - approx).norm();
    }
    case VarietyKind::Orthogonal: {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::MatrixXcd polar = svd.matrixU() * svd.matrixV().adjoint();
      return (m - polar).norm();
    }
    case VarietyKind::Projection: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitize(m));
      Eigen::VectorXd lam = eig.eigenvalues();  // ascending
      Eigen::VectorXd rounded = Eigen::VectorXd::Zero(lam.size());
      for (Eigen::Index i = lam.size() - s.r; i < lam.size(); ++i) rounded[i] = 1.0;
      const Eigen::MatrixXcd approx =
          eig.eigenvectors() * rounded.cast<Cplx>().asDiagonal() * eig.eigenvectors().adjoint();
      return (m - approx).norm();
    }
    case VarietyKind::RankOnePSD: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hermitize(m));
      const int top = static_cast<int>(eig.eigenvalues().size()) - 1;
      const double lam = std::max(0.0, eig.eigenvalues()[top]);
      const Eigen::MatrixXcd approx =
          lam * (eig.eigenvectors().col(top) * eig.eigenvectors().col(top).adjoint());
      return (m - approx).norm();
    }
    case VarietyKind::FullSpace:
      return 0.0;
  }
  bad_spec("unreachable");
}

std::string format(const VarietySpec& s) {
  std::ostringstream os;
  switch (s.kind) {
    case VarietyKind::LowRank:
      os << "lowrank:" << s.p << "x" << s.q << ":r" << s.r << ":" << to_string(s.field);
      break;
    case VarietyKind::Symmetric:
      os << "sym:" << s.p << ":r" << s.r;
      if (s.field == Field::Complex) os << ":C";
      break;
    case VarietyKind::Hermitian:
      os << "herm:" << s.p << ":r" << s.r;
      break;
    case VarietyKind::Orthogonal:
      os << "orth:" << s.p;
      break;
    case VarietyKind::Projection:
      os << "proj:" << s.p << ":r" << s.r;
      break;
    case VarietyKind::RankOnePSD:
      os << "rank1psd:" << s.p << ":" << to_string(s.field);
      break;
    case VarietyKind::FullSpace:
      os << "full:" << s.p << "x" << s.q << ":" << to_string(s.field);
      break;
  }
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& tok, const std::string& ctx) {
  try {
    size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse integer '" + tok + "' in " + ctx);
  }
}

}  // namespace

VarietySpec parse_variety(const std::string& text) {
  const auto toks = split(text, ':');
  if (toks.empty() || toks[0].empty()) throw std::invalid_argument("empty variety spec");
  const std::string& kind = toks[0];
  VarietySpec s;
  bool have_shape = false;
  int rank = -1;
  Field field = Field::Real;
  bool have_field = false;
  for (size_t i = 1; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t.empty()) throw std::invalid_argument("empty token in variety spec '" + text + "'");
    if (t == "R" || t == "C" || t == "r" || t == "c") {
      // bare "r"/"c" would be ambiguous with a rank prefix; ranks are "r<k>"
      field = field_from_string(t);
      have_field = true;
    } else if ((t[0] == 'r' || t[0] == 's') && t.size() > 1 && std::isdigit(t[1])) {
      rank = parse_int(t.substr(1), text);
    } else if (t.find('x') != std::string::npos) {
      const auto pq = split(t, 'x');
      if (pq.size() != 2) throw std::invalid_argument("bad shape token in '" + text + "'");
      s.p = parse_int(pq[0], text);
      s.q = parse_int(pq[1], text);
      have_shape = true;
    } else if (std::isdigit(t[0])) {
      s.p = parse_int(t, text);
      s.q = s.p;
      have_shape = true;
    } else {
      throw std::invalid_argument("unknown token '" + t + "' in variety spec '" + text + "'");
    }
  }
  if (!have_shape) throw std::invalid_argument("variety spec '" + text + "' has no shape");

  if (kind == "lowrank") {
    s.kind = VarietyKind::LowRank;
    s.field = have_field ? field : Field::Real;
    s.r = rank;
  } else if (kind == "sym") {
    s.kind = VarietyKind::Symmetric;
    s.field = have_field ? field : Field::Real;
    s.r = rank;
  } else if (kind == "herm") {
    s.kind = VarietyKind::Hermitian;
    s.field = Field::Complex;
    s.r = rank;
  } else if (kind == "orth") {
    s.kind = VarietyKind::Orthogonal;
    s.field = Field::Real;
  } else if (kind == "proj") {
    s.kind = VarietyKind::Projection;
    s.field = Field::Real;
    s.r = rank;
  } else if (kind == "rank1psd") {
    s.kind = VarietyKind::RankOnePSD;
    s.field = have_field ? field : Field::Real;
  } else if (kind == "full") {
    s.kind = VarietyKind::FullSpace;
    s.field = have_field ? field : Field::Real;
  } else {
    throw std::invalid_argument("unknown variety kind '" + kind + "'");
  }
  if (s.r < 0 &&
      (s.kind == VarietyKind::LowRank || s.kind == VarietyKind::Symmetric ||
       s.kind == VarietyKind::Hermitian || s.kind == VarietyKind::Projection))
    throw std::invalid_argument("variety spec '" + text + "' needs a rank token r<k>");
  validate(s);
  return s;
}

}  // namespace matrec
