#include "matrec/core.hpp"

#include <limits>
#include <stdexcept>

namespace matrec {

namespace {

bool imag_is_zero(const Eigen::MatrixXcd& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

FieldMat::FieldMat(Eigen::MatrixXcd mat, Field f) : m(std::move(mat)), field(f) {
  if (field == Field::Real && !imag_is_zero(m))
    throw std::invalid_argument("FieldMat: Real tag on a matrix with nonzero imaginary parts");
}

FieldMat FieldMat::real(const Eigen::MatrixXd& mat) {
  FieldMat out;
  out.m = mat.cast<Cplx>();
  out.field = Field::Real;
  return out;
}

FieldMat FieldMat::complex(Eigen::MatrixXcd mat) {
  FieldMat out;
  out.m = std::move(mat);
  out.field = Field::Complex;
  return out;
}

FieldMat FieldMat::zero(Eigen::Index rows, Eigen::Index cols, Field f) {
  FieldMat out;
  out.m = Eigen::MatrixXcd::Zero(rows, cols);
  out.field = f;
  return out;
}

void require_same_shape(const FieldMat& a, const FieldMat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

void require_same_field(const FieldMat& a, const FieldMat& b, const char* what) {
  if (a.field != b.field) throw std::invalid_argument(std::string(what) + ": field mismatch");
}

Cplx trace_inner(const FieldMat& a, const FieldMat& p) {
  require_same_shape(a, p, "trace_inner");
  require_same_field(a, p, "trace_inner");
  return trace_inner(a.m, p.m);
}

Eigen::VectorXd realify(const Eigen::MatrixXcd& m, Field field) {
  const Eigen::Index n = m.size();
  if (field == Field::Real) {
    Eigen::VectorXd out(n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out[k++] = m(i, j).real();
    return out;
  }
  Eigen::VectorXd out(2 * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[k++] = m(i, j).real();
      out[k++] = m(i, j).imag();
    }
  return out;
}

Eigen::VectorXd realify(const FieldMat& m) { return realify(m.m, m.field); }

Eigen::VectorXd realify(const MeasVec& v) {
  if (v.field == Field::Real) return v.values.real();
  Eigen::VectorXd out(2 * v.values.size());
  for (Eigen::Index j = 0; j < v.values.size(); ++j) {
    out[2 * j] = v.values[j].real();
    out[2 * j + 1] = v.values[j].imag();
  }
  return out;
}

FieldMat unrealify(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols, Field field) {
  const Eigen::Index per = field == Field::Real ? 1 : 2;
  if (v.size() != per * rows * cols)
    throw std::invalid_argument("unrealify: coordinate count does not match shape/field");
  Eigen::MatrixXcd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (field == Field::Real) {
        m(i, j) = Cplx(v[k++], 0.0);
      } else {
        const double re = v[k++];
        const double im = v[k++];
        m(i, j) = Cplx(re, im);
      }
    }
  return FieldMat(std::move(m), field);
}

double hermitian_deviation(const Eigen::MatrixXcd& p) {
  if (p.rows() != p.cols()) return std::numeric_limits<double>::infinity();
  const double num = (p - p.adjoint()).norm();
  return num / std::max(1.0, p.norm());
}

double quad_form(const Eigen::VectorXcd& x, const FieldMat& p) {
  if (x.size() != p.rows() || p.rows() != p.cols())
    throw std::invalid_argument("quad_form: vector/matrix shape mismatch");
  if (hermitian_deviation(p.m) > kHermitianTol)
    throw std::invalid_argument("quad_form: matrix is not Hermitian within tolerance");
  const Cplx v = x.adjoint() * p.m * x;
  return v.real();
}

Eigen::MatrixXd gaussian_real(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.gauss();
  return m;
}

Eigen::MatrixXcd gaussian_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = rng.gauss();
      const double im = rng.gauss();
      m(i, j) = Cplx(re, im);
    }
  return m;
}

FieldMat gaussian(Eigen::Index rows, Eigen::Index cols, Field field, Rng& rng) {
  if (field == Field::Real) return FieldMat::real(gaussian_real(rows, cols, rng));
  return FieldMat::complex(gaussian_complex(rows, cols, rng));
}

}  // namespace matrec
