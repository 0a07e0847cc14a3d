#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace matrec {

/// Scalar field of a matrix, ensemble, or scenario.
enum class Field { Real, Complex };

using Cplx = std::complex<double>;

inline const char* to_string(Field f) { return f == Field::Real ? "R" : "C"; }

inline Field field_from_string(const std::string& s) {
  if (s == "R" || s == "r") return Field::Real;
  if (s == "C" || s == "c") return Field::Complex;
  throw std::invalid_argument("unknown field tag '" + s + "' (expected R or C)");
}

}  // namespace matrec
