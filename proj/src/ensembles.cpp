#include "matrec/ensembles.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace matrec {

namespace {

[[noreturn]] void bad_spec(const std::string& why) {
  throw std::invalid_argument("EnsembleSpec: " + why);
}

const char* kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::Gaussian: return "gauss";
    case EnsembleKind::LowRankMeas: return "lowrankmeas";
    case EnsembleKind::OrthogonalMeas: return "orthmeas";
    case EnsembleKind::ProjectionMeas: return "projmeas";
    case EnsembleKind::RankOneSym: return "rank1sym";
    case EnsembleKind::RankOneHerm: return "rank1herm";
  }
  return "?";
}

EnsembleKind kind_from_name(const std::string& s) {
  if (s == "gauss") return EnsembleKind::Gaussian;
  if (s == "lowrankmeas") return EnsembleKind::LowRankMeas;
  if (s == "orthmeas") return EnsembleKind::OrthogonalMeas;
  if (s == "projmeas") return EnsembleKind::ProjectionMeas;
  if (s == "rank1sym") return EnsembleKind::RankOneSym;
  if (s == "rank1herm") return EnsembleKind::RankOneHerm;
  throw std::invalid_argument("unknown ensemble kind '" + s + "'");
}

}  // namespace

void validate(const EnsembleSpec& s) {
  if (s.N < 0) bad_spec("N must be nonnegative");
  if (s.p < 1 || s.q < 1) bad_spec("shape must be positive");
  switch (s.kind) {
    case EnsembleKind::Gaussian:
      break;
    case EnsembleKind::LowRankMeas:
      if (s.s < 1 || s.s > std::min(s.p, s.q)) bad_spec("LowRankMeas needs 1 <= s <= min(p,q)");
      break;
    case EnsembleKind::OrthogonalMeas:
      if (s.p != s.q) bad_spec("OrthogonalMeas needs p == q");
      if (s.field != Field::Real) bad_spec("OrthogonalMeas requires the real field");
      break;
    case EnsembleKind::ProjectionMeas:
      if (s.p != s.q) bad_spec("ProjectionMeas needs p == q");
      if (s.field != Field::Real) bad_spec("ProjectionMeas requires the real field");
      if (s.s < 1 || s.s > s.p - 1) bad_spec("ProjectionMeas needs 1 <= s <= d-1");
      break;
    case EnsembleKind::RankOneSym:
      if (s.p != s.q) bad_spec("RankOneSym needs p == q");
      if (s.field != Field::Real) bad_spec("RankOneSym requires the real field");
      break;
    case EnsembleKind::RankOneHerm:
      if (s.p != s.q) bad_spec("RankOneHerm needs p == q");
      if (s.field != Field::Complex) bad_spec("RankOneHerm requires the complex field");
      break;
  }
}

Field measurement_scalar_field(const EnsembleSpec& s) {
  if (s.kind == EnsembleKind::RankOneSym || s.kind == EnsembleKind::RankOneHerm)
    return Field::Real;
  return s.field;
}

VarietySpec measurement_variety_of(const EnsembleSpec& s) {
  validate(s);
  switch (s.kind) {
    case EnsembleKind::Gaussian: return VarietySpec::full_space(s.p, s.q, s.field);
    case EnsembleKind::LowRankMeas: return VarietySpec::low_rank(s.p, s.q, s.s, s.field);
    case EnsembleKind::OrthogonalMeas: return VarietySpec::orthogonal(s.p);
    case EnsembleKind::ProjectionMeas: return VarietySpec::projection(s.p, s.s);
    case EnsembleKind::RankOneSym: return VarietySpec::symmetric(s.p, 1);
    case EnsembleKind::RankOneHerm: return VarietySpec::hermitian(s.p, 1);
  }
  bad_spec("unreachable");
}

MeasurementEnsemble generate(const EnsembleSpec& s) {
  validate(s);
  MeasurementEnsemble out;
  out.spec = s;
  out.scalar_field = measurement_scalar_field(s);
  out.matrices.reserve(static_cast<size_t>(s.N));
  for (int j = 0; j < s.N; ++j) {
    Rng rng(derive(s.seed, static_cast<std::uint64_t>(j)));
    switch (s.kind) {
      case EnsembleKind::Gaussian:
        out.matrices.push_back(gaussian(s.p, s.q, s.field, rng));
        break;
      case EnsembleKind::LowRankMeas:
        out.matrices.push_back(sample_point(VarietySpec::low_rank(s.p, s.q, s.s, s.field), rng));
        break;
      case EnsembleKind::OrthogonalMeas:
        out.matrices.push_back(FieldMat::real(haar_orthogonal(s.p, rng)));
        break;
      case EnsembleKind::ProjectionMeas: {
        const Eigen::MatrixXd u = haar_orthogonal(s.p, rng).leftCols(s.s);
        out.matrices.push_back(FieldMat::real(u * u.transpose()));
        break;
      }
      case EnsembleKind::RankOneSym: {
        const Eigen::VectorXd x = gaussian_real(s.p, 1, rng);
        out.vectors.push_back(x.cast<Cplx>());
        out.matrices.push_back(FieldMat::real(x * x.transpose()));
        break;
      }
      case EnsembleKind::RankOneHerm: {
        const Eigen::VectorXcd x = gaussian_complex(s.p, 1, rng);
        out.vectors.push_back(x);
        out.matrices.push_back(FieldMat::complex(x * x.adjoint()));
        break;
      }
    }
  }
  return out;
}

MeasVec apply_measurement_map(const MeasurementEnsemble& e, const FieldMat& p) {
  MeasVec out;
  out.field = e.scalar_field;
  out.values.resize(e.size());
  if (e.rank_one_quadratic()) {
    if (p.rows() != e.spec.p || p.cols() != e.spec.q)
      throw std::invalid_argument("apply_measurement_map: shape mismatch");
    if (e.spec.kind == EnsembleKind::RankOneHerm && p.field != Field::Complex)
      throw std::invalid_argument("apply_measurement_map: field mismatch");
    if (hermitian_deviation(p.m) > kHermitianTol)
      throw std::invalid_argument(
          "apply_measurement_map: rank-one quadratic readout needs a Hermitian matrix");
    for (int j = 0; j < e.size(); ++j) {
      const Eigen::VectorXcd& x = e.vectors[static_cast<size_t>(j)];
      const Cplx v = x.adjoint() * p.m * x;
      out.values[j] = Cplx(v.real(), 0.0);
    }
    return out;
  }
  for (int j = 0; j < e.size(); ++j)
    out.values[j] = trace_inner(e.matrices[static_cast<size_t>(j)], p);
  return out;
}

std::string format(const EnsembleSpec& s) {
  std::ostringstream os;
  os << kind_name(s.kind) << ":N" << s.N << ":";
  if (s.p == s.q &&
      (s.kind == EnsembleKind::OrthogonalMeas || s.kind == EnsembleKind::ProjectionMeas ||
       s.kind == EnsembleKind::RankOneSym || s.kind == EnsembleKind::RankOneHerm))
    os << s.p;
  else
    os << s.p << "x" << s.q;
  if (s.kind == EnsembleKind::LowRankMeas || s.kind == EnsembleKind::ProjectionMeas)
    os << ":s" << s.s;
  if (s.kind == EnsembleKind::Gaussian || s.kind == EnsembleKind::LowRankMeas)
    os << ":" << to_string(s.field);
  os << ":seed" << s.seed;
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

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

std::uint64_t parse_u64(const std::string& tok, const std::string& ctx) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse integer '" + tok + "' in " + ctx);
  }
}

}  // namespace

EnsembleSpec parse_ensemble(const std::string& text) {
  const auto toks = split(text, ':');
  if (toks.empty() || toks[0].empty()) throw std::invalid_argument("empty ensemble spec");
  EnsembleSpec s;
  s.kind = kind_from_name(toks[0]);
  // field implied by the kind; gauss/lowrankmeas default to R unless tagged
  switch (s.kind) {
    case EnsembleKind::RankOneHerm: s.field = Field::Complex; break;
    default: s.field = Field::Real; break;
  }
  bool have_shape = false;
  bool have_n = false;
  for (size_t i = 1; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t.empty()) throw std::invalid_argument("empty token in ensemble spec '" + text + "'");
    if (t == "R" || t == "C") {
      s.field = field_from_string(t);
    } else if (starts_with(t, "seed")) {
      s.seed = parse_u64(t.substr(4), text);
    } else if (t[0] == 'N' && t.size() > 1) {
      s.N = static_cast<int>(parse_u64(t.substr(1), text));
      have_n = true;
    } else if (t[0] == 's' && t.size() > 1 && std::isdigit(static_cast<unsigned char>(t[1]))) {
      s.s = static_cast<int>(parse_u64(t.substr(1), text));
    } else if (t.find('x') != std::string::npos) {
      const auto pq = split(t, 'x');
      if (pq.size() != 2) throw std::invalid_argument("bad shape token in '" + text + "'");
      s.p = static_cast<int>(parse_u64(pq[0], text));
      s.q = static_cast<int>(parse_u64(pq[1], text));
      have_shape = true;
    } else if (std::isdigit(static_cast<unsigned char>(t[0]))) {
      s.p = static_cast<int>(parse_u64(t, text));
      s.q = s.p;
      have_shape = true;
    } else {
      throw std::invalid_argument("unknown token '" + t + "' in ensemble spec '" + text + "'");
    }
  }
  if (!have_shape) throw std::invalid_argument("ensemble spec '" + text + "' has no shape");
  if (!have_n) throw std::invalid_argument("ensemble spec '" + text + "' has no N token");
  validate(s);
  return s;
}

EnsembleKindSpec parse_ensemble_kind(const std::string& text) {
  const auto toks = split(text, ':');
  if (toks.empty() || toks[0].empty()) throw std::invalid_argument("empty ensemble kind");
  EnsembleKindSpec k;
  k.kind = kind_from_name(toks[0]);
  for (size_t i = 1; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t.size() > 1 && t[0] == 's' && std::isdigit(static_cast<unsigned char>(t[1])))
      k.s = static_cast<int>(parse_u64(t.substr(1), text));
    else
      throw std::invalid_argument("unknown token '" + t + "' in ensemble kind '" + text + "'");
  }
  const bool needs_rank =
      k.kind == EnsembleKind::LowRankMeas || k.kind == EnsembleKind::ProjectionMeas;
  if (needs_rank && k.s < 1)
    throw std::invalid_argument("ensemble kind '" + text + "' needs a rank token s<k>");
  if (!needs_rank && k.s != 0)
    throw std::invalid_argument("ensemble kind '" + text + "' does not take a rank token");
  return k;
}

std::string format(const EnsembleKindSpec& k) {
  std::string out = kind_name(k.kind);
  if (k.kind == EnsembleKind::LowRankMeas || k.kind == EnsembleKind::ProjectionMeas)
    out += ":s" + std::to_string(k.s);
  return out;
}

nlohmann::ordered_json matrix_to_json(const FieldMat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m.m(i, j).real(), m.m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["field"] = to_string(m.field);
  out["entries"] = std::move(rows);
  return out;
}

FieldMat matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const Field field = field_from_string(j.at("field").get<std::string>());
  const auto& entries = j.at("entries");
  if (static_cast<Eigen::Index>(entries.size()) != rows)
    throw std::invalid_argument("matrix json: row count mismatch");
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = entries.at(static_cast<size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix json: column count mismatch");
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      const auto& pair = row.at(static_cast<size_t>(jj));
      m(i, jj) = Cplx(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  }
  return FieldMat(std::move(m), field);
}

nlohmann::ordered_json meas_to_json(const MeasVec& v) {
  nlohmann::ordered_json out;
  out["schema"] = 1;
  out["field"] = to_string(v.field);
  nlohmann::ordered_json values = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.values.size(); ++i)
    values.push_back({v.values[i].real(), v.values[i].imag()});
  out["values"] = std::move(values);
  return out;
}

MeasVec meas_from_json(const nlohmann::json& j) {
  MeasVec v;
  v.field = field_from_string(j.at("field").get<std::string>());
  const auto& values = j.at("values");
  v.values.resize(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < v.values.size(); ++i) {
    const auto& pair = values.at(static_cast<size_t>(i));
    v.values[i] = Cplx(pair.at(0).get<double>(), pair.at(1).get<double>());
  }
  return v;
}

nlohmann::ordered_json to_json(const MeasurementEnsemble& e) {
  nlohmann::ordered_json out;
  out["schema"] = 1;
  out["kind"] = kind_name(e.spec.kind);
  out["N"] = e.spec.N;
  out["p"] = e.spec.p;
  out["q"] = e.spec.q;
  if (e.spec.kind == EnsembleKind::LowRankMeas || e.spec.kind == EnsembleKind::ProjectionMeas)
    out["s"] = e.spec.s;
  out["field"] = to_string(e.spec.field);
  out["seed"] = e.spec.seed;
  out["measurement_scalar_field"] = to_string(e.scalar_field);
  nlohmann::ordered_json mats = nlohmann::ordered_json::array();
  for (const FieldMat& m : e.matrices) mats.push_back(matrix_to_json(m));
  out["matrices"] = std::move(mats);
  if (!e.vectors.empty()) {
    nlohmann::ordered_json vecs = nlohmann::ordered_json::array();
    for (const Eigen::VectorXcd& x : e.vectors) {
      nlohmann::ordered_json v = nlohmann::ordered_json::array();
      for (Eigen::Index i = 0; i < x.size(); ++i) v.push_back({x[i].real(), x[i].imag()});
      vecs.push_back(std::move(v));
    }
    out["vectors"] = std::move(vecs);
  }
  return out;
}

MeasurementEnsemble ensemble_from_json(const nlohmann::json& j) {
  MeasurementEnsemble e;
  e.spec.kind = kind_from_name(j.at("kind").get<std::string>());
  e.spec.N = j.at("N").get<int>();
  e.spec.p = j.at("p").get<int>();
  e.spec.q = j.at("q").get<int>();
  e.spec.s = j.value("s", 0);
  e.spec.field = field_from_string(j.at("field").get<std::string>());
  e.spec.seed = j.at("seed").get<std::uint64_t>();
  validate(e.spec);
  e.scalar_field = measurement_scalar_field(e.spec);
  for (const auto& mj : j.at("matrices")) e.matrices.push_back(matrix_from_json(mj));
  if (static_cast<int>(e.matrices.size()) != e.spec.N)
    throw std::invalid_argument("ensemble json: matrix count does not match N");
  if (j.contains("vectors")) {
    for (const auto& vj : j.at("vectors")) {
      Eigen::VectorXcd x(static_cast<Eigen::Index>(vj.size()));
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto& pair = vj.at(static_cast<size_t>(i));
        x[i] = Cplx(pair.at(0).get<double>(), pair.at(1).get<double>());
      }
      e.vectors.push_back(std::move(x));
    }
  }
  if (e.rank_one_quadratic() && e.vectors.size() != e.matrices.size())
    throw std::invalid_argument("ensemble json: rank-one ensemble without generating vectors");
  return e;
}

}  // namespace matrec
