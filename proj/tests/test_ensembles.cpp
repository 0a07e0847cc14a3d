#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "matrec/ensembles.hpp"

using namespace matrec;

TEST_CASE("generation is a pure function of the spec") {
  EnsembleSpec s{EnsembleKind::Gaussian, 5, 3, 4, 0, Field::Real, 7};
  const MeasurementEnsemble a = generate(s);
  const MeasurementEnsemble b = generate(s);
  REQUIRE(a.size() == 5);
  for (int j = 0; j < 5; ++j)
    CHECK((a.matrices[j].m - b.matrices[j].m).norm() == 0.0);
  s.seed = 8;
  const MeasurementEnsemble c = generate(s);
  CHECK((a.matrices[0].m - c.matrices[0].m).norm() > 0.0);
}

TEST_CASE("matrices do not depend on the ensemble size") {
  // per-index seeding: the first 3 matrices of an N=6 draw match an N=3 draw
  EnsembleSpec small{EnsembleKind::Gaussian, 3, 4, 4, 0, Field::Complex, 11};
  EnsembleSpec big = small;
  big.N = 6;
  const MeasurementEnsemble a = generate(small);
  const MeasurementEnsemble b = generate(big);
  for (int j = 0; j < 3; ++j) CHECK((a.matrices[j].m - b.matrices[j].m).norm() == 0.0);
}

TEST_CASE("projection measurements satisfy their defining equations") {
  EnsembleSpec s{EnsembleKind::ProjectionMeas, 4, 5, 5, 2, Field::Real, 3};
  const MeasurementEnsemble e = generate(s);
  for (const FieldMat& a : e.matrices) {
    CHECK((a.m * a.m - a.m).norm() <= 1e-10);
    CHECK(std::abs(a.m.trace().real() - 2.0) <= 1e-9);
  }
}

TEST_CASE("rank-one Hermitian measurements are PSD of rank one") {
  EnsembleSpec s{EnsembleKind::RankOneHerm, 6, 3, 3, 0, Field::Complex, 5};
  const MeasurementEnsemble e = generate(s);
  REQUIRE(e.vectors.size() == 6);
  for (const FieldMat& a : e.matrices) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a.m);
    const Eigen::VectorXd lam = eig.eigenvalues();  // ascending
    CHECK(lam[2] > 0.0);
    CHECK(std::abs(lam[1]) <= 1e-10 * lam[2]);
    CHECK(std::abs(lam[0]) <= 1e-10 * lam[2]);
  }
  CHECK(e.scalar_field == Field::Real);
}

TEST_CASE("every measurement lies on its measurement variety") {
  const std::vector<EnsembleSpec> specs = {
      {EnsembleKind::Gaussian, 3, 3, 4, 0, Field::Complex, 1},
      {EnsembleKind::LowRankMeas, 3, 5, 4, 2, Field::Real, 2},
      {EnsembleKind::OrthogonalMeas, 3, 4, 4, 0, Field::Real, 3},
      {EnsembleKind::ProjectionMeas, 3, 4, 4, 1, Field::Real, 4},
      {EnsembleKind::RankOneSym, 3, 4, 4, 0, Field::Real, 5},
      {EnsembleKind::RankOneHerm, 3, 4, 4, 0, Field::Complex, 6},
  };
  for (const EnsembleSpec& s : specs) {
    CAPTURE(format(s));
    const VarietySpec v = measurement_variety_of(s);
    for (const FieldMat& a : generate(s).matrices) CHECK(membership_residual(v, a) <= 1e-10);
  }
}

TEST_CASE("measurement variety mapping") {
  EnsembleSpec g{EnsembleKind::Gaussian, 1, 4, 4, 0, Field::Complex, 0};
  CHECK(measurement_variety_of(g).kind == VarietyKind::FullSpace);
  EnsembleSpec r1{EnsembleKind::RankOneSym, 1, 5, 5, 0, Field::Real, 0};
  const VarietySpec v1 = measurement_variety_of(r1);
  CHECK(v1.kind == VarietyKind::Symmetric);
  CHECK(v1.r == 1);
  EnsembleSpec o{EnsembleKind::OrthogonalMeas, 1, 3, 3, 0, Field::Real, 0};
  CHECK(measurement_variety_of(o).kind == VarietyKind::Orthogonal);
}

TEST_CASE("gaussian draws have the right moments") {
  EnsembleSpec s{EnsembleKind::Gaussian, 10000, 1, 1, 0, Field::Real, 99};
  const MeasurementEnsemble e = generate(s);
  double sum = 0.0, sumsq = 0.0;
  for (const FieldMat& a : e.matrices) {
    const double v = a.m(0, 0).real();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / 10000.0;
  const double var = sumsq / 10000.0 - mean * mean;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(10000.0));
  CHECK(std::abs(var - 1.0) <= 0.1);
}

TEST_CASE("measurement map is linear and obeys the spec examples") {
  Rng rng(31);
  EnsembleSpec s{EnsembleKind::Gaussian, 6, 3, 4, 0, Field::Complex, 17};
  const MeasurementEnsemble e = generate(s);
  SUBCASE("zero matrix maps to zero") {
    const MeasVec b = apply_measurement_map(e, FieldMat::zero(3, 4, Field::Complex));
    CHECK(b.values.norm() == 0.0);
  }
  SUBCASE("linearity within 1e-12 relative") {
    for (int t = 0; t < 20; ++t) {
      const FieldMat p = gaussian(3, 4, Field::Complex, rng);
      const FieldMat q = gaussian(3, 4, Field::Complex, rng);
      const double alpha = rng.gauss();
      const MeasVec lhs = apply_measurement_map(e, FieldMat(p.m + alpha * q.m, Field::Complex));
      const Eigen::VectorXcd rhs =
          apply_measurement_map(e, p).values + alpha * apply_measurement_map(e, q).values;
      CHECK((lhs.values - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("coordinate functional ensemble") {
  // a single E_11 measurement reads off P_11
  MeasurementEnsemble e;
  e.spec = EnsembleSpec{EnsembleKind::Gaussian, 1, 2, 2, 0, Field::Real, 0};
  Eigen::MatrixXd e11 = Eigen::MatrixXd::Zero(2, 2);
  e11(0, 0) = 1.0;
  e.matrices.push_back(FieldMat::real(e11));
  e.scalar_field = Field::Real;
  Eigen::MatrixXd p(2, 2);
  p << 3, 1, 4, 1;
  const MeasVec b = apply_measurement_map(e, FieldMat::real(p));
  CHECK(b.values[0].real() == doctest::Approx(3.0));
}

TEST_CASE("hermitian readout picks the diagonal and rejects bad input") {
  EnsembleSpec s{EnsembleKind::RankOneHerm, 1, 2, 2, 0, Field::Complex, 123};
  MeasurementEnsemble e = generate(s);
  e.vectors[0] = Eigen::VectorXcd::Zero(2);
  e.vectors[0][0] = 1.0;  // x = e_1
  Eigen::MatrixXcd diag(2, 2);
  diag << Cplx(5, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-2, 0);
  const MeasVec b = apply_measurement_map(e, FieldMat::complex(diag));
  CHECK(b.values[0].real() == doctest::Approx(5.0));
  CHECK(b.field == Field::Real);

  Rng rng(32);
  const FieldMat nonherm = gaussian(2, 2, Field::Complex, rng);
  CHECK_THROWS_AS((void)apply_measurement_map(e, nonherm), std::invalid_argument);
}

TEST_CASE("ensemble text forms round trip") {
  const std::vector<std::string> texts = {
      "gauss:N20:4x4:C:seed7",   "rank1herm:N9:4:seed3",      "rank1sym:N5:4:seed0",
      "orthmeas:N3:5:seed12",    "projmeas:N4:5:s2:seed1",    "lowrankmeas:N6:5x4:s2:R:seed9",
      "gauss:N0:2x3:R:seed4",
  };
  for (const std::string& t : texts) {
    CAPTURE(t);
    const EnsembleSpec s = parse_ensemble(t);
    CHECK(format(s) == t);
  }
  CHECK_THROWS_AS((void)parse_ensemble("gauss:4x4:C:seed7"), std::invalid_argument);  // no N
  CHECK_THROWS_AS((void)parse_ensemble("rank1herm:N3:4x5:seed1"), std::invalid_argument);
  CHECK(parse_ensemble_kind("lowrankmeas:s2").s == 2);
  CHECK(format(parse_ensemble_kind("rank1sym")) == "rank1sym");
  CHECK_THROWS_AS((void)parse_ensemble_kind("projmeas"), std::invalid_argument);
}

TEST_CASE("ensemble json round trip") {
  EnsembleSpec s{EnsembleKind::RankOneHerm, 3, 3, 3, 0, Field::Complex, 42};
  const MeasurementEnsemble e = generate(s);
  const nlohmann::ordered_json j = to_json(e);
  const MeasurementEnsemble back = ensemble_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.size() == e.size());
  for (int k = 0; k < e.size(); ++k)
    CHECK((back.matrices[k].m - e.matrices[k].m).norm() == 0.0);
  for (size_t k = 0; k < e.vectors.size(); ++k)
    CHECK((back.vectors[k] - e.vectors[k]).norm() == 0.0);
  // identical serialization both ways
  CHECK(to_json(back).dump() == j.dump());

  // corrupted documents are rejected
  nlohmann::json tampered = nlohmann::json::parse(j.dump());
  tampered["N"] = 5;
  CHECK_THROWS_AS((void)ensemble_from_json(tampered), std::invalid_argument);
  nlohmann::json no_vectors = nlohmann::json::parse(j.dump());
  no_vectors.erase("vectors");
  CHECK_THROWS_AS((void)ensemble_from_json(no_vectors), std::invalid_argument);
}
