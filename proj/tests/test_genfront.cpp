#include <catch_amalgamated.hpp>

#include "torsionlab/genfront.hpp"

using namespace torsionlab;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoFailure;
}

// v⁴ declared as if it were the quadratic v².
GeneratingFunction quartic(AtlasPtr at) {
  GeneratingFunction f;
  f.atlas = at;
  f.N = 1;
  f.name = "quartic";
  const int d = at->dim();
  f.eval = [d](int, const Coords&, const Eigen::VectorXd& v) {
    GFValue e;
    const double x = v[0];
    e.value = x * x * x * x;
    e.grad_v = Eigen::VectorXd::Constant(1, 4 * x * x * x);
    e.hess_vv = Eigen::MatrixXd::Constant(1, 1, 12 * x * x);
    e.mixed = Eigen::MatrixXd::Zero(1, d);
    e.grad_m = Eigen::VectorXd::Zero(d);
    return e;
  };
  f.shape = AdmissibleShape{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1), {}, 1.0, 1e-6};
  f.seeds = {Eigen::VectorXd::Zero(1)};
  return f;
}

} // namespace

TEST_CASE("fold front follows z = ∓2 t^{3/2}") {
  const GeneratingFunction f = presets::cubic_fold(101);
  FrontDiagram fd = fiberwise_critical_locus(f);
  std::size_t upper = 0, lower = 0;
  for (const SheetPoint& s : fd.sheets) {
    const double t = s.m[0];
    REQUIRE(t >= -1e-12);
    if (t < 1e-3) continue;
    const double x = std::sqrt(t);
    if (s.v[0] > 0) {
      ++upper;
      CHECK_THAT(s.v[0], WithinAbs(x, 1e-9));
      CHECK_THAT(s.z, WithinAbs(-2.0 * t * x, 1e-9));
      CHECK(s.index == 0);
      CHECK_THAT(s.p[0], WithinAbs(-3.0 * x, 1e-8));
    } else {
      ++lower;
      CHECK_THAT(s.z, WithinAbs(2.0 * t * x, 1e-9));
      CHECK(s.index == 1);
    }
  }
  CHECK(upper == 50);
  CHECK(lower == 50);
  CHECK(fd.num_sheets == 2);
}

TEST_CASE("the fold has a single positive birth-death cusp") {
  const GeneratingFunction f = presets::cubic_fold(101);
  FrontDiagram fd = fiberwise_critical_locus(f);
  locate_cusps(f, fd);
  REQUIRE(fd.cusps.size() == 1);
  const CuspPoint& c = fd.cusps[0];
  CHECK_THAT(c.m[0], WithinAbs(0.0, 1e-9));
  CHECK_THAT(c.z, WithinAbs(0.0, 1e-9));
  CHECK(c.co_orientation == 1);
  const Classification k = classify_moderate(f, c.chart, c.m, c.v);
  CHECK(k.kind == SingularityKind::BirthDeath);
  CHECK_THAT(k.cubic, WithinAbs(6.0, 1e-9));

  // the mirror fold −(v³) − 3tv reverses the co-orientation
  GeneratingFunction g = f;
  auto base = f.eval;
  g.eval = [base](int c, const Coords& m, const Eigen::VectorXd& v) {
    GFValue e = base(c, m, -v);
    e.grad_v = -e.grad_v;
    e.mixed = -e.mixed;
    return e;
  };
  g.third = [](int, const Coords&, const Eigen::VectorXd&, const Eigen::VectorXd& w) { return -6.0 * w[0] * w[0] * w[0]; };
  CHECK(classify_moderate(g, c.chart, c.m, -c.v).co_orientation == -1);
}

TEST_CASE("classification of nondegenerate and flat points") {
  const GeneratingFunction f = presets::cubic_fold(21);
  const Classification m = classify_moderate(f, 0, Coords{0.25}, Eigen::VectorXd::Constant(1, -0.5));
  CHECK(m.kind == SingularityKind::Morse);
  CHECK(m.index == 1);
  const GeneratingFunction q = quartic(build_base(ManifoldKind::Circle, 16));
  CHECK(classify_moderate(q, 0, Coords{0.0}, Eigen::VectorXd::Zero(1)).kind == SingularityKind::NotModerate);
}

TEST_CASE("wrinkle cusps lie on the unit circle") {
  const GeneratingFunction w = presets::wrinkle(31);
  FrontDiagram fd = fiberwise_critical_locus(w);
  locate_cusps(w, fd);
  REQUIRE(fd.cusps.size() >= 8);
  for (const CuspPoint& c : fd.cusps) {
    CHECK_THAT(std::hypot(c.m[0], c.m[1]), WithinAbs(1.0, 1e-6));
    CHECK_THAT(c.v[0], WithinAbs(0.0, 1e-6));
  }
  for (const SheetPoint& s : fd.sheets) CHECK(std::hypot(s.m[0], s.m[1]) <= 1.0 + 1e-9);
}

TEST_CASE("doubling a zero section") {
  auto at = build_base(ManifoldKind::Circle, 16);
  const GeneratingFunction f = presets::zero_section(at, 2, 1);
  const double sigma = 4.0;
  const GeneratingFunction D = double_gf(f, sigma);
  CHECK(D.N == 4);
  const FrontDiagram fd = fiberwise_critical_locus(D);
  CHECK(fd.num_sheets == 2);
  CHECK(fd.sheets.size() == 2 * at->chart(0).npoints);
  for (const SheetPoint& s : fd.sheets) {
    CHECK_THAT(std::abs(s.z), WithinAbs(2.0 * std::pow(sigma, 1.5), 1e-9));
    CHECK(s.index == (s.z < 0 ? 1 : 2));
  }
  CHECK(legendrian_lift(fd).embedded);
  CHECK(code_of([&] { double_gf(f, 0.0); }) == ErrorCode::NonpositiveSeparation);
  CHECK(code_of([&] { double_gf(f, -1.0); }) == ErrorCode::NonpositiveSeparation);
}

TEST_CASE("doubling profile has exactly two critical points") {
  for (double sigma : {0.25, 1.0, 9.0}) {
    const DoublingProfile psi(sigma);
    const double r = std::sqrt(sigma);
    CHECK_THAT(psi(r)[1], WithinAbs(0.0, 1e-12));
    CHECK_THAT(psi(-r)[1], WithinAbs(0.0, 1e-12));
    CHECK_THAT(psi(r)[0], WithinAbs(-2.0 * sigma * r, 1e-12));
    int sign_changes = 0;
    double prev = psi(-2.0 * psi.R1)[1];
    for (int i = 1; i <= 40000; ++i) {
      const double s = -2.0 * psi.R1 + 4.0 * psi.R1 * i / 40000.0;
      const double d = psi(s)[1];
      if ((d > 0) != (prev > 0)) ++sign_changes;
      prev = d;
    }
    CHECK(sign_changes == 2);
    CHECK(psi(psi.R1 + 1.0)[1] == psi.c);
    CHECK(psi(-psi.R1 - 1.0)[0] == -psi.c * (psi.R1 + 1.0));
  }
}

TEST_CASE("admissibility on shells") {
  auto at = build_base(ManifoldKind::Circle, 16);
  const AdmissibleReport z = check_admissible(presets::zero_section(at, 1, 1));
  CHECK(z.admissible);
  CHECK(z.compact_support);
  CHECK(z.radii.size() == 3);

  const AdmissibleReport d = check_admissible(double_gf(presets::zero_section(at, 1, 1), 1.0));
  CHECK(d.admissible);
  CHECK_FALSE(d.compact_support);

  const AdmissibleReport q = check_admissible(quartic(at));
  CHECK_FALSE(q.admissible);
  CHECK(q.max_gradient[2] > q.max_gradient[0]);

  GeneratingFunction bare = presets::cubic_fold(11);
  CHECK(code_of([&] { check_admissible(bare); }) == ErrorCode::ProbeFailure);
}

TEST_CASE("Legendrian lift detects coincident sheets") {
  auto at = build_base(ManifoldKind::Circle, 16);
  const GeneratingFunction f = presets::zero_section(at, 1, 0);
  FrontDiagram fd = fiberwise_critical_locus(f);
  CHECK(legendrian_lift(fd).embedded);
  const std::size_t n = fd.sheets.size();
  for (std::size_t i = 0; i < n; ++i) {
    SheetPoint s = fd.sheets[i];
    s.sheet = 7;
    fd.sheets.push_back(s);
  }
  const LegendrianLift L = legendrian_lift(fd);
  CHECK_FALSE(L.embedded);
  CHECK(L.coincidences == n);
}
