#include <catch_amalgamated.hpp>

#include <random>

#include "torsionlab/acceptance.hpp"
#include "torsionlab/famtor.hpp"
#include "torsionlab/verify/laplacian.hpp"
#include "torsionlab/verify/random_complex.hpp"

using namespace torsionlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_diff(const SampledForm& a, const SampledForm& b) { return acceptance::detail::form_diff(a, b); }

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoFailure;
}

} // namespace

TEST_CASE("Gauss–Legendre on [0, 1] is exact through degree 2n − 1") {
  for (int n : {2, 5, 16, 64}) {
    std::vector<double> x, w;
    gauss_legendre01(n, x, w);
    for (int deg : {0, 1, 2 * n - 1}) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], deg);
      CHECK_THAT(s, WithinRel(1.0 / (deg + 1), 1e-13));
    }
  }
}

TEST_CASE("degree-0 form is the pointwise FR torsion") {
  const ChainFamily f = acceptance::families::sphere2_probe3(12);
  const TorsionResult t = torsion_form(f, 0);
  double worst = 0.0;
  for (int c = 0; c < f.atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < f.atlas->chart(c).npoints; ++p) {
      const BasedComplex cx(f.ranks, f.at(c, p));
      worst = std::max(worst, std::abs(t.form.comps[c][p] - verify::laplacian_torsion(cx)));
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("constant families have vanishing higher forms") {
  std::mt19937_64 rng(17);
  const ChainFamily f = zero_section_family(build_base(ManifoldKind::Sphere2, 12), verify::random_acyclic(rng, 8));
  const TorsionResult t = torsion_form(f, 1);
  CHECK(max_norm(t.form) == 0.0);
  CHECK(*t.integral == 0.0);
}

TEST_CASE("unitary families are flat in the Hodge metric") {
  // d(m) = U(m)·2 with U unitary: every Laplacian is constant, so T₁ vanishes
  auto at = build_base(ManifoldKind::Sphere2, 12);
  const ChainFamily f = sample_family(at, {2, 2}, {}, "unitary", [](int, const Coords&, const Eigen::VectorXd& y) {
    Mat u(2, 2);
    u << cplx(y[2], 0), cplx(y[0], -y[1]), cplx(-y[0], -y[1]), cplx(y[2], 0);
    return Differentials{2.0 * u};
  });
  CHECK(max_norm(torsion_form(f, 1).form) <= 1e-12);
}

TEST_CASE("direct sums add forms and constant bases changes leave them alone") {
  const ChainFamily a = acceptance::families::sphere2_probe3(12);
  const ChainFamily b = sample_family(a.atlas, {2, 2}, {}, "b", acceptance::families::sphere2_probe(8, 0.4).sampler);
  const TorsionResult ta = torsion_form(a, 1), tb = torsion_form(b, 1);
  const TorsionResult ts = torsion_form(direct_sum(a, b), 1);
  CHECK(max_diff(ts.form, acceptance::detail::add_forms(ta.form, tb.form)) <= 1e-12);
  CHECK_THAT(*ts.integral, WithinAbs(*ta.integral + *tb.integral, 1e-12));

  std::mt19937_64 rng(1);
  std::vector<Mat> g;
  for (int r : a.ranks) g.push_back(acceptance::detail::monomial(r, rng));
  CHECK(max_diff(torsion_form(change_basis(a, g), 1).form, ta.form) <= 1e-12);
}

TEST_CASE("d of the torsion form converges to the transgression form") {
  std::vector<double> gap;
  for (int res : {8, 12}) {
    const ChainFamily f = acceptance::families::sphere4_probe(res);
    const TorsionResult t = torsion_form(f, 1);
    gap.push_back(max_diff(exterior_derivative(t.form), transgression_form(f, 1)));
  }
  CHECK(gap[1] < gap[0] / 2.25);
}

TEST_CASE("family diagnostics") {
  const ChainFamily f = acceptance::families::sphere2_probe(16);
  const FamilyDiagnostics d = check_family(f);
  CHECK_THAT(d.min_singular, WithinAbs(0.5, 1e-3));
  CHECK(d.overlap_disagreement <= 1e-12);
  const ChainFamily bad = acceptance::families::sphere2_probe(16, 1.0);
  CHECK(code_of([&] { torsion_form(bad, 1); }) == ErrorCode::AcyclicityLost);
}

TEST_CASE("circle-bundle families") {
  CHECK(code_of([] { validate_root(3, 1, 2); }) == ErrorCode::InvalidRoot);
  CHECK(code_of([] { validate_root(1, 1, 3); }) == ErrorCode::InvalidRoot);
  CHECK(code_of([] { validate_root(3, 3, 3); }) == ErrorCode::InvalidRoot);
  CHECK_NOTHROW(validate_root(6, 1, 3));
  const ChainFamily f = circle_bundle_family(3, 1, 3, 16);
  CHECK(check_family(f).overlap_disagreement <= 1e-10);
  const TorsionResult t = torsion_form(f, 1);
  CHECK(t.imaginary_residual <= 1e-10);
  CHECK(t.lambda_nodes >= 32);
  CHECK(std::abs(*t.integral) <= 1e-10);
}

TEST_CASE("Cerf strata compose into consistent families") {
  auto at = build_base(ManifoldKind::Circle, 64);
  CerfStrata s{apply_move(two_term(2.0), Expansion{1}), {}, 0.0}; // d = diag(2, 1)
  s.walls.push_back({BirthDeathWall{0, 1, 1}, [](int, const Coords& x) { return std::sin(x[0]); }, 1});
  s.walls.push_back({SlideWall{0, 1, cplx(0.5, 0.0), 1}, [](int, const Coords& x) { return std::cos(x[0]); }, 1});
  const ChainFamily f = family_from_cerf(s, at);
  CHECK(check_family(f).min_singular > 0.05);
  CHECK_NOTHROW(torsion_form(f, 0));

  CerfStrata broken = s;
  broken.walls = {{SlideWall{0, 1, cplx(0.5, 0.0), 1}, [](int, const Coords& x) { return x[0] - kPi; }, 1}};
  CHECK(code_of([&] { family_from_cerf(broken, at); }) == ErrorCode::InconsistentStrata);
  broken.walls = {{SlideWall{0, 0, 1.0, 1}, [](int, const Coords& x) { return std::sin(x[0]); }, 1}};
  CHECK(code_of([&] { family_from_cerf(broken, at); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("degree checks") {
  auto at = build_base(ManifoldKind::Interval, 16);
  std::mt19937_64 rng(2);
  const ChainFamily f = zero_section_family(at, verify::random_acyclic(rng, 4));
  CHECK(code_of([&] { torsion_form(f, 2); }) == ErrorCode::DegreeOverflow);
  const ChainFamily g = zero_section_family(build_base(ManifoldKind::Box2, 12), verify::random_acyclic(rng, 4));
  CHECK(code_of([&] { torsion_form(g, 1); }) == ErrorCode::UnsupportedKind);
}
