#include <catch_amalgamated.hpp>

#include "torsionlab/charclass.hpp"

using namespace torsionlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Frozen references (50-digit evaluations, rounded to double).
constexpr double kZeta3 = 1.2020569031595942854;
constexpr double kZeta5 = 1.0369277551433699263;
constexpr double kImLi2Omega = 0.67662773760643575;  // Im Li₂(e^{2πi/3})
constexpr double kReLi2Omega = -0.54831135561607547; // Re Li₂(e^{2πi/3}) = −π²/18
constexpr double kReLi2Sixth = 0.27415567780803774;  // Li₂(e^{iπ/3})
constexpr double kImLi2Sixth = 1.0149416064096536;

// Direct partial sums with an Euler tail estimate, independent of the library path.
double zeta_oracle(double s) {
  double acc = 0.0;
  const int N = 200000;
  for (int n = N; n >= 1; --n) acc += std::pow(n, -s);
  return acc + std::pow(N, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(N, -s);
}

} // namespace

TEST_CASE("zeta values") {
  CHECK_THAT(zeta(2.0), WithinAbs(kPi * kPi / 6.0, 1e-12));
  CHECK_THAT(zeta(4.0), WithinAbs(std::pow(kPi, 4) / 90.0, 1e-12));
  CHECK_THAT(zeta(3.0), WithinAbs(kZeta3, 1e-13));
  CHECK_THAT(zeta(5.0), WithinAbs(kZeta5, 1e-13));
  for (double s : {1.5, 2.5, 7.0}) CHECK_THAT(zeta(s), WithinRel(zeta_oracle(s), 1e-9));
  CHECK_THROWS_AS(zeta(1.0), Error);
}

TEST_CASE("dilogarithm anchors") {
  const cplx w = dilog(std::polar(1.0, 2.0 * kPi / 3.0));
  CHECK_THAT(w.imag(), WithinAbs(kImLi2Omega, 1e-12));
  CHECK_THAT(w.real(), WithinAbs(kReLi2Omega, 1e-12));
  CHECK_THAT(w.real(), WithinAbs(-kPi * kPi / 18.0, 1e-12));
  const cplx s = dilog(std::polar(1.0, kPi / 3.0));
  CHECK_THAT(s.real(), WithinAbs(kReLi2Sixth, 1e-12));
  CHECK_THAT(s.imag(), WithinAbs(kImLi2Sixth, 1e-12));
  CHECK_THAT(dilog(0.5).real(), WithinAbs(kPi * kPi / 12.0 - 0.5 * std::log(2.0) * std::log(2.0), 1e-13));
  CHECK_THAT(dilog(-1.0).real(), WithinAbs(-kPi * kPi / 12.0, 1e-13));
  CHECK_THAT(dilog(1.0).real(), WithinAbs(kPi * kPi / 6.0, 1e-13));
  CHECK_THROWS_AS(dilog(cplx(1.1, 0.0)), Error);
}

TEST_CASE("dilogarithm branches agree with the series near their seams") {
  // the defining series converges (slowly) on the unit disk; sample inside |z| < 0.9
  for (double r : {0.45, 0.55, 0.8})
    for (double th : {0.3, 1.7, 2.9, -2.2}) {
      const cplx z = std::polar(r, th);
      cplx s = 0.0, p = 1.0;
      for (int k = 1; k < 4000; ++k) {
        p *= z;
        s += p / double(k * k);
      }
      CHECK(std::abs(dilog(z) - s) <= 1e-12);
    }
}

TEST_CASE("Chern–Weil integrals") {
  const BundleProjector b = presets::bott_projector(build_base(ManifoldKind::Sphere2, 48));
  const SampledForm c1 = chern_character_form(b, 1);
  CHECK_THAT(std::abs(integrate_form(c1)), WithinAbs(1.0, 2e-3));
  const BundleProjector t = presets::trivial_projector(b.atlas, 2, 1);
  CHECK(max_norm(chern_character_form(t, 1)) == 0.0);
  const double s = integrate_form(chern_character_form(direct_sum(b, t), 1));
  CHECK_THAT(s, WithinAbs(integrate_form(c1), 1e-12));
}

TEST_CASE("projector validation") {
  auto at = build_base(ManifoldKind::Sphere2, 12);
  CHECK_THROWS_AS(sample_projector(at, [](int, const Coords&, const Eigen::VectorXd&) { return Mat(2.0 * Mat::Identity(2, 2)); }),
                  Error);
  CHECK_NOTHROW(sample_projector(at, [](int, const Coords&, const Eigen::VectorXd& y) { return presets::bott(y); }));
}

TEST_CASE("Pontryagin character needs a declared real structure") {
  auto at = build_base(ManifoldKind::Sphere2, 12);
  BundleProjector b = presets::bott_projector(at);
  CHECK_THROWS_AS(pontryagin_character(b, 1), Error);
}

TEST_CASE("strata push-down") {
  auto at = build_base(ManifoldKind::Sphere2, 12);
  const SampledForm w = volume_form(at);
  const Mask full = full_mask(*at);
  Mask cap = full;
  for (int c = 0; c < at->num_charts(); ++c)
    for (std::size_t p = 0; p < at->chart(c).npoints; ++p) cap[c][p] = at->ambient(c, p)[2] < -0.2;
  const StrataCochain s = pullback(w, {{0, full}, {2, cap}, {3, cap}});
  CHECK(euler_characteristic(s) == 1);
  const SampledForm back = pushdown(s);
  for (std::size_t c = 0; c < back.comps.size(); ++c) CHECK(back.comps[c] == w.comps[c]);

  const StrataCochain bad = pullback(w, {{0, full}, {2, cap}, {4, cap}});
  try {
    pushdown(bad);
    FAIL("expected UncancelledBoundary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UncancelledBoundary);
  }
}

TEST_CASE("framing assembly") {
  auto at = build_base(ManifoldKind::Sphere2, 12);
  TorsionResult tau;
  tau.degree = 2;
  tau.form = volume_form(at);
  tau.integral = 0.375;
  const StrataCochain g = pullback(volume_form(at), {{1, full_mask(*at)}});
  const double b = integrate_form(pushdown(g));
  CHECK(assemble_framing(tau, g) == -(0.375 + b));
  CHECK(assemble_framing(tau, g, true) == 0.375 + b);
  TorsionResult low = tau;
  low.degree = 0;
  CHECK_THROWS_AS(assemble_framing(low, g), Error);
}
