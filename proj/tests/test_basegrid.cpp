#include <catch_amalgamated.hpp>

#include <sstream>

#include "torsionlab/basegrid.hpp"

using namespace torsionlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SampledForm scalar(const AtlasPtr& at, double (*f)(const Eigen::VectorXd&)) {
  SampledForm w(at, 0);
  for (int c = 0; c < at->num_charts(); ++c)
    for (std::size_t p = 0; p < at->chart(c).npoints; ++p) w.comps[c][p] = f(at->ambient(c, p));
  return w;
}

double g1(const Eigen::VectorXd& y) { return std::exp(0.4 * y[0]) * (1.0 + y[1] * y[2]); }
double g2(const Eigen::VectorXd& y) { return y[0] + std::sin(y[2]); }

} // namespace

TEST_CASE("volumes against closed forms") {
  CHECK_THAT(integrate_form(volume_form(build_base(ManifoldKind::Circle, 32))), WithinRel(2 * kPi, 1e-12));
  CHECK_THAT(integrate_form(volume_form(build_base(ManifoldKind::Torus2, 16))), WithinRel(4 * kPi * kPi, 1e-12));
  CHECK_THAT(integrate_form(volume_form(build_base(ManifoldKind::Sphere2, 64))), WithinAbs(4 * kPi, 1e-3));
  const double v8 = integrate_form(volume_form(build_base(ManifoldKind::Sphere4, 8)));
  const double v16 = integrate_form(volume_form(build_base(ManifoldKind::Sphere4, 16)));
  const double exact = 8 * kPi * kPi / 3;
  CHECK(std::abs(v16 - exact) < std::abs(v8 - exact));
  CHECK_THAT(v16, WithinRel(exact, 1e-3));
}

TEST_CASE("atlas bookkeeping") {
  for (auto kind : {ManifoldKind::Circle, ManifoldKind::Torus2, ManifoldKind::Sphere2, ManifoldKind::Sphere4}) {
    auto at = build_base(kind, 12);
    CHECK(partition_defect(*at) <= 1e-12);
    CHECK(overlap_roundtrip_error(*at) <= 1e-10);
    CHECK(kind_from_name(kind_name(kind)) == kind);
    CHECK(is_closed(kind));
  }
  CHECK_FALSE(is_closed(ManifoldKind::Interval));
  CHECK_FALSE(kind_from_name("Klein").has_value());
  CHECK_THROWS_AS(build_base(ManifoldKind::Sphere2, 4), Error);
}

TEST_CASE("d∘d vanishes to rounding") {
  auto at = build_base(ManifoldKind::Sphere2, 24);
  const SampledForm f = scalar(at, g1);
  CHECK(max_norm(exterior_derivative(exterior_derivative(f))) <= 1e-9);
  auto t4 = build_base(ManifoldKind::Sphere4, 8);
  SampledForm w(t4, 1);
  for (int c = 0; c < t4->num_charts(); ++c)
    for (std::size_t p = 0; p < t4->chart(c).npoints; ++p)
      for (int k = 0; k < 4; ++k) w.comps[c][p * 4 + k] = std::cos(0.3 * (k + 1) * t4->ambient(c, p)[k]);
  CHECK(max_norm(exterior_derivative(exterior_derivative(w))) <= 1e-9);
}

TEST_CASE("derivative of sin on the circle converges at fourth order") {
  double prev = 0.0;
  for (int res : {16, 32, 64}) {
    auto at = build_base(ManifoldKind::Circle, res);
    SampledForm f(at, 0);
    for (std::size_t p = 0; p < at->chart(0).npoints; ++p) f.comps[0][p] = std::sin(at->chart(0).coords(p)[0]);
    const SampledForm df = exterior_derivative(f);
    double err = 0.0;
    for (std::size_t p = 0; p < at->chart(0).npoints; ++p)
      err = std::max(err, std::abs(df.comps[0][p] - std::cos(at->chart(0).coords(p)[0])));
    if (prev > 0) CHECK(prev / err > 12.0);
    prev = err;
  }
}

TEST_CASE("Stokes residual of an exact top form shrinks with resolution") {
  std::vector<double> e;
  for (int res : {16, 32}) {
    auto at = build_base(ManifoldKind::Sphere2, res);
    const SampledForm f = scalar(at, g1), g = scalar(at, g2);
    SampledForm w = exterior_derivative(g);
    for (int c = 0; c < at->num_charts(); ++c)
      for (std::size_t p = 0; p < at->chart(c).npoints; ++p)
        for (int k = 0; k < 2; ++k) w.comps[c][p * 2 + k] *= f.comps[c][p];
    e.push_back(std::abs(integrate_form(exterior_derivative(w))));
  }
  CHECK(e[1] < e[0] / 4);
  CHECK(e[1] < 1e-2);
}

TEST_CASE("degree errors") {
  auto at = build_base(ManifoldKind::Sphere2, 12);
  CHECK_THROWS_AS(exterior_derivative(volume_form(at)), Error);
  CHECK_THROWS_AS(integrate_form(SampledForm(at, 1)), Error);
}

TEST_CASE("form CSV has a header and one row per point") {
  auto at = build_base(ManifoldKind::Circle, 16);
  std::ostringstream s;
  write_form_csv(s, volume_form(at));
  const std::string out = s.str();
  CHECK(std::count(out.begin(), out.end(), '\n') == 17);
}
