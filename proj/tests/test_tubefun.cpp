#include <catch_amalgamated.hpp>

#include "torsionlab/charclass.hpp"
#include "torsionlab/tubefun.hpp"

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

// Non-homogeneous evaluator whose quadratic part is diag(signs); forces Richardson sampling.
TubeFunction perturbed_quadratic(AtlasPtr at, std::vector<double> signs) {
  TubeFunction f;
  f.atlas = std::move(at);
  f.N = static_cast<int>(signs.size());
  f.eval = [signs](const BasePoint&, const Eigen::VectorXd& v) {
    TubeValue t;
    t.value = 1.0 + 0.5 * v[0];
    t.grad = Eigen::VectorXd::Zero(v.size());
    t.grad[0] = 0.5;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      t.value += signs[i] * v[i] * v[i];
      t.grad[i] += 2.0 * signs[i] * v[i];
    }
    return t;
  };
  return f;
}

TubeFunction homogeneous_fn(AtlasPtr at, int N, std::function<TubeValue(const Eigen::VectorXd&)> g) {
  TubeFunction f;
  f.atlas = std::move(at);
  f.N = N;
  f.eval = [g](const BasePoint&, const Eigen::VectorXd& v) { return g(v); };
  f.homogeneous = f.eval;
  return f;
}

} // namespace

TEST_CASE("quadratic limits are certified with their index") {
  auto at = build_base(ManifoldKind::Sphere2, 8);
  TubeFunction f = perturbed_quadratic(at, {1.0, -1.0, -1.0});
  const TubeReport r = verify_tube_type(f);
  CHECK(r.status == TubeStatus::QuadraticVerified);
  CHECK(r.index == 2);
  CHECK(r.condition1);
  CHECK(r.condition2);
  CHECK(r.quadratic_fit_residual <= 1e-6);
  CHECK(f.asymptotic->residual <= 1e-3);
}

TEST_CASE("rigid families are certified without sampling") {
  TubeFunction f = tube_from_rigid(presets::standard_quadratic(build_base(ManifoldKind::Circle, 16), 2, 3));
  const TubeReport r = verify_tube_type(f);
  CHECK(r.status == TubeStatus::Rigid);
  CHECK(r.index == 3);
  CHECK_FALSE(f.asymptotic.has_value());
}

TEST_CASE("quartic growth has no quadratic limit") {
  auto at = build_base(ManifoldKind::Circle, 16);
  TubeFunction f;
  f.atlas = at;
  f.N = 2;
  f.eval = [](const BasePoint&, const Eigen::VectorXd& v) {
    TubeValue t;
    const double r2 = v.squaredNorm();
    t.value = r2 * r2 - v[1] * v[1];
    t.grad = 4.0 * r2 * v;
    t.grad[1] -= 2.0 * v[1];
    return t;
  };
  CHECK(code_of([&] { verify_tube_type(f); }) == ErrorCode::NoLimit);
}

TEST_CASE("a degenerate zero level is rejected") {
  TubeFunction f = homogeneous_fn(build_base(ManifoldKind::Circle, 16), 2, [](const Eigen::VectorXd& v) {
    TubeValue t;
    t.value = v[0] * v[0];
    t.grad = Eigen::VectorXd::Zero(2);
    t.grad[0] = 2.0 * v[0];
    return t;
  });
  CHECK(code_of([&] { verify_tube_type(f); }) == ErrorCode::SingularZeroLevel);
}

TEST_CASE("the height function stays unverified without a reference path") {
  TubeFunction f = presets::homogenized_height(build_base(ManifoldKind::Circle, 16), 3);
  const TubeReport r = verify_tube_type(f);
  CHECK(r.condition1);
  CHECK(r.condition2);
  CHECK(r.condition3 == "Unverified-(3)");
  CHECK(r.status == TubeStatus::Unverified);
  CHECK(r.index == -1);
  CHECK(r.min_band_gradient > 0.5);

  auto at = build_base(ManifoldKind::Circle, 16);
  TubeFunction g = presets::homogenized_height(at, 2);
  VerifyOptions opt;
  opt.reference_path.push_back(tube_from_rigid(presets::standard_quadratic(at, 1, 1)));
  const TubeReport r2 = verify_tube_type(g, opt);
  CHECK(r2.status == TubeStatus::QuadraticVerified);
  CHECK(r2.index == 1);
}

TEST_CASE("probe directions are reproducible unit vectors") {
  const Eigen::MatrixXd a = probe_directions(4, 20, 9), b = probe_directions(4, 20, 9);
  CHECK(a == b);
  CHECK(a.cols() == 28);
  for (Eigen::Index j = 0; j < a.cols(); ++j) CHECK_THAT(a.col(j).norm(), WithinAbs(1.0, 1e-14));
  CHECK(probe_directions(4, 20, 10) != a);
}

TEST_CASE("orientability by frame transport") {
  const OrientabilityReport m = check_orientable(*presets::mobius(build_base(ManifoldKind::Circle, 64)));
  CHECK_FALSE(m.orientable);
  REQUIRE(m.holonomy.size() == 1);
  CHECK(m.holonomy[0] == -1.0);
  const OrientabilityReport t = check_orientable(*presets::standard_quadratic(build_base(ManifoldKind::Torus2, 12), 1, 2));
  CHECK(t.orientable);
  for (double h : t.holonomy) CHECK(h == 1.0);
}

TEST_CASE("oplus sums indices and tags the stabilization") {
  auto at = build_base(ManifoldKind::Sphere2, 12);
  const TubeFunction f = tube_from_rigid(presets::standard_quadratic(at, 1, 0));
  const TubeFunction s = oplus(f, tube_from_rigid(presets::standard_quadratic(at, 1, 1)));
  CHECK(s.N == 3);
  CHECK(s.index == 1);
  CHECK(s.status == TubeStatus::Rigid);
  CHECK(s.tag == "standard-stabilization");
  CHECK(s.rigid->n == 3);

  const TubeFunction c = oplus(f, tube_from_rigid(presets::standard_quadratic(at, 1, 2)));
  CHECK(c.tag == "stabilization");

  const TubeFunction tw = oplus(f, tube_from_rigid(presets::bott_rigid(at)));
  CHECK(tw.tag == "twisted-stabilization");
  CHECK(tw.index == 2);
  CHECK(tw.N == 5);
  REQUIRE(tw.stable_ref);

  CHECK(code_of([&] { oplus(f, tube_from_rigid(presets::standard_quadratic(build_base(ManifoldKind::Sphere2, 12), 1, 1))); }) ==
        ErrorCode::AtlasMismatch);
}

TEST_CASE("stable bundle of the Bott family") {
  const auto q = presets::bott_rigid(build_base(ManifoldKind::Sphere2, 32));
  CHECK(q->negative_count == 1);
  CHECK(q->index() == 2);
  CHECK_FALSE(q->constant);
  const BundleProjector b = stable_bundle(*q);
  CHECK(b.rank == 1);
  CHECK_FALSE(b.complexified_real);
  CHECK(check_projector(b).idempotency <= 1e-12);
  CHECK_THAT(std::abs(integrate_form(chern_character_form(b, 1))), WithinAbs(1.0, 1e-2));
}

TEST_CASE("rigid family input validation") {
  auto at = build_base(ManifoldKind::Circle, 16);
  CHECK(code_of([&] {
          make_rigid(at, [](int, const Coords& x, const Eigen::VectorXd&) { return Mat(Mat::Identity(1, 1) * std::cos(x[0])); }, true);
        }) == ErrorCode::EigenvalueGapLost);
  CHECK(code_of([&] {
          Mat m(2, 2);
          m << 1.0, 2.0, 0.0, 1.0;
          make_rigid(at, [m](int, const Coords&, const Eigen::VectorXd&) { return m; }, true);
        }) == ErrorCode::MalformedComplex);
  CHECK(code_of([] { presets::bott_rigid(build_base(ManifoldKind::Circle, 16)); }) == ErrorCode::UnsupportedKind);
}
