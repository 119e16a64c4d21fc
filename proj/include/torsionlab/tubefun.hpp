#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "basegrid.hpp"
#include "chainkit.hpp"
#include "charclass.hpp"
#include "constants.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace torsionlab {

struct BasePoint {
  int chart = 0;
  std::size_t point = 0;
};

struct TubeValue {
  double value = 0.0;
  Eigen::VectorXd grad;
};

using TubeEvaluator = std::function<TubeValue(const BasePoint&, const Eigen::VectorXd& v)>;

enum class TubeStatus { Rigid, QuadraticVerified, Unverified };

inline const char* status_name(TubeStatus s) {
  switch (s) {
    case TubeStatus::Rigid: return "Rigid";
    case TubeStatus::QuadraticVerified: return "QuadraticVerified";
    default: return "Unverified";
  }
}

// Q(m) per base point. Complex Hermitian entries are allowed; the tube function is then
// the realification on R^{2n} and the real index doubles.
struct RigidFamily {
  AtlasPtr atlas;
  int n = 0;
  bool real = true;
  int negative_count = 0; // eigenvalues < 0 of Q (complex count when !real)
  bool constant = false;
  std::vector<std::vector<Mat>> Q; // [chart][point]

  int fiber_dim() const { return real ? n : 2 * n; }
  int index() const { return real ? negative_count : 2 * negative_count; }
};

using RigidSampler = std::function<Mat(int chart, const Coords& x, const Eigen::VectorXd& ambient)>;

inline std::shared_ptr<const RigidFamily> make_rigid(AtlasPtr atlas, const RigidSampler& fn, bool real) {
  auto r = std::make_shared<RigidFamily>();
  r->atlas = std::move(atlas);
  r->real = real;
  int neg = -1;
  double gap = std::numeric_limits<double>::infinity();
  for (int c = 0; c < r->atlas->num_charts(); ++c) {
    const Chart& ch = r->atlas->chart(c);
    std::vector<Mat> pts(ch.npoints);
    std::vector<int> cnt(ch.npoints);
    std::vector<double> g(ch.npoints);
    parallel_for(ch.npoints, [&](std::size_t p) {
      pts[p] = fn(c, ch.coords(p), r->atlas->ambient(c, p));
      Eigen::SelfAdjointEigenSolver<Mat> es(pts[p], Eigen::EigenvaluesOnly);
      cnt[p] = static_cast<int>((es.eigenvalues().array() < 0.0).count());
      g[p] = es.eigenvalues().cwiseAbs().minCoeff();
    });
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      const Mat& q = pts[p];
      if (q.rows() != q.cols() || (r->n && q.rows() != r->n)) fail(ErrorCode::MalformedComplex, "Q has inconsistent shape");
      r->n = static_cast<int>(q.rows());
      if ((q - q.adjoint()).cwiseAbs().maxCoeff() > tol::construction) fail(ErrorCode::MalformedComplex, "Q is not Hermitian");
      if (real && q.imag().cwiseAbs().maxCoeff() > tol::construction) fail(ErrorCode::MalformedComplex, "Q is not real");
      gap = std::min(gap, g[p]);
      if (g[p] < tol::invertibility)
        fail(ErrorCode::EigenvalueGapLost, "eigenvalue " + std::to_string(g[p]) + " at chart " + std::to_string(c) +
                                               " point " + std::to_string(p));
      if (neg >= 0 && cnt[p] != neg) fail(ErrorCode::EigenvalueGapLost, "negative count changes across the base");
      neg = cnt[p];
    }
    r->Q.push_back(std::move(pts));
  }
  r->negative_count = neg;
  r->constant = true;
  for (const auto& chart : r->Q)
    for (const Mat& q : chart)
      if ((q - r->Q[0][0]).cwiseAbs().maxCoeff() > tol::construction) r->constant = false;
  return r;
}

inline TubeValue quadratic_value(const Mat& Q, bool real, const Eigen::VectorXd& v) {
  const Eigen::Index n = Q.rows();
  TubeValue out;
  if (real) {
    const Eigen::MatrixXd R = Q.real();
    out.grad = 2.0 * R * v;
    out.value = v.dot(R * v);
    return out;
  }
  Vec z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = cplx(v[i], v[n + i]);
  const Vec qz = Q * z;
  out.value = z.dot(qz).real();
  out.grad.resize(2 * n);
  out.grad.head(n) = 2.0 * qz.real();
  out.grad.tail(n) = 2.0 * qz.imag();
  return out;
}

struct Asymptotic {
  std::vector<BasePoint> base;
  Eigen::MatrixXd dirs;               // N × P unit directions
  Eigen::MatrixXd h;                  // B × P sphere values
  std::vector<Eigen::MatrixXd> sgrad; // B entries, N × P spherical gradients
  double residual = 0.0;
  double lambda0 = 0.0;
};

struct TubeFunction {
  AtlasPtr atlas;
  int N = 0;
  TubeEvaluator eval;
  TubeEvaluator homogeneous; // exact 2-homogeneous part when known
  std::optional<Asymptotic> asymptotic;
  int index = -1;
  TubeStatus status = TubeStatus::Unverified;
  std::string tag;
  std::shared_ptr<const RigidFamily> rigid;
  std::shared_ptr<const RigidFamily> stable_ref;
};

inline TubeFunction tube_from_rigid(std::shared_ptr<const RigidFamily> q) {
  TubeFunction f;
  f.atlas = q->atlas;
  f.N = q->fiber_dim();
  f.eval = [q](const BasePoint& b, const Eigen::VectorXd& v) { return quadratic_value(q->Q[b.chart][b.point], q->real, v); };
  f.homogeneous = f.eval;
  f.index = q->index();
  f.status = TubeStatus::Rigid;
  f.rigid = std::move(q);
  return f;
}

// ---------------------------------------------------------------------------
// Probe sets: Box–Muller on raw mt19937_64 output so the directions do not depend on
// the standard library's distribution implementations.

struct ProbeOptions {
  double lambda0 = 8.0;
  int directions = 0;         // 0 → 2N axis directions plus 48·N random ones
  std::size_t max_base = 256; // base points are strided down to at most this many
  std::uint64_t seed = 0x7475626566756e;
};

inline Eigen::MatrixXd probe_directions(int N, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unif = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  Eigen::MatrixXd d(N, 2 * N + count);
  int col = 0;
  for (int i = 0; i < N; ++i)
    for (double s : {1.0, -1.0}) {
      d.col(col).setZero();
      d(i, col++) = s;
    }
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd g(N);
    for (int i = 0; i < N; ++i) {
      const double r = std::sqrt(-2.0 * std::log(unif())), t = 2.0 * kPi * unif();
      g[i] = r * std::cos(t);
    }
    d.col(col++) = g.normalized();
  }
  return d;
}

inline std::vector<BasePoint> base_probes(const BaseAtlas& at, std::size_t max_base) {
  std::vector<BasePoint> all;
  for (int c = 0; c < at.num_charts(); ++c)
    for (std::size_t p = 0; p < at.chart(c).npoints; ++p)
      if (at.weight(c, p) > 0.0) all.push_back({c, p});
  if (all.size() <= max_base) return all;
  std::vector<BasePoint> out;
  const double stride = static_cast<double>(all.size()) / max_base;
  for (std::size_t i = 0; i < max_base; ++i) out.push_back(all[static_cast<std::size_t>(i * stride)]);
  return out;
}

namespace detail {

struct SphereSample {
  double value;
  Eigen::VectorXd grad; // full gradient of g at θ
  double residual;
};

// F(λ) = f(λθ)/λ², G(λ) = ∇f(λθ)/λ at λ0·{1,2,4,8}; two Richardson levels remove the
// 1/λ and 1/λ² terms, and the two top estimates give the residual.
inline SphereSample richardson(const TubeEvaluator& f, const BasePoint& b, const Eigen::VectorXd& th, double lambda0) {
  double F[4];
  Eigen::VectorXd G[4];
  for (int j = 0; j < 4; ++j) {
    const double lam = lambda0 * (1 << j);
    TubeValue t = f(b, lam * th);
    if (!std::isfinite(t.value)) fail(ErrorCode::NoLimit, "evaluator returned a non-finite value");
    F[j] = t.value / (lam * lam);
    G[j] = t.grad / lam;
  }
  double R1[3];
  Eigen::VectorXd S1[3];
  for (int j = 0; j < 3; ++j) {
    R1[j] = 2.0 * F[j + 1] - F[j];
    S1[j] = 2.0 * G[j + 1] - G[j];
  }
  const double a = (4.0 * R1[1] - R1[0]) / 3.0, b2 = (4.0 * R1[2] - R1[1]) / 3.0;
  const Eigen::VectorXd ga = (4.0 * S1[1] - S1[0]) / 3.0, gb = (4.0 * S1[2] - S1[1]) / 3.0;
  const double res = std::max(std::abs(b2 - a), (gb - ga).cwiseAbs().maxCoeff()) / (1.0 + std::abs(b2));
  return {b2, gb, res};
}

inline SphereSample sphere_sample(const TubeFunction& f, const BasePoint& b, const Eigen::VectorXd& th, double lambda0) {
  if (f.homogeneous) {
    TubeValue t = f.homogeneous(b, th);
    return {t.value, t.grad, 0.0};
  }
  return richardson(f.eval, b, th, lambda0);
}

inline Eigen::VectorXd tangential(const Eigen::VectorXd& grad, const Eigen::VectorXd& th) {
  return grad - grad.dot(th) * th;
}

} // namespace detail

inline const Asymptotic& asymptotic_quadratic(TubeFunction& f, const ProbeOptions& opt = {}) {
  Asymptotic a;
  a.lambda0 = opt.lambda0;
  a.base = base_probes(*f.atlas, opt.max_base);
  a.dirs = probe_directions(f.N, opt.directions > 0 ? opt.directions : 48 * f.N, opt.seed);
  const Eigen::Index P = a.dirs.cols();
  a.h.resize(a.base.size(), P);
  a.sgrad.assign(a.base.size(), Eigen::MatrixXd(f.N, P));
  std::vector<double> res(a.base.size(), 0.0);
  parallel_for(a.base.size(), [&](std::size_t i) {
    for (Eigen::Index j = 0; j < P; ++j) {
      const Eigen::VectorXd th = a.dirs.col(j);
      auto s = detail::sphere_sample(f, a.base[i], th, opt.lambda0);
      a.h(i, j) = s.value;
      a.sgrad[i].col(j) = detail::tangential(s.grad, th);
      res[i] = std::max(res[i], s.residual);
    }
  });
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i] > tol::no_limit) {
      fail(ErrorCode::NoLimit, "extrapolation residual " + std::to_string(res[i]) + " at chart " +
                                   std::to_string(a.base[i].chart) + " point " + std::to_string(a.base[i].point));
    }
    a.residual = std::max(a.residual, res[i]);
  }
  f.asymptotic = std::move(a);
  return *f.asymptotic;
}

// ---------------------------------------------------------------------------

struct TubeReport {
  bool condition1 = false;
  bool condition2 = false;
  std::string condition3 = "Unverified-(3)";
  TubeStatus status = TubeStatus::Unverified;
  int index = -1;
  double min_band_gradient = std::numeric_limits<double>::infinity();
  std::size_t band_samples = 0;
  double quadratic_fit_residual = std::numeric_limits<double>::infinity();
  double epsilon = 0.05, delta = 1e-3;
};

struct VerifyOptions {
  double epsilon = 0.05; // band half-width |h| ≤ ε
  double delta = 1e-3;   // spherical gradient floor on the projected zero level
  // Optional caller-supplied homotopy samples ending at a quadratic form; each must
  // pass the same band scan.
  std::vector<TubeFunction> reference_path;
};

namespace detail {

// Least-squares fit g(θ) ≈ θᵀ A θ on the probe directions; returns A and the max residual.
inline std::pair<Eigen::MatrixXd, double> fit_quadratic(const Eigen::MatrixXd& dirs, const Eigen::VectorXd& h) {
  const int N = static_cast<int>(dirs.rows());
  const int m = N * (N + 1) / 2;
  Eigen::MatrixXd X(dirs.cols(), m);
  for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
    int c = 0;
    for (int a = 0; a < N; ++a)
      for (int b = a; b < N; ++b) X(j, c++) = (a == b ? 1.0 : 2.0) * dirs(a, j) * dirs(b, j);
  }
  const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(h);
  Eigen::MatrixXd A(N, N);
  int c = 0;
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) A(a, b) = A(b, a) = coef[c++];
  return {A, (X * coef - h).cwiseAbs().maxCoeff()};
}

// Band scan of one sampled function; returns the min projected spherical gradient.
inline double band_scan(const TubeFunction& f, const VerifyOptions& opt, std::size_t& samples) {
  const Asymptotic& a = *f.asymptotic;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.base.size(); ++i)
    for (Eigen::Index j = 0; j < a.dirs.cols(); ++j) {
      if (std::abs(a.h(i, j)) > opt.epsilon) continue;
      ++samples;
      Eigen::VectorXd th = a.dirs.col(j);
      double hv = a.h(i, j);
      Eigen::VectorXd sg = a.sgrad[i].col(j);
      for (int it = 0; it < 30 && std::abs(hv) > 1e-12; ++it) {
        const double n2 = sg.squaredNorm();
        if (n2 < 1e-300) break;
        th = (th - hv * sg / n2).normalized();
        auto s = sphere_sample(f, a.base[i], th, a.lambda0);
        hv = s.value;
        sg = tangential(s.grad, th);
        if (sg.norm() < opt.delta) break;
      }
      const double gn = sg.norm();
      worst = std::min(worst, gn);
      if (gn < opt.delta) {
        std::string where = "zero level degenerate at chart " + std::to_string(a.base[i].chart) + " point " +
                            std::to_string(a.base[i].point) + ", θ = (";
        for (Eigen::Index k = 0; k < th.size(); ++k) where += (k ? ", " : "") + std::to_string(th[k]);
        fail(ErrorCode::SingularZeroLevel, where + "), |∇h| = " + std::to_string(gn));
      }
    }
  return worst;
}

} // namespace detail

inline TubeReport verify_tube_type(TubeFunction& f, const VerifyOptions& opt = {}) {
  TubeReport r;
  r.epsilon = opt.epsilon;
  r.delta = opt.delta;
  if (f.status == TubeStatus::Rigid) {
    r.condition1 = r.condition2 = true;
    r.condition3 = "certified";
    r.status = TubeStatus::Rigid;
    r.index = f.index;
    r.quadratic_fit_residual = 0.0;
    return r;
  }
  if (!f.asymptotic) asymptotic_quadratic(f);
  const Asymptotic& a = *f.asymptotic;
  r.condition1 = true;
  r.min_band_gradient = detail::band_scan(f, opt, r.band_samples);
  r.condition2 = true;

  // A sampled limit that is itself a nondegenerate quadratic form of constant index is
  // its own reference for (3).
  int idx = -1;
  bool quadratic = true;
  double fit = 0.0;
  for (std::size_t i = 0; i < a.base.size(); ++i) {
    auto [A, res] = detail::fit_quadratic(a.dirs, a.h.row(i).transpose());
    fit = std::max(fit, res);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    const int k = static_cast<int>((es.eigenvalues().array() < 0.0).count());
    if (res > tol::kernel_eigen || es.eigenvalues().cwiseAbs().minCoeff() < tol::invertibility || (idx >= 0 && k != idx))
      quadratic = false;
    idx = k;
  }
  r.quadratic_fit_residual = fit;
  if (quadratic) {
    r.condition3 = "certified";
    r.status = TubeStatus::QuadraticVerified;
    r.index = idx;
  } else if (!opt.reference_path.empty()) {
    for (TubeFunction g : opt.reference_path) {
      if (g.atlas != f.atlas || g.N != f.N) fail(ErrorCode::AtlasMismatch, "reference path sample has another shape");
      if (g.status == TubeStatus::Rigid) continue;
      if (!g.asymptotic) asymptotic_quadratic(g);
      std::size_t n = 0;
      detail::band_scan(g, opt, n);
    }
    const TubeFunction& end = opt.reference_path.back();
    r.condition3 = "certified";
    r.status = TubeStatus::QuadraticVerified;
    r.index = end.index;
  }
  f.status = r.status;
  if (r.index >= 0) f.index = r.index;
  return r;
}

// Membership in T(g) = {g ≤ 0} ∩ S^{N−1}.
inline bool in_tube(const TubeFunction& f, const BasePoint& b, const Eigen::VectorXd& v, double lambda0 = 8.0) {
  return detail::sphere_sample(f, b, v.normalized(), lambda0).value <= 0.0;
}

// ---------------------------------------------------------------------------

inline bool is_standard_form(const RigidFamily& q) {
  if (!q.constant || !q.real) return false;
  const Mat& Q = q.Q[0][0];
  if (q.n % 2) return false;
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < q.n; ++j) {
      const double want = (i != j) ? 0.0 : (i < q.n / 2 ? 1.0 : -1.0);
      if (std::abs(Q(i, j) - want) > tol::construction) return false;
    }
  return true;
}

inline TubeFunction oplus(const TubeFunction& f1, const TubeFunction& f2) {
  if (f1.atlas != f2.atlas) fail(ErrorCode::AtlasMismatch, "tube functions on different atlases");
  TubeFunction f;
  f.atlas = f1.atlas;
  f.N = f1.N + f2.N;
  const int n1 = f1.N, n2 = f2.N;
  auto join = [n1, n2](const TubeEvaluator& a, const TubeEvaluator& b) -> TubeEvaluator {
    return [a, b, n1, n2](const BasePoint& p, const Eigen::VectorXd& v) {
      TubeValue x = a(p, v.head(n1)), y = b(p, v.tail(n2));
      TubeValue out;
      out.value = x.value + y.value;
      out.grad.resize(n1 + n2);
      out.grad << x.grad, y.grad;
      return out;
    };
  };
  f.eval = join(f1.eval, f2.eval);
  if (f1.homogeneous && f2.homogeneous) f.homogeneous = join(f1.homogeneous, f2.homogeneous);
  f.index = (f1.index >= 0 && f2.index >= 0) ? f1.index + f2.index : -1;
  if (f1.status == TubeStatus::Rigid && f2.status == TubeStatus::Rigid)
    f.status = TubeStatus::Rigid;
  else if (f1.status != TubeStatus::Unverified && f2.status != TubeStatus::Unverified)
    f.status = TubeStatus::QuadraticVerified;
  if (f1.rigid && f2.rigid && f1.rigid->real == f2.rigid->real) {
    // block-diagonal rigid family
    auto r = std::make_shared<RigidFamily>();
    r->atlas = f.atlas;
    r->n = f1.rigid->n + f2.rigid->n;
    r->real = f1.rigid->real;
    r->negative_count = f1.rigid->negative_count + f2.rigid->negative_count;
    r->constant = f1.rigid->constant && f2.rigid->constant;
    for (std::size_t c = 0; c < f1.rigid->Q.size(); ++c) {
      std::vector<Mat> pts;
      for (std::size_t p = 0; p < f1.rigid->Q[c].size(); ++p) {
        const Mat& a = f1.rigid->Q[c][p];
        const Mat& b = f2.rigid->Q[c][p];
        Mat m = Mat::Zero(r->n, r->n);
        m.topLeftCorner(a.rows(), a.cols()) = a;
        m.bottomRightCorner(b.rows(), b.cols()) = b;
        pts.push_back(std::move(m));
      }
      r->Q.push_back(std::move(pts));
    }
    f.rigid = r;
  }
  if (f2.status == TubeStatus::Rigid && f2.rigid) {
    if (is_standard_form(*f2.rigid))
      f.tag = "standard-stabilization";
    else if (f2.rigid->constant)
      f.tag = "stabilization";
    else {
      f.tag = "twisted-stabilization";
      f.stable_ref = f2.rigid;
    }
  }
  if (f1.asymptotic && f2.asymptotic) asymptotic_quadratic(f);
  return f;
}

// Spectral projector onto the negative eigenspace of Q(m).
inline BundleProjector stable_bundle(const RigidFamily& q) {
  BundleProjector b;
  b.atlas = q.atlas;
  b.rank = q.negative_count;
  b.complexified_real = q.real;
  for (const auto& chart : q.Q) {
    std::vector<Mat> pts(chart.size());
    std::vector<double> gap(chart.size());
    parallel_for(chart.size(), [&](std::size_t p) {
      Eigen::SelfAdjointEigenSolver<Mat> es(chart[p]);
      gap[p] = es.eigenvalues().cwiseAbs().minCoeff();
      const int k = static_cast<int>((es.eigenvalues().array() < 0.0).count());
      const Mat V = es.eigenvectors().leftCols(k);
      pts[p] = V * V.adjoint();
    });
    for (double g : gap)
      if (g < tol::invertibility) fail(ErrorCode::EigenvalueGapLost, "spectral gap closes");
    b.P.push_back(std::move(pts));
  }
  return b;
}

struct OrientabilityReport {
  bool orientable = true;
  std::vector<double> holonomy; // real: ±1; complex: det-line phase angle
  double min_overlap = 1.0;
  std::string surrogate = "determinant line of the stable bundle";
};

inline OrientabilityReport check_orientable(const RigidFamily& q) {
  OrientabilityReport r;
  auto frame = [&](std::size_t p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(q.Q[0][p]);
    return Mat(es.eigenvectors().leftCols(q.negative_count));
  };
  for (const auto& loop : q.atlas->loop_generators()) {
    cplx hol = 1.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Mat a = frame(loop[i]), b = frame(loop[(i + 1) % loop.size()]);
      const cplx d = (b.adjoint() * a).determinant();
      r.min_overlap = std::min(r.min_overlap, std::abs(d));
      if (std::abs(d) < 0.5)
        fail(ErrorCode::FrameTransportUnstable, "frame overlap " + std::to_string(std::abs(d)) + " along a loop");
      hol *= d / std::abs(d);
    }
    if (q.real) {
      const double s = hol.real() > 0 ? 1.0 : -1.0;
      r.holonomy.push_back(s);
      if (s < 0) r.orientable = false;
    } else {
      r.holonomy.push_back(std::arg(hol));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace presets {

// diag(1,…,1,−1,…,−1) with n_plus positive and n_minus negative entries.
inline Mat standard_form(int n_plus, int n_minus) {
  Mat q = Mat::Zero(n_plus + n_minus, n_plus + n_minus);
  for (int i = 0; i < n_plus + n_minus; ++i) q(i, i) = i < n_plus ? 1.0 : -1.0;
  return q;
}

inline std::shared_ptr<const RigidFamily> standard_quadratic(AtlasPtr atlas, int n_plus, int n_minus) {
  const Mat q = standard_form(n_plus, n_minus);
  return make_rigid(std::move(atlas), [q](int, const Coords&, const Eigen::VectorXd&) { return q; }, true);
}

inline std::shared_ptr<const RigidFamily> bott_rigid(AtlasPtr atlas) {
  if (atlas->kind() != ManifoldKind::Sphere2) fail(ErrorCode::UnsupportedKind, "bott-rigid-s2 lives on Sphere2");
  return make_rigid(std::move(atlas),
                    [](int, const Coords&, const Eigen::VectorXd& y) { return Mat(Mat::Identity(2, 2) - 2.0 * bott(y)); },
                    false);
}

inline std::shared_ptr<const RigidFamily> clifford_rigid(AtlasPtr atlas) {
  if (atlas->kind() != ManifoldKind::Sphere4) fail(ErrorCode::UnsupportedKind, "clifford-rigid-s4 lives on Sphere4");
  return make_rigid(std::move(atlas),
                    [](int, const Coords&, const Eigen::VectorXd& y) { return Mat(Mat::Identity(4, 4) - 2.0 * clifford(y)); },
                    false);
}

// Q(θ) = R(θ/2) diag(−1, 1) R(θ/2)ᵀ: the negative line turns by π around the circle.
inline std::shared_ptr<const RigidFamily> mobius(AtlasPtr atlas) {
  if (atlas->kind() != ManifoldKind::Circle) fail(ErrorCode::UnsupportedKind, "mobius family lives on Circle");
  return make_rigid(std::move(atlas),
                    [](int, const Coords& x, const Eigen::VectorXd&) {
                      const double c = std::cos(x[0] / 2), s = std::sin(x[0] / 2);
                      Eigen::Matrix2d R;
                      R << c, -s, s, c;
                      Eigen::Matrix2d D = Eigen::Vector2d(-1.0, 1.0).asDiagonal();
                      return Mat((R * D * R.transpose()).cast<cplx>());
                    },
                    true);
}

// g(v) = ‖v‖ v₁: homogenization of the height function on S^{N−1}.
inline TubeFunction homogenized_height(AtlasPtr atlas, int N) {
  TubeFunction f;
  f.atlas = std::move(atlas);
  f.N = N;
  f.eval = [](const BasePoint&, const Eigen::VectorXd& v) {
    TubeValue t;
    const double r = v.norm();
    t.value = r * v[0];
    t.grad = (r > 0 ? v[0] / r : 0.0) * v;
    t.grad[0] += r;
    return t;
  };
  f.homogeneous = f.eval;
  return f;
}

} // namespace presets

} // namespace torsionlab
