#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "basegrid.hpp"
#include "constants.hpp"
#include "error.hpp"
#include "tubefun.hpp"

namespace torsionlab {

struct GFValue {
  double value = 0.0;
  Eigen::VectorXd grad_v;  // ∂_v f
  Eigen::MatrixXd hess_vv; // ∂²_vv f
  Eigen::MatrixXd mixed;   // N × dim M, ∂_m ∂_v f in chart coordinates
  Eigen::VectorXd grad_m;  // ∂_m f
};

using GFEvaluator = std::function<GFValue(int chart, const Coords& m, const Eigen::VectorXd& v)>;
using GFThird = std::function<double(int chart, const Coords& m, const Eigen::VectorXd& v, const Eigen::VectorXd& w)>;

// ε = f − (g(m) + Σ signs_i v_i² + Σ slopes_i v_i) is declared to have fiber gradient
// ≤ bound outside `radius`. Coordinates with sign 0 are linear directions.
struct AdmissibleShape {
  Eigen::VectorXd signs;
  Eigen::VectorXd slopes;
  std::function<double(int chart, const Coords& m)> g;
  double radius = 1.0;
  double bound = 1e-6;

  double value(int c, const Coords& m, const Eigen::VectorXd& v) const {
    double s = g ? g(c, m) : 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += signs[i] * v[i] * v[i] + slopes[i] * v[i];
    return s;
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& v) const {
    return 2.0 * signs.cwiseProduct(v) + slopes;
  }
};

struct GeneratingFunction {
  AtlasPtr atlas;
  int N = 0;
  GFEvaluator eval;
  GFThird third; // optional analytic d³f(w, w, w)
  std::optional<AdmissibleShape> shape;
  std::vector<Eigen::VectorXd> seeds;
  std::string name;
};

// ---------------------------------------------------------------------------

struct AdmissibleReport {
  bool admissible = false;      // ‖∇_v ε‖ ≤ declared bound on every shell
  bool compact_support = false; // ‖∇_v ε‖ ≤ 1e−6 already on the innermost shell
  std::vector<double> radii;
  std::vector<double> max_gradient; // ‖∇_v ε‖ per shell
  std::vector<double> max_value;    // |ε| per shell
};

inline AdmissibleReport check_admissible(const GeneratingFunction& f, std::vector<double> factors = {1.0, 2.0, 4.0}) {
  if (!f.shape) fail(ErrorCode::ProbeFailure, "no declared asymptotic shape");
  const AdmissibleShape& sh = *f.shape;
  AdmissibleReport r;
  const auto base = base_probes(*f.atlas, 64);
  const Eigen::MatrixXd dirs = probe_directions(f.N, 16 * f.N, 0x6164);
  for (double fac : factors) {
    const double R = sh.radius * fac;
    double gmax = 0.0, vmax = 0.0;
    for (const BasePoint& b : base) {
      const Coords m = f.atlas->chart(b.chart).coords(b.point);
      for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
        const Eigen::VectorXd v = R * dirs.col(j);
        const GFValue e = f.eval(b.chart, m, v);
        if (!std::isfinite(e.value) || !e.grad_v.allFinite())
          fail(ErrorCode::ProbeFailure, "evaluator is not finite on the shell of radius " + std::to_string(R));
        gmax = std::max(gmax, (e.grad_v - sh.grad(v)).norm());
        vmax = std::max(vmax, std::abs(e.value - sh.value(b.chart, m, v)));
      }
    }
    r.radii.push_back(R);
    r.max_gradient.push_back(gmax);
    r.max_value.push_back(vmax);
  }
  r.admissible = true;
  r.compact_support = true;
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    if (!(r.max_gradient[i] <= sh.bound)) r.admissible = false;
    if (!(r.max_gradient[i] <= tol::transversality)) r.compact_support = false;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct SheetPoint {
  int chart = 0;
  std::size_t point = 0;
  Coords m{};
  Eigen::VectorXd v;
  double z = 0.0;
  int index = 0;
  double margin = 0.0;
  Eigen::VectorXd p; // ∂_m f
  int sheet = 0;
};

struct CuspPoint {
  int chart = 0;
  Coords m{};
  Eigen::VectorXd v;
  double z = 0.0;
  int index = 0;
  int co_orientation = 0;
};

struct FrontDiagram {
  AtlasPtr atlas;
  int N = 0;
  std::vector<SheetPoint> sheets;
  std::vector<CuspPoint> cusps;
  int num_sheets = 0;
};

namespace detail {

inline int negative_count(const Eigen::MatrixXd& H, double tol) {
  if (H.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() < -tol).count());
}

// Damped Newton on ∂_v f = 0 with least-squares steps; continues past the acceptance
// threshold so that degenerate (cubic) zeros are polished as far as rounding allows.
inline std::optional<Eigen::VectorXd> newton(const GeneratingFunction& f, int c, const Coords& m, Eigen::VectorXd v) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_v = v;
  for (int it = 0; it < 200; ++it) {
    const GFValue e = f.eval(c, m, v);
    if (!e.grad_v.allFinite() || !e.hess_vv.allFinite()) return std::nullopt;
    const double gn = e.grad_v.norm();
    if (gn < best) {
      best = gn;
      best_v = v;
    }
    if (gn <= 1e-15) break;
    Eigen::VectorXd step = e.hess_vv.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-e.grad_v);
    const double cap = std::max(1.0, v.norm());
    if (step.norm() > cap) step *= cap / step.norm();
    if (step.norm() <= 1e-17 * std::max(1.0, v.norm())) break;
    v += step;
    if (!v.allFinite() || v.norm() > 1e8) return std::nullopt;
  }
  if (best > tol::newton_residual) return std::nullopt;
  return best_v;
}

inline double transversality_margin(const GFValue& e) {
  const Eigen::Index N = e.hess_vv.rows(), d = e.mixed.cols();
  Eigen::MatrixXd B(N, N + d);
  B << e.hess_vv, e.mixed;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues().minCoeff();
}

inline bool same_point(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() <= 1e-4 * (1.0 + std::max(a.norm(), b.norm()));
}

} // namespace detail

// Critical points of v ↦ f(m, v) over every chart point. Points are visited in index
// order; candidates are the seeds plus first-order predictions from the solved
// neighbours one step back along each axis, which also carry sheet labels.
inline FrontDiagram fiberwise_critical_locus(const GeneratingFunction& f, const std::vector<Eigen::VectorXd>& extra_seeds = {}) {
  FrontDiagram fd;
  fd.atlas = f.atlas;
  fd.N = f.N;
  std::vector<Eigen::VectorXd> seeds = f.seeds;
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  int next_sheet = 0;
  for (int c = 0; c < f.atlas->num_charts(); ++c) {
    const Chart& ch = f.atlas->chart(c);
    std::vector<std::vector<std::size_t>> at_point(ch.npoints); // positions in fd.sheets
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      const Coords m = ch.coords(p);
      const auto mi = ch.multi_index(p);
      struct Candidate {
        Eigen::VectorXd v;
        int sheet;
      };
      std::vector<Candidate> cand;
      for (int a = 0; a < ch.dim; ++a) {
        if (mi[a] == 0) continue;
        auto mp = mi;
        mp[a] -= 1;
        for (std::size_t s : at_point[ch.index(mp)]) {
          const SheetPoint& prev = fd.sheets[s];
          const GFValue e = f.eval(c, prev.m, prev.v);
          Eigen::VectorXd dv = e.hess_vv.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-e.mixed.col(a));
          if (Eigen::JacobiSVD<Eigen::MatrixXd>(e.hess_vv).singularValues().minCoeff() < 1e-4) dv.setZero();
          cand.push_back({prev.v + ch.h[a] * dv, prev.sheet});
          cand.push_back({prev.v, prev.sheet});
        }
      }
      for (const auto& s : seeds) cand.push_back({s, -1});
      std::vector<std::size_t> here;
      for (const Candidate& cd : cand) {
        auto sol = detail::newton(f, c, m, cd.v);
        if (!sol) continue;
        bool dup = false;
        for (std::size_t s : here)
          if (detail::same_point(fd.sheets[s].v, *sol)) {
            if (fd.sheets[s].sheet < 0) fd.sheets[s].sheet = cd.sheet;
            dup = true;
            break;
          }
        if (dup) continue;
        const GFValue e = f.eval(c, m, *sol);
        SheetPoint sp;
        sp.chart = c;
        sp.point = p;
        sp.m = m;
        sp.v = *sol;
        sp.z = e.value;
        sp.index = detail::negative_count(e.hess_vv, tol::kernel_eigen);
        sp.margin = detail::transversality_margin(e);
        sp.p = e.grad_m;
        sp.sheet = cd.sheet;
        if (!(sp.margin > tol::transversality))
          fail(ErrorCode::TransversalityLost, "margin " + std::to_string(sp.margin) + " at chart " + std::to_string(c) +
                                                  " point " + std::to_string(p));
        here.push_back(fd.sheets.size());
        fd.sheets.push_back(std::move(sp));
      }
      for (std::size_t s : here)
        if (fd.sheets[s].sheet < 0) fd.sheets[s].sheet = next_sheet++;
      at_point[p] = std::move(here);
    }
  }
  fd.num_sheets = next_sheet;
  return fd;
}

// ---------------------------------------------------------------------------

enum class SingularityKind { Morse, BirthDeath, NotModerate };

inline const char* singularity_name(SingularityKind k) {
  switch (k) {
    case SingularityKind::Morse: return "Morse";
    case SingularityKind::BirthDeath: return "BirthDeath";
    default: return "NotModerate";
  }
}

struct Classification {
  SingularityKind kind = SingularityKind::NotModerate;
  int index = 0;
  int co_orientation = 0;
  Eigen::VectorXd kernel; // oriented so its largest-magnitude entry is positive
  double cubic = 0.0;
};

inline double third_derivative(const GeneratingFunction& f, int c, const Coords& m, const Eigen::VectorXd& v,
                               const Eigen::VectorXd& w) {
  if (f.third) return f.third(c, m, v, w);
  const double eps = 1e-3 * std::max(1.0, v.norm());
  const Eigen::VectorXd gp = f.eval(c, m, v + eps * w).grad_v, g0 = f.eval(c, m, v).grad_v,
                        gm = f.eval(c, m, v - eps * w).grad_v;
  return (gp - 2.0 * g0 + gm).dot(w) / (eps * eps);
}

inline Classification classify_moderate(const GeneratingFunction& f, int c, const Coords& m, const Eigen::VectorXd& v) {
  Classification r;
  const GFValue e = f.eval(c, m, v);
  if (e.hess_vv.size() == 0) {
    r.kind = SingularityKind::Morse;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.hess_vv);
  const Eigen::VectorXd ev = es.eigenvalues();
  int zero = 0, zi = -1;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) <= tol::kernel_eigen) {
      ++zero;
      zi = static_cast<int>(i);
    }
  r.index = static_cast<int>((ev.array() < -tol::kernel_eigen).count());
  if (zero == 0) {
    r.kind = SingularityKind::Morse;
    return r;
  }
  if (zero > 1) return r;
  Eigen::VectorXd w = es.eigenvectors().col(zi);
  Eigen::Index imax;
  w.cwiseAbs().maxCoeff(&imax);
  if (w[imax] < 0) w = -w;
  r.kernel = w;
  r.cubic = third_derivative(f, c, m, v, w);
  if (std::abs(r.cubic) > tol::cubic_coefficient) {
    r.kind = SingularityKind::BirthDeath;
    r.co_orientation = r.cubic > 0 ? 1 : -1;
  }
  return r;
}

inline Classification classify_moderate(const GeneratingFunction& f, const SheetPoint& s) {
  return classify_moderate(f, s.chart, s.m, s.v);
}

namespace detail {

// Solve ∂_v f = 0 together with "smallest |eigenvalue| of ∂²_vv f = 0" for (s, v) on the
// segment m0 + s·(m1 − m0), using a finite-difference Jacobian.
inline std::optional<std::pair<double, Eigen::VectorXd>> refine_cusp(const GeneratingFunction& f, int c, const Coords& m0,
                                                                     const Coords& m1, double s, Eigen::VectorXd v) {
  const int N = f.N;
  auto at = [&](double t) {
    Coords m;
    for (int i = 0; i < 4; ++i) m[i] = m0[i] + t * (m1[i] - m0[i]);
    return m;
  };
  auto F = [&](double t, const Eigen::VectorXd& x) {
    const GFValue e = f.eval(c, at(t), x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.hess_vv, Eigen::EigenvaluesOnly);
    Eigen::Index k;
    es.eigenvalues().cwiseAbs().minCoeff(&k);
    Eigen::VectorXd out(N + 1);
    out.head(N) = e.grad_v;
    out[N] = es.eigenvalues()[k];
    return out;
  };
  for (int it = 0; it < 60; ++it) {
    const Eigen::VectorXd r = F(s, v);
    if (r.norm() < 1e-12) return std::make_pair(s, v);
    Eigen::MatrixXd J(N + 1, N + 1);
    const double hs = 1e-7;
    J.col(0) = (F(s + hs, v) - F(s - hs, v)) / (2 * hs);
    for (int i = 0; i < N; ++i) {
      Eigen::VectorXd dv = Eigen::VectorXd::Zero(N);
      dv[i] = hs;
      J.col(i + 1) = (F(s, v + dv) - F(s, v - dv)) / (2 * hs);
    }
    Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) return std::nullopt;
    s += step[0];
    v += step.tail(N);
    if (s < -1.0 || s > 2.0) return std::nullopt;
  }
  if (F(s, v).norm() < 1e-8 && s >= -1e-9 && s <= 1.0 + 1e-9) return std::make_pair(s, v);
  return std::nullopt;
}

} // namespace detail

// Birth–death points: sheet points whose Hessian degenerates on the grid, plus edges
// along which two sheets appear together, refined onto the degeneracy.
inline void locate_cusps(const GeneratingFunction& f, FrontDiagram& fd) {
  fd.cusps.clear();
  auto add = [&](int c, const Coords& m, const Eigen::VectorXd& v) {
    const Classification cl = classify_moderate(f, c, m, v);
    if (cl.kind != SingularityKind::BirthDeath) return;
    for (const CuspPoint& q : fd.cusps) {
      double d = 0.0;
      for (int i = 0; i < 4; ++i) d += std::abs(q.m[i] - m[i]);
      if (q.chart == c && d < 1e-9 && detail::same_point(q.v, v)) return;
    }
    fd.cusps.push_back({c, m, v, f.eval(c, m, v).value, cl.index, cl.co_orientation});
  };
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> by_point;
  for (std::size_t i = 0; i < fd.sheets.size(); ++i) by_point[{fd.sheets[i].chart, fd.sheets[i].point}].push_back(i);
  std::map<std::pair<int, std::size_t>, bool> degenerate;
  for (const SheetPoint& s : fd.sheets) {
    const Classification cl = classify_moderate(f, s);
    if (cl.kind == SingularityKind::BirthDeath) {
      add(s.chart, s.m, s.v);
      degenerate[{s.chart, s.point}] = true;
    }
  }
  for (int c = 0; c < f.atlas->num_charts(); ++c) {
    const Chart& ch = f.atlas->chart(c);
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      const auto mi = ch.multi_index(p);
      for (int a = 0; a < ch.dim; ++a) {
        if (mi[a] + 1 >= ch.res) continue;
        auto mn = mi;
        mn[a] += 1;
        const std::size_t pn = ch.index(mn);
        if (degenerate.count({c, p}) || degenerate.count({c, pn})) continue;
        const auto& A = by_point[{c, p}];
        const auto& B = by_point[{c, pn}];
        if (std::abs(int(A.size()) - int(B.size())) != 2) continue;
        const bool forward = B.size() > A.size();
        const auto& rich = forward ? B : A;
        const auto& poor = forward ? A : B;
        // the two sheets of the richer end without a continuation label on the poorer end
        std::vector<std::size_t> lone;
        for (std::size_t i : rich) {
          bool matched = false;
          for (std::size_t j : poor)
            if (fd.sheets[j].sheet == fd.sheets[i].sheet) matched = true;
          if (!matched) lone.push_back(i);
        }
        if (lone.size() != 2) continue;
        const Eigen::VectorXd v0 = 0.5 * (fd.sheets[lone[0]].v + fd.sheets[lone[1]].v);
        auto sol = detail::refine_cusp(f, c, ch.coords(p), ch.coords(pn), 0.5, v0);
        if (!sol) continue;
        Coords m;
        const Coords m0 = ch.coords(p), m1 = ch.coords(pn);
        for (int i = 0; i < 4; ++i) m[i] = m0[i] + sol->first * (m1[i] - m0[i]);
        add(c, m, sol->second);
      }
    }
  }
}

// ---------------------------------------------------------------------------

struct LiftSample {
  Coords q{};
  Eigen::VectorXd p;
  double z = 0.0;
  int sheet = 0;
  int index = 0;
};

struct LegendrianLift {
  std::vector<LiftSample> samples;
  bool embedded = true;
  std::size_t coincidences = 0;
};

inline LegendrianLift legendrian_lift(const FrontDiagram& fd) {
  LegendrianLift L;
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> by_point;
  for (std::size_t i = 0; i < fd.sheets.size(); ++i) {
    const SheetPoint& s = fd.sheets[i];
    L.samples.push_back({s.m, s.p, s.z, s.sheet, s.index});
    by_point[{s.chart, s.point}].push_back(i);
  }
  for (const auto& [key, ids] : by_point)
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const SheetPoint &x = fd.sheets[ids[a]], &y = fd.sheets[ids[b]];
        if (x.sheet != y.sheet && std::abs(x.z - y.z) + (x.p - y.p).norm() <= 1e-9) ++L.coincidences;
      }
  L.embedded = L.coincidences == 0;
  return L;
}

// ---------------------------------------------------------------------------
// Doubling: F(m, v, s) = f(m, v) + ψ(s). ψ(s) = s³ − 3σs for |s| ≤ R0 = 2√σ, blended by
// the quintic smoothstep into the odd linear function c·s for |s| ≥ R1 = 2R0 + 1 with
// c = 3R1². In the blend ψ' > 0, so the only critical points of ψ are ±√σ.

struct DoublingProfile {
  double sigma, R0, R1, c;

  explicit DoublingProfile(double s) : sigma(s), R0(2.0 * std::sqrt(s)), R1(4.0 * std::sqrt(s) + 1.0), c(3.0 * R1 * R1) {}

  // ψ, ψ', ψ'', ψ''' at s
  std::array<double, 4> operator()(double s) const {
    const double sg = s < 0 ? -1.0 : 1.0, x = std::abs(s);
    const double p = x * x * x - 3 * sigma * x, p1 = 3 * x * x - 3 * sigma, p2 = 6 * x, p3 = 6.0;
    std::array<double, 4> r;
    if (x <= R0) {
      r = {p, p1, p2, p3};
    } else if (x >= R1) {
      r = {c * x, c, 0.0, 0.0};
    } else {
      const double L = R1 - R0, u = (x - R0) / L;
      const double S = u * u * u * (u * (6 * u - 15) + 10);
      const double S1 = 30 * u * u * (u - 1) * (u - 1) / L;
      const double S2 = (120 * u * u * u - 180 * u * u + 60 * u) / (L * L);
      const double S3 = (360 * u * u - 360 * u + 60) / (L * L * L);
      const double chi = 1 - S, c1 = -S1, c2 = -S2, c3 = -S3;
      const double q = p - c * x, q1 = p1 - c;
      r = {chi * p + (1 - chi) * c * x, c1 * q + chi * p1 + (1 - chi) * c, c2 * q + 2 * c1 * q1 + chi * p2,
           c3 * q + 3 * c2 * q1 + 3 * c1 * p2 + chi * p3};
    }
    r[0] *= sg;
    r[2] *= sg;
    return r;
  }
};

inline GeneratingFunction double_gf(const GeneratingFunction& f, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::NonpositiveSeparation, "σ must be positive");
  const DoublingProfile psi(sigma);
  GeneratingFunction F;
  F.atlas = f.atlas;
  F.N = f.N + 1;
  F.name = f.name + "+double";
  const int N = f.N;
  auto base = f.eval;
  F.eval = [base, psi, N](int c, const Coords& m, const Eigen::VectorXd& v) {
    const GFValue e = base(c, m, v.head(N));
    const auto ps = psi(v[N]);
    GFValue o;
    o.value = e.value + ps[0];
    o.grad_v.resize(N + 1);
    o.grad_v << e.grad_v, ps[1];
    o.hess_vv = Eigen::MatrixXd::Zero(N + 1, N + 1);
    o.hess_vv.topLeftCorner(N, N) = e.hess_vv;
    o.hess_vv(N, N) = ps[2];
    o.mixed = Eigen::MatrixXd::Zero(N + 1, e.mixed.cols());
    o.mixed.topRows(N) = e.mixed;
    o.grad_m = e.grad_m;
    return o;
  };
  if (f.third) {
    auto t = f.third;
    F.third = [t, psi, N](int c, const Coords& m, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
      return t(c, m, v.head(N), w.head(N)) + psi(v[N])[3] * w[N] * w[N] * w[N];
    };
  }
  if (f.shape) {
    AdmissibleShape sh = *f.shape;
    sh.signs.conservativeResize(N + 1);
    sh.signs[N] = 0.0;
    sh.slopes.conservativeResize(N + 1);
    sh.slopes[N] = psi.c;
    sh.radius = std::max(sh.radius, psi.R1);
    // ε gains ψ(s) − c·s, whose derivative is bounded but supported on the slab |s| < R1
    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) sup = std::max(sup, std::abs(psi(psi.R1 * i / 20000.0)[1] - psi.c));
    sh.bound += 1.01 * sup;
    F.shape = sh;
  }
  const double r = std::sqrt(sigma);
  for (const auto& s : f.seeds)
    for (double sg : {-1.0, 1.0}) {
      Eigen::VectorXd x(N + 1);
      x << s, sg * r;
      F.seeds.push_back(x);
    }
  return F;
}

// ---------------------------------------------------------------------------

namespace presets {

// Σ_{i<n+} x_i² − Σ_j y_j² on any atlas.
inline GeneratingFunction zero_section(AtlasPtr atlas, int n_plus, int n_minus) {
  GeneratingFunction f;
  f.atlas = atlas;
  f.N = n_plus + n_minus;
  f.name = "zero-section";
  Eigen::VectorXd sg(f.N);
  for (int i = 0; i < f.N; ++i) sg[i] = i < n_plus ? 1.0 : -1.0;
  const int d = atlas->dim();
  f.eval = [sg, d](int, const Coords&, const Eigen::VectorXd& v) {
    GFValue e;
    e.value = v.dot(sg.cwiseProduct(v));
    e.grad_v = 2.0 * sg.cwiseProduct(v);
    e.hess_vv = Eigen::MatrixXd(2.0 * sg.asDiagonal());
    e.mixed = Eigen::MatrixXd::Zero(v.size(), d);
    e.grad_m = Eigen::VectorXd::Zero(d);
    return e;
  };
  f.third = [](int, const Coords&, const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; };
  f.shape = AdmissibleShape{sg, Eigen::VectorXd::Zero(f.N), {}, 1.0, 1e-6};
  f.seeds = {Eigen::VectorXd::Zero(f.N)};
  return f;
}

// v³ − 3tv over an interval.
inline GeneratingFunction cubic_fold(int resolution, double lo = -1.0, double hi = 1.0) {
  GeneratingFunction f;
  f.atlas = build_base(ManifoldKind::Interval, resolution, std::make_pair(lo, hi));
  f.N = 1;
  f.name = "cubic-fold";
  f.eval = [](int, const Coords& m, const Eigen::VectorXd& v) {
    const double t = m[0], x = v[0];
    GFValue e;
    e.value = x * x * x - 3 * t * x;
    e.grad_v = Eigen::VectorXd::Constant(1, 3 * x * x - 3 * t);
    e.hess_vv = Eigen::MatrixXd::Constant(1, 1, 6 * x);
    e.mixed = Eigen::MatrixXd::Constant(1, 1, -3.0);
    e.grad_m = Eigen::VectorXd::Constant(1, -3 * x);
    return e;
  };
  f.third = [](int, const Coords&, const Eigen::VectorXd&, const Eigen::VectorXd& w) { return 6.0 * w[0] * w[0] * w[0]; };
  f.seeds = {Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
  return f;
}

// z³ + 3(‖y‖² − 1)z − x₁² + x₂² over the square base y ∈ [−1.5, 1.5]², fiber (z, x₁, x₂).
inline GeneratingFunction wrinkle(int resolution) {
  GeneratingFunction f;
  f.atlas = build_base(ManifoldKind::Box2, resolution, std::make_pair(-1.5, 1.5));
  f.N = 3;
  f.name = "wrinkle";
  f.eval = [](int, const Coords& m, const Eigen::VectorXd& v) {
    const double r2 = m[0] * m[0] + m[1] * m[1], z = v[0];
    GFValue e;
    e.value = z * z * z + 3 * (r2 - 1) * z - v[1] * v[1] + v[2] * v[2];
    e.grad_v = Eigen::Vector3d(3 * z * z + 3 * (r2 - 1), -2 * v[1], 2 * v[2]);
    e.hess_vv = Eigen::Vector3d(6 * z, -2, 2).asDiagonal();
    e.mixed = Eigen::MatrixXd::Zero(3, 2);
    e.mixed(0, 0) = 6 * m[0];
    e.mixed(0, 1) = 6 * m[1];
    e.grad_m = Eigen::Vector2d(6 * m[0] * z, 6 * m[1] * z);
    return e;
  };
  f.third = [](int, const Coords&, const Eigen::VectorXd&, const Eigen::VectorXd& w) { return 6.0 * w[0] * w[0] * w[0]; };
  f.seeds = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0)};
  return f;
}

} // namespace presets

} // namespace torsionlab
