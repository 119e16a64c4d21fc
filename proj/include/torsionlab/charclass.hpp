#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "basegrid.hpp"
#include "chainkit.hpp"
#include "famtor.hpp"
#include "parallel.hpp"

namespace torsionlab {

namespace detail {

// B_{2j}, j = 1..20
inline constexpr std::array<double, 20> kBernoulliEven = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
};

} // namespace detail

// Euler–Maclaurin with cutoff N = 10 and up to 20 Bernoulli corrections.
inline double zeta(double s) {
  if (!(s > 1.0)) fail(ErrorCode::DomainError, "zeta needs s > 1");
  const int N = 10;
  double sum = 0.0;
  for (int n = N - 1; n >= 1; --n) sum += std::pow(double(n), -s);
  sum += std::pow(double(N), 1.0 - s) / (s - 1.0) + 0.5 * std::pow(double(N), -s);
  double rising = s;                 // s(s+1)…(s+2j−2)
  double fact = 2.0;                 // (2j)!
  double npow = std::pow(double(N), -s - 1.0);
  for (int j = 1; j <= 20; ++j) {
    const double term = detail::kBernoulliEven[j - 1] / fact * rising * npow;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2.0 * j + 1) * (2.0 * j + 2);
    npow /= double(N) * N;
  }
  return sum;
}

namespace detail {

inline cplx dilog_series(cplx z) {
  cplx sum = 0.0, zk = z;
  for (int k = 1; k < 400; ++k) {
    const cplx term = zk / double(k * k);
    sum += term;
    if (std::abs(term) < 1e-18) break;
    zk *= z;
  }
  return sum;
}

// Li₂(z) = Σ_{n≥0} B_n wⁿ⁺¹/(n+1)!, w = −log(1−z), valid for |w| < 2π.
inline cplx dilog_bernoulli(cplx z) {
  const cplx w = -std::log(1.0 - z);
  cplx sum = w - w * w / 4.0; // n = 0, 1
  cplx wp = w;                // w^{n+1}, n = 0
  double fact = 1.0;          // (n+1)!
  for (int j = 1; j <= 20; ++j) {
    const int n = 2 * j;
    wp *= w * w;
    fact *= double(n) * (n + 1);
    const cplx term = kBernoulliEven[j - 1] * wp / fact;
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

} // namespace detail

// Direct series for |z| ≤ ½; reflection through 1 − z near z = 1; otherwise the
// Bernoulli expansion in −log(1 − z).
inline cplx dilog(cplx z) {
  const double az = std::abs(z);
  if (az > 1.0 + 1e-15) fail(ErrorCode::DomainError, "dilog needs |z| ≤ 1");
  if (az <= 0.5) return detail::dilog_series(z);
  const cplx w = 1.0 - z;
  if (std::abs(w) == 0.0) return kPi * kPi / 6.0;
  if (std::abs(w) < 0.5) return -detail::dilog_series(w) + kPi * kPi / 6.0 - std::log(z) * std::log(w);
  return detail::dilog_bernoulli(z);
}

// ---------------------------------------------------------------------------

struct BundleProjector {
  AtlasPtr atlas;
  int rank = 0;
  std::vector<std::vector<Mat>> P; // [chart][point]
  bool complexified_real = false;  // caller-declared real structure
  int complexification_factor = 1; // recorded multiplicity, never folded into values
};

struct ProjectorDiagnostics {
  double idempotency = 0.0;
  double hermiticity = 0.0;
  bool constant_rank = true;
};

inline ProjectorDiagnostics check_projector(const BundleProjector& b) {
  ProjectorDiagnostics d;
  for (const auto& chart : b.P)
    for (const Mat& p : chart) {
      d.idempotency = std::max(d.idempotency, (p * p - p).cwiseAbs().maxCoeff());
      d.hermiticity = std::max(d.hermiticity, (p - p.adjoint()).cwiseAbs().maxCoeff());
      if (std::lround(p.trace().real()) != b.rank) d.constant_rank = false;
    }
  return d;
}

template <class Fn>
BundleProjector sample_projector(AtlasPtr atlas, Fn&& fn, bool complexified_real = false) {
  BundleProjector b;
  b.atlas = std::move(atlas);
  b.complexified_real = complexified_real;
  for (int c = 0; c < b.atlas->num_charts(); ++c) {
    const Chart& ch = b.atlas->chart(c);
    std::vector<Mat> pts(ch.npoints);
    parallel_for(ch.npoints, [&](std::size_t p) { pts[p] = fn(c, ch.coords(p), b.atlas->ambient(c, p)); });
    b.P.push_back(std::move(pts));
  }
  b.rank = static_cast<int>(std::lround(b.P[0][0].trace().real()));
  const auto d = check_projector(b);
  if (d.idempotency > tol::projector_idempotent || d.hermiticity > tol::construction || !d.constant_rank)
    fail(ErrorCode::ProjectorDrift, "sampled field is not a constant-rank Hermitian projector");
  return b;
}

inline BundleProjector direct_sum(const BundleProjector& a, const BundleProjector& b) {
  if (a.atlas != b.atlas) fail(ErrorCode::AtlasMismatch, "projectors on different atlases");
  BundleProjector s;
  s.atlas = a.atlas;
  s.rank = a.rank + b.rank;
  s.complexified_real = a.complexified_real && b.complexified_real;
  s.complexification_factor = std::max(a.complexification_factor, b.complexification_factor);
  for (std::size_t c = 0; c < a.P.size(); ++c) {
    std::vector<Mat> pts(a.P[c].size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const Mat& x = a.P[c][p];
      const Mat& y = b.P[c][p];
      Mat m = Mat::Zero(x.rows() + y.rows(), x.cols() + y.cols());
      m.topLeftCorner(x.rows(), x.cols()) = x;
      m.bottomRightCorner(y.rows(), y.cols()) = y;
      pts[p] = std::move(m);
    }
    s.P.push_back(std::move(pts));
  }
  return s;
}

namespace presets {

inline std::array<Mat, 3> pauli() {
  Mat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, cplx(0, -1), cplx(0, 1), 0;
  s3 << 1, 0, 0, -1;
  return {s1, s2, s3};
}

// Five anticommuting Hermitian 4×4 matrices squaring to 1.
inline std::array<Mat, 5> clifford5() {
  auto s = pauli();
  Mat id = Mat::Identity(2, 2);
  auto kron = [](const Mat& a, const Mat& b) {
    Mat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  return {kron(s[0], s[0]), kron(s[1], s[0]), kron(s[2], s[0]), kron(id, s[1]), kron(id, s[2])};
}

// P(x) = ½(1 + x·σ) on the unit sphere in R³.
inline Mat bott(const Eigen::VectorXd& x) {
  auto s = pauli();
  Mat p = Mat::Identity(2, 2);
  for (int i = 0; i < 3; ++i) p += x[i] * s[i];
  return 0.5 * p;
}

// P(x) = ½(1 + Σ x_a Γ_a) on the unit sphere in R⁵; a quaternionic line.
inline Mat clifford(const Eigen::VectorXd& x) {
  static const auto g = clifford5();
  Mat p = Mat::Identity(4, 4);
  for (int a = 0; a < 5; ++a) p += x[a] * g[a];
  return 0.5 * p;
}

inline BundleProjector bott_projector(AtlasPtr atlas) {
  if (atlas->kind() != ManifoldKind::Sphere2) fail(ErrorCode::UnsupportedKind, "Bott projector lives on Sphere2");
  return sample_projector(std::move(atlas), [](int, const Coords&, const Eigen::VectorXd& y) { return bott(y); });
}

inline BundleProjector clifford_projector(AtlasPtr atlas) {
  if (atlas->kind() != ManifoldKind::Sphere4) fail(ErrorCode::UnsupportedKind, "Clifford projector lives on Sphere4");
  auto b = sample_projector(std::move(atlas), [](int, const Coords&, const Eigen::VectorXd& y) { return clifford(y); });
  b.complexification_factor = 2;
  return b;
}

inline BundleProjector trivial_projector(AtlasPtr atlas, int n, int rank) {
  Mat p = Mat::Zero(n, n);
  for (int i = 0; i < rank; ++i) p(i, i) = 1.0;
  return sample_projector(std::move(atlas), [p](int, const Coords&, const Eigen::VectorXd&) { return p; }, true);
}

} // namespace presets

// ch_k = (1/k!) Tr(P ((i/2π) F)^k) with F = P dP∧dP P. Since dP∧dP commutes with P,
// Tr(P F^k) = Tr(P (dP)^{2k}).
inline SampledForm chern_character_form(const BundleProjector& b, int k) {
  const auto& at = *b.atlas;
  if (k < 0 || 2 * k > at.dim()) fail(ErrorCode::DegreeOverflow, "2k exceeds the base dimension");
  SampledForm out(b.atlas, 2 * k);
  for (int c = 0; c < at.num_charts(); ++c)
    for (const Mat& p : b.P[c])
      if ((p * p - p).cwiseAbs().maxCoeff() > tol::projector_idempotent)
        fail(ErrorCode::ProjectorDrift, "‖P² − P‖ exceeds tolerance");
  if (k == 0) {
    for (auto& chart : out.comps) std::fill(chart.begin(), chart.end(), double(b.rank));
    return out;
  }
  const auto idx = multi_indices(at.dim(), 2 * k);
  const int nc = static_cast<int>(idx.size());
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  const cplx pref = std::pow(cplx(0.0, 1.0 / (2.0 * kPi)), k) / fact;
  for (int c = 0; c < at.num_charts(); ++c) {
    const Chart& ch = at.chart(c);
    parallel_for(ch.npoints, [&](std::size_t p) {
      std::vector<Mat> dP(at.dim());
      for (int a = 0; a < at.dim(); ++a) dP[a] = detail::axis_derivative(ch, b.P[c], p, a);
      for (int i = 0; i < nc; ++i) {
        const cplx v = pref * (b.P[c][p] * detail::wedge_component(dP, idx[i])).trace();
        out.comps[c][p * nc + i] = v.real();
      }
    });
  }
  return out;
}

// p_k = ½ (−1)^k ζ(2k+1) ch_{2k}; the projector must be declared as a complexified real bundle.
inline SampledForm pontryagin_character(const BundleProjector& b, int k) {
  if (k < 1) fail(ErrorCode::DegreeMismatch, "p_k needs k ≥ 1");
  if (!b.complexified_real) fail(ErrorCode::DomainError, "projector not declared as a complexified real bundle");
  SampledForm ch = chern_character_form(b, 2 * k);
  const double f = 0.5 * (k % 2 == 0 ? 1.0 : -1.0) * zeta(2.0 * k + 1.0);
  for (auto& chart : ch.comps)
    for (double& v : chart) v *= f;
  return ch;
}

// ---------------------------------------------------------------------------
// Strata cochains and the alternating push-down.

using Mask = std::vector<std::vector<char>>; // [chart][point]

struct Stratum {
  int index = 0;
  SampledForm values;
  Mask mask;
};

struct StrataCochain {
  AtlasPtr atlas;
  int degree = 0;
  std::vector<Stratum> strata;
};

inline Mask full_mask(const BaseAtlas& at) {
  Mask m;
  for (int c = 0; c < at.num_charts(); ++c) m.emplace_back(at.chart(c).npoints, 1);
  return m;
}

namespace detail {

inline double index_sign(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }

// Mask edges must cancel in adjacent-index pairs with matching direction.
inline void check_mask_edges(const StrataCochain& s) {
  const auto& at = *s.atlas;
  for (int c = 0; c < at.num_charts(); ++c) {
    const Chart& ch = at.chart(c);
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      auto m = ch.multi_index(p);
      for (int a = 0; a < ch.dim; ++a) {
        if (!ch.periodic[a] && m[a] == ch.res - 1) continue;
        auto mn = m;
        mn[a] = (m[a] + 1) % ch.res;
        const std::size_t pn = ch.index(mn);
        // net change per index: +1 appears, −1 disappears
        std::map<int, int> change;
        for (const Stratum& st : s.strata) {
          const int d = int(st.mask[c][pn]) - int(st.mask[c][p]);
          if (d) change[st.index] += d;
        }
        if (change.empty()) continue;
        // pair index i with i+1 greedily from the bottom
        std::map<int, int> rest = change;
        for (const auto& entry : change) {
          const int i = entry.first;
          if (rest[i] == 0) continue;
          const int carry = rest[i];
          rest[i] = 0;
          rest[i + 1] -= carry;
        }
        for (auto& [i, v] : rest)
          if (v != 0)
            fail(ErrorCode::UncancelledBoundary,
                 "mask edge at chart " + std::to_string(c) + " point " + std::to_string(p) + " lacks a partner of index " +
                     std::to_string(i));
      }
    }
  }
}

} // namespace detail

// Pointwise fibre Euler characteristic; must be constant on the base.
inline int euler_characteristic(const StrataCochain& s) {
  detail::check_mask_edges(s);
  if (s.strata.empty()) return 0;
  int chi = 0;
  for (const Stratum& st : s.strata)
    if (st.mask[0][0]) chi += (st.index % 2 == 0) ? 1 : -1;
  return chi;
}

inline SampledForm pushdown(const StrataCochain& s) {
  detail::check_mask_edges(s);
  SampledForm out(s.atlas, s.degree);
  const int nc = out.ncomp();
  for (int c = 0; c < s.atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < s.atlas->chart(c).npoints; ++p)
      for (int k = 0; k < nc; ++k) {
        double acc = 0.0;
        for (const Stratum& st : s.strata)
          if (st.mask[c][p]) acc += detail::index_sign(st.index) * st.values.comps[c][p * nc + k];
        out.comps[c][p * nc + k] = acc;
      }
  return out;
}

// π^*: a base cochain copied onto each stratum of the given layout.
inline StrataCochain pullback(const SampledForm& w, const std::vector<std::pair<int, Mask>>& layout) {
  StrataCochain s;
  s.atlas = w.atlas;
  s.degree = w.degree;
  for (const auto& [index, mask] : layout) s.strata.push_back({index, w, mask});
  return s;
}

// −(τ_{2k}(f) + ∫ π_*^{Σf} γ) in the tube convention; the unsigned sum when
// `unsigned_combination` is set.
inline double assemble_framing(const TorsionResult& tau_f, const StrataCochain& gamma, bool unsigned_combination = false) {
  if (gamma.degree != tau_f.degree) fail(ErrorCode::DegreeMismatch, "strata degree differs from the torsion degree");
  if (!tau_f.integral) fail(ErrorCode::DegreeMismatch, "torsion form is not top degree");
  if (gamma.atlas != tau_f.form.atlas) fail(ErrorCode::DegreeMismatch, "strata and torsion live on different atlases");
  const double a = *tau_f.integral;
  const double b = integrate_form(pushdown(gamma));
  return unsigned_combination ? (a + b) : -(a + b);
}

} // namespace torsionlab
