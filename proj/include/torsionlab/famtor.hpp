#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "basegrid.hpp"
#include "chainkit.hpp"
#include "parallel.hpp"

namespace torsionlab {

using Differentials = std::vector<Mat>; // index q−1 holds d_q
using FamilySampler = std::function<Differentials(int chart, const Coords& x, const Eigen::VectorXd& ambient)>;

struct ChainFamily {
  AtlasPtr atlas;
  std::vector<int> ranks;
  UnitTag unit_tag;
  std::string provenance = "Sampled";
  std::vector<std::vector<Differentials>> samples; // [chart][point]
  FamilySampler sampler;                           // present for generated families

  const Differentials& at(int c, std::size_t p) const { return samples[c][p]; }
  int top_degree() const { return static_cast<int>(ranks.size()) - 1; }
};

inline ChainFamily sample_family(AtlasPtr atlas, std::vector<int> ranks, UnitTag tag, std::string provenance,
                                 FamilySampler fn) {
  ChainFamily f;
  f.atlas = std::move(atlas);
  f.ranks = std::move(ranks);
  f.unit_tag = tag;
  f.provenance = std::move(provenance);
  f.sampler = std::move(fn);
  for (int c = 0; c < f.atlas->num_charts(); ++c) {
    const Chart& ch = f.atlas->chart(c);
    std::vector<Differentials> pts(ch.npoints);
    parallel_for(ch.npoints, [&](std::size_t p) { pts[p] = f.sampler(c, ch.coords(p), f.atlas->ambient(c, p)); });
    for (std::size_t p = 0; p < ch.npoints; ++p)
      for (int q = 1; q <= f.top_degree(); ++q) {
        const Mat& m = pts[p][q - 1];
        if (m.rows() != f.ranks[q - 1] || m.cols() != f.ranks[q])
          fail(ErrorCode::MalformedComplex, "sampled differential has wrong shape");
      }
    f.samples.push_back(std::move(pts));
  }
  return f;
}

inline ChainFamily zero_section_family(AtlasPtr atlas, const BasedComplex& tmpl) {
  if (!is_acyclic(tmpl).acyclic) fail(ErrorCode::NotAcyclic, "template complex is not acyclic");
  Differentials d = tmpl.differentials();
  return sample_family(std::move(atlas), tmpl.ranks(), tmpl.unit_tag(), "Named:zero-section",
                       [d](int, const Coords&, const Eigen::VectorXd&) { return d; });
}

// Pointwise direct sum; generators of `a` precede those of `b` in every degree.
inline ChainFamily direct_sum(const ChainFamily& a, const ChainFamily& b) {
  if (a.atlas != b.atlas) fail(ErrorCode::AtlasMismatch, "families live on different atlases");
  const int top = std::max(a.top_degree(), b.top_degree());
  auto rk = [](const ChainFamily& f, int q) { return (q < 0 || q > f.top_degree()) ? 0 : f.ranks[q]; };
  ChainFamily f;
  f.atlas = a.atlas;
  for (int q = 0; q <= top; ++q) f.ranks.push_back(rk(a, q) + rk(b, q));
  f.unit_tag = a.unit_tag;
  f.provenance = "Sampled";
  auto sum_at = [&](const Differentials& da, const Differentials& db) {
    Differentials out;
    for (int q = 1; q <= top; ++q) {
      Mat m = Mat::Zero(f.ranks[q - 1], f.ranks[q]);
      if (q <= a.top_degree()) m.topLeftCorner(rk(a, q - 1), rk(a, q)) = da[q - 1];
      if (q <= b.top_degree()) m.bottomRightCorner(rk(b, q - 1), rk(b, q)) = db[q - 1];
      out.push_back(std::move(m));
    }
    return out;
  };
  for (int c = 0; c < f.atlas->num_charts(); ++c) {
    std::vector<Differentials> pts(a.samples[c].size());
    for (std::size_t p = 0; p < pts.size(); ++p) pts[p] = sum_at(a.samples[c][p], b.samples[c][p]);
    f.samples.push_back(std::move(pts));
  }
  if (a.sampler && b.sampler) {
    auto sa = a.sampler, sb = b.sampler;
    f.sampler = [sa, sb, sum_at](int c, const Coords& x, const Eigen::VectorXd& y) { return sum_at(sa(c, x, y), sb(c, x, y)); };
  }
  return f;
}

// Global constant basis change g_q in every degree: d_q ↦ g_{q−1}⁻¹ d_q g_q.
inline ChainFamily change_basis(const ChainFamily& fam, const std::vector<Mat>& g) {
  ChainFamily f = fam;
  std::vector<Mat> gi;
  for (const Mat& m : g) gi.push_back(m.inverse());
  auto apply = [g, gi](Differentials d) {
    for (std::size_t q = 1; q <= d.size(); ++q) d[q - 1] = gi[q - 1] * d[q - 1] * g[q];
    return d;
  };
  for (auto& chart : f.samples)
    for (auto& d : chart) d = apply(d);
  if (fam.sampler) {
    auto s = fam.sampler;
    f.sampler = [s, apply](int c, const Coords& x, const Eigen::VectorXd& y) { return apply(s(c, x, y)); };
  }
  return f;
}

struct FamilyDiagnostics {
  double min_singular = 0.0;
  int worst_chart = 0;
  std::size_t worst_point = 0;
  double overlap_disagreement = 0.0; // only measured when a sampler is present
  double second_difference = 0.0;    // max |Δ²d|·res² over chart axes
};

inline Mat total_differential(const std::vector<int>& ranks, const Differentials& d) {
  const int n = std::accumulate(ranks.begin(), ranks.end(), 0);
  Mat D = Mat::Zero(n, n);
  int off = 0;
  for (std::size_t q = 1; q < ranks.size(); ++q) {
    D.block(off, off + ranks[q - 1], ranks[q - 1], ranks[q]) = d[q - 1];
    off += ranks[q - 1];
  }
  return D;
}

inline FamilyDiagnostics check_family(const ChainFamily& f) {
  FamilyDiagnostics r;
  r.min_singular = std::numeric_limits<double>::infinity();
  for (int c = 0; c < f.atlas->num_charts(); ++c) {
    const Chart& ch = f.atlas->chart(c);
    std::vector<double> sv(ch.npoints);
    parallel_for(ch.npoints, [&](std::size_t p) {
      Mat D = total_differential(f.ranks, f.samples[c][p]);
      D += Mat(D.adjoint());
      sv[p] = D.rows() ? Eigen::JacobiSVD<Mat>(D).singularValues().minCoeff() : 1.0;
    });
    for (std::size_t p = 0; p < ch.npoints; ++p)
      if (sv[p] < r.min_singular) {
        r.min_singular = sv[p];
        r.worst_chart = c;
        r.worst_point = p;
      }
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      auto m = ch.multi_index(p);
      for (int a = 0; a < ch.dim; ++a) {
        if (!ch.periodic[a] && (m[a] == 0 || m[a] == ch.res - 1)) continue;
        auto mp = m, mm = m;
        mp[a] = (m[a] + 1) % ch.res;
        mm[a] = (m[a] - 1 + ch.res) % ch.res;
        for (int q = 1; q <= f.top_degree(); ++q) {
          const Mat& d0 = f.samples[c][p][q - 1];
          if (!d0.size()) continue;
          Mat dd = f.samples[c][ch.index(mp)][q - 1] - 2.0 * d0 + f.samples[c][ch.index(mm)][q - 1];
          r.second_difference = std::max(r.second_difference, dd.cwiseAbs().maxCoeff() * ch.res * ch.res);
        }
      }
    }
  }
  if (f.sampler) {
    for (const auto& e : f.atlas->overlaps()) {
      const Differentials other = f.sampler(e.other, e.other_coords, f.atlas->to_ambient(e.other, e.other_coords));
      for (int q = 1; q <= f.top_degree(); ++q) {
        const Mat diff = other[q - 1] - f.samples[e.chart][e.point][q - 1];
        if (diff.size()) r.overlap_disagreement = std::max(r.overlap_disagreement, diff.cwiseAbs().maxCoeff());
      }
    }
  }
  return r;
}

// One Hermitian block of a degree Laplacian with its eigendecomposition.
struct HodgeBlock {
  std::vector<int> index; // positions inside the degree block
  Eigen::VectorXd evals;
  Mat evecs;
};

struct HodgePoint {
  std::vector<std::vector<HodgeBlock>> degree_blocks; // [q] → connected components of Δ_q
};

struct HodgeField {
  AtlasPtr atlas;
  std::vector<int> ranks;
  std::vector<std::vector<HodgePoint>> points; // [chart][point]
  double min_singular = 0.0;

  // Hermitian function F(h_q) at one point assembled from the cached spectra.
  template <class Fn>
  Mat apply(int c, std::size_t p, int q, Fn&& fn) const {
    Mat out = Mat::Zero(ranks[q], ranks[q]);
    for (const HodgeBlock& b : points[c][p].degree_blocks[q]) {
      Eigen::VectorXd v = b.evals.unaryExpr(fn);
      Mat sub = b.evecs * v.asDiagonal() * b.evecs.adjoint();
      for (std::size_t i = 0; i < b.index.size(); ++i)
        for (std::size_t j = 0; j < b.index.size(); ++j) out(b.index[i], b.index[j]) = sub(i, j);
    }
    return out;
  }

  Mat h(int c, std::size_t p, int q) const {
    return apply(c, p, q, [](double x) { return x; });
  }
};

namespace detail {

// Connected components of the nonzero pattern of a Hermitian matrix.
inline std::vector<std::vector<int>> components(const Mat& L) {
  const int n = static_cast<int>(L.rows());
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s}, members;
    comp[s] = static_cast<int>(out.size());
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      members.push_back(i);
      for (int j = 0; j < n; ++j)
        if (comp[j] < 0 && (L(i, j) != 0.0 || L(j, i) != 0.0)) {
          comp[j] = comp[s];
          stack.push_back(j);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

inline HodgePoint hodge_point(const std::vector<int>& ranks, const Differentials& d) {
  HodgePoint hp;
  const int top = static_cast<int>(ranks.size()) - 1;
  for (int q = 0; q <= top; ++q) {
    Mat L = Mat::Zero(ranks[q], ranks[q]);
    if (q + 1 <= top && ranks[q + 1]) L += d[q] * d[q].adjoint();
    if (q >= 1 && ranks[q - 1]) L += d[q - 1].adjoint() * d[q - 1];
    std::vector<HodgeBlock> blocks;
    for (auto& idx : components(L)) {
      const int m = static_cast<int>(idx.size());
      Mat sub(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub(i, j) = L(idx[i], idx[j]);
      Eigen::SelfAdjointEigenSolver<Mat> es(sub);
      blocks.push_back({idx, es.eigenvalues(), es.eigenvectors()});
    }
    hp.degree_blocks.push_back(std::move(blocks));
  }
  return hp;
}

} // namespace detail

// h = (d + d†)² is block diagonal by degree with blocks Δ_q.
inline HodgeField hodge_field(const ChainFamily& fam) {
  HodgeField hf;
  hf.atlas = fam.atlas;
  hf.ranks = fam.ranks;
  double worst = std::numeric_limits<double>::infinity();
  int wc = 0;
  std::size_t wp = 0;
  for (int c = 0; c < fam.atlas->num_charts(); ++c) {
    const Chart& ch = fam.atlas->chart(c);
    std::vector<HodgePoint> pts(ch.npoints);
    parallel_for(ch.npoints, [&](std::size_t p) { pts[p] = detail::hodge_point(fam.ranks, fam.samples[c][p]); });
    for (std::size_t p = 0; p < ch.npoints; ++p)
      for (auto& blocks : pts[p].degree_blocks)
        for (auto& b : blocks)
          if (b.evals.size() && b.evals.minCoeff() < worst) {
            worst = b.evals.minCoeff();
            wc = c;
            wp = p;
          }
    hf.points.push_back(std::move(pts));
  }
  hf.min_singular = std::sqrt(std::max(0.0, worst));
  if (!(worst > tol::eigen_floor)) {
    const Eigen::VectorXd y = fam.atlas->ambient(wc, wp);
    std::string where = "chart " + std::to_string(wc) + " point " + std::to_string(wp) + " at (";
    for (int i = 0; i < y.size(); ++i) where += (i ? ", " : "") + std::to_string(y[i]);
    fail(ErrorCode::AcyclicityLost, where + "), smallest eigenvalue of h " + std::to_string(worst));
  }
  return hf;
}

struct Normalization {
  double c0 = -0.5;
  std::string rule = "c_k = -1/2 (2 pi i)^{-k}";
  std::optional<double> kappa;
};

struct TorsionResult {
  int degree = 0; // 2k
  SampledForm form;
  std::optional<double> integral;
  double closedness_residual = 0.0;
  Normalization normalization;
  int lambda_nodes = 0;
  double imaginary_residual = 0.0;
  double min_singular = 0.0;
  int resolution = 0;
};

// Gauss–Legendre nodes and weights on [0, 1].
inline void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

namespace detail {

inline int permutation_sign(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

// Σ_σ sgn(σ) A_{I_σ(1)} ⋯ A_{I_σ(n)}: the wedge power component on I.
inline Mat wedge_component(const std::vector<Mat>& A, const std::vector<int>& I) {
  std::vector<int> perm(I.size());
  std::iota(perm.begin(), perm.end(), 0);
  Mat acc = Mat::Zero(A[0].rows(), A[0].cols());
  do {
    Mat prod = A[I[perm[0]]];
    for (std::size_t t = 1; t < perm.size(); ++t) prod = prod * A[I[perm[t]]];
    acc += permutation_sign(perm) * prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

// Raw complex integrand Σ_q (−1)^q q Σ_λ w Tr(log h_q (h^{−λ} d h^λ)^{2k}) per component.
inline std::vector<std::vector<cplx>> torsion_raw(const HodgeField& hf, int k, int nodes) {
  const auto& at = *hf.atlas;
  const auto idx = multi_indices(at.dim(), 2 * k);
  const int nc = static_cast<int>(idx.size());
  const int top = static_cast<int>(hf.ranks.size()) - 1;
  std::vector<double> xs, ws;
  gauss_legendre01(nodes, xs, ws);
  std::vector<std::vector<cplx>> out(at.num_charts());
  for (int c = 0; c < at.num_charts(); ++c) {
    const Chart& ch = at.chart(c);
    out[c].assign(ch.npoints * nc, 0.0);
    for (int q = 1; q <= top; ++q) {
      if (hf.ranks[q] == 0) continue;
      const double sgn = (q % 2 == 0 ? 1.0 : -1.0) * q;
      std::vector<Mat> logh(ch.npoints);
      parallel_for(ch.npoints, [&](std::size_t p) {
        logh[p] = hf.apply(c, p, q, [](double x) { return std::log(x); });
      });
      for (int n = 0; n < nodes; ++n) {
        const double lam = xs[n];
        std::vector<Mat> H(ch.npoints);
        parallel_for(ch.npoints, [&](std::size_t p) {
          H[p] = hf.apply(c, p, q, [lam](double x) { return std::pow(x, lam); });
        });
        parallel_for(ch.npoints, [&](std::size_t p) {
          const Mat hinv = hf.apply(c, p, q, [lam](double x) { return std::pow(x, -lam); });
          std::vector<Mat> A(at.dim());
          for (int a = 0; a < at.dim(); ++a) A[a] = hinv * detail::axis_derivative(ch, H, p, a);
          for (int i = 0; i < nc; ++i) {
            const Mat X = wedge_component(A, idx[i]);
            out[c][p * nc + i] += ws[n] * sgn * (logh[p] * X).trace();
          }
        });
      }
    }
  }
  return out;
}

} // namespace detail

inline TorsionResult torsion_form(const ChainFamily& fam, int k, int min_nodes = 16, int max_nodes = 256) {
  const auto& at = *fam.atlas;
  if (k < 0 || 2 * k > at.dim()) fail(ErrorCode::DegreeOverflow, "2k exceeds the base dimension");
  if (!is_closed(at.kind()) && 2 * k == at.dim())
    fail(ErrorCode::UnsupportedKind, "torsion integrals need a closed base");
  const HodgeField hf = hodge_field(fam);
  TorsionResult r;
  r.degree = 2 * k;
  r.resolution = at.resolution();
  r.min_singular = hf.min_singular;
  r.form = SampledForm(fam.atlas, 2 * k);
  const int nc = r.form.ncomp();
  const int top = static_cast<int>(fam.ranks.size()) - 1;
  if (k == 0) {
    for (int c = 0; c < at.num_charts(); ++c)
      for (std::size_t p = 0; p < at.chart(c).npoints; ++p) {
        double s = 0.0;
        for (int q = 1; q <= top; ++q)
          for (const auto& b : hf.points[c][p].degree_blocks[q])
            for (Eigen::Index i = 0; i < b.evals.size(); ++i)
              s += (q % 2 == 0 ? 1.0 : -1.0) * q * std::log(b.evals[i]);
        r.form.comps[c][p] = r.normalization.c0 * s;
      }
    r.lambda_nodes = 0;
  } else {
    const cplx ck = -0.5 * std::pow(cplx(0.0, 2.0 * kPi), -k);
    int n = min_nodes;
    auto prev = detail::torsion_raw(hf, k, n);
    for (;;) {
      if (2 * n > max_nodes)
        fail(ErrorCode::QuadratureNonConvergent, "λ-integral unstable at " + std::to_string(n) + " nodes");
      auto next = detail::torsion_raw(hf, k, 2 * n);
      double diff = 0.0;
      for (int c = 0; c < at.num_charts(); ++c)
        for (std::size_t i = 0; i < next[c].size(); ++i) diff = std::max(diff, std::abs(ck * (next[c][i] - prev[c][i])));
      prev = std::move(next);
      n *= 2;
      if (diff <= tol::lambda_quadrature) break;
    }
    r.lambda_nodes = n;
    for (int c = 0; c < at.num_charts(); ++c)
      for (std::size_t i = 0; i < prev[c].size(); ++i) {
        const cplx v = ck * prev[c][i];
        r.form.comps[c][i] = v.real();
        if (at.weight(c, i / nc) > 0.0) r.imaginary_residual = std::max(r.imaginary_residual, std::abs(v.imag()));
      }
  }
  if (2 * k < at.dim()) r.closedness_residual = max_norm(exterior_derivative(r.form));
  if (2 * k == at.dim()) r.integral = integrate_form(r.form);
  return r;
}

// c_k/(2k+1) · Σ_q (−1)^q q Tr((h_q⁻¹ dh_q)^{2k+1}). Since A_λ = h^{−λ}dh^λ is flat and
// ∂_λA_λ = d log h + [A_λ, log h], this is what d(torsion_form) converges to.
inline SampledForm transgression_form(const ChainFamily& fam, int k) {
  const auto& at = *fam.atlas;
  if (k < 1 || 2 * k + 1 > at.dim()) fail(ErrorCode::DegreeOverflow, "2k+1 exceeds the base dimension");
  const HodgeField hf = hodge_field(fam);
  SampledForm out(fam.atlas, 2 * k + 1);
  const auto idx = multi_indices(at.dim(), 2 * k + 1);
  const int nc = static_cast<int>(idx.size());
  const cplx ck = -0.5 * std::pow(cplx(0.0, 2.0 * kPi), -k) / double(2 * k + 1);
  for (int c = 0; c < at.num_charts(); ++c) {
    const Chart& ch = at.chart(c);
    std::vector<cplx> acc(ch.npoints * nc, 0.0);
    for (int q = 1; q <= fam.top_degree(); ++q) {
      if (fam.ranks[q] == 0) continue;
      const double sgn = (q % 2 == 0 ? 1.0 : -1.0) * q;
      std::vector<Mat> H(ch.npoints);
      parallel_for(ch.npoints, [&](std::size_t p) { H[p] = hf.h(c, p, q); });
      parallel_for(ch.npoints, [&](std::size_t p) {
        const Mat hinv = hf.apply(c, p, q, [](double x) { return 1.0 / x; });
        std::vector<Mat> A(at.dim());
        for (int a = 0; a < at.dim(); ++a) A[a] = hinv * detail::axis_derivative(ch, H, p, a);
        for (int i = 0; i < nc; ++i) acc[p * nc + i] += sgn * detail::wedge_component(A, idx[i]).trace();
      });
    }
    for (std::size_t i = 0; i < acc.size(); ++i) out.comps[c][i] = (ck * acc[i]).real();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cerf strata: walls with a crossing coordinate. A wall's state
//   t = S(co·ψ/W + ½),  S the quintic smoothstep, W the wall-neighbourhood width,
// runs from 0 on its negative side to 1 on its positive side. The base complex is
// the value where every state is 0; walls act in list order.

struct SlideWall {
  int i, j;
  cplx u;
  int degree;
};
// Pair of generators (upper in degree k+1, lower in degree k) present on the positive
// side; its entry is scaled by f + (1 − f)·t with the floor f = kPairFloor.
struct BirthDeathWall {
  int degree;
  int upper, lower;
};
struct Wall {
  std::variant<SlideWall, BirthDeathWall> move;
  std::function<double(int chart, const Coords& x)> crossing;
  int co_orientation = 1;
};

struct CerfStrata {
  BasedComplex base;
  std::vector<Wall> walls;
  double width = 0.0; // 0 → 8 grid cells of the atlas
};

inline constexpr double kPairFloor = 0.1;

inline Differentials compose_walls(const CerfStrata& s, double width, int chart, const Coords& x) {
  Differentials d = s.base.differentials();
  const int top = s.base.top_degree();
  for (const Wall& w : s.walls) {
    const double t = smoothstep5(w.co_orientation * w.crossing(chart, x) / width + 0.5);
    if (auto* sl = std::get_if<SlideWall>(&w.move)) {
      const int q = sl->degree, r = s.base.rank(q);
      Mat g = Mat::Identity(r, r), gi = Mat::Identity(r, r);
      g(sl->i, sl->j) = t * sl->u;
      gi(sl->i, sl->j) = -t * sl->u;
      if (q >= 1) d[q - 1] = d[q - 1] * g;
      if (q + 1 <= top) d[q] = gi * d[q];
    } else {
      const auto& bd = std::get<BirthDeathWall>(w.move);
      const int q = bd.degree + 1;
      const double f = kPairFloor + (1.0 - kPairFloor) * t;
      d[q - 1].col(bd.upper) *= f;
      if (q + 1 <= top) d[q].row(bd.upper) /= f;
    }
  }
  return d;
}

inline ChainFamily family_from_cerf(const CerfStrata& s, AtlasPtr atlas) {
  double width = s.width;
  if (width <= 0.0) width = 8.0 * atlas->chart(0).h[0];
  const int top = s.base.top_degree();
  for (const Wall& w : s.walls) {
    if (auto* sl = std::get_if<SlideWall>(&w.move)) {
      if (sl->degree < 0 || sl->degree > top) fail(ErrorCode::DegreeMismatch, "slide wall degree");
      const int r = s.base.rank(sl->degree);
      if (sl->i == sl->j || sl->i < 0 || sl->j < 0 || sl->i >= r || sl->j >= r)
        fail(ErrorCode::IndexOutOfRange, "slide wall generators");
    } else {
      const auto& bd = std::get<BirthDeathWall>(w.move);
      if (bd.degree < 0 || bd.degree + 1 > top) fail(ErrorCode::DegreeMismatch, "birth-death wall degree");
      if (bd.upper < 0 || bd.upper >= s.base.rank(bd.degree + 1) || bd.lower < 0 || bd.lower >= s.base.rank(bd.degree))
        fail(ErrorCode::IndexOutOfRange, "birth-death wall generators");
    }
  }
  CerfStrata copy = s;
  FamilySampler fn = [copy, width](int c, const Coords& x, const Eigen::VectorXd&) {
    return compose_walls(copy, width, c, x);
  };
  // Loop composition check: both sides of every periodic seam, and overlaps.
  double worst = 0.0;
  for (int c = 0; c < atlas->num_charts(); ++c) {
    const Chart& ch = atlas->chart(c);
    for (int a = 0; a < ch.dim; ++a) {
      if (!ch.periodic[a]) continue;
      for (std::size_t p = 0; p < ch.npoints; ++p) {
        if (ch.multi_index(p)[a] != 0) continue;
        Coords x = ch.coords(p), y = x;
        y[a] += ch.hi[a] - ch.lo[a];
        const Differentials d0 = compose_walls(copy, width, c, x), d1 = compose_walls(copy, width, c, y);
        for (std::size_t q = 0; q < d0.size(); ++q)
          if (d0[q].size()) worst = std::max(worst, (d0[q] - d1[q]).cwiseAbs().maxCoeff());
      }
    }
  }
  for (const auto& e : atlas->overlaps()) {
    const Differentials d0 = compose_walls(copy, width, e.chart, atlas->chart(e.chart).coords(e.point));
    const Differentials d1 = compose_walls(copy, width, e.other, e.other_coords);
    for (std::size_t q = 0; q < d0.size(); ++q)
      if (d0[q].size()) worst = std::max(worst, (d0[q] - d1[q]).cwiseAbs().maxCoeff());
  }
  if (worst > tol::strata_loop)
    fail(ErrorCode::InconsistentStrata, "loop composition leaves a defect of " + std::to_string(worst));
  return sample_family(std::move(atlas), s.base.ranks(), s.base.unit_tag(), "FromCerf", fn);
}

// ---------------------------------------------------------------------------
// Circle-bundle families over Sphere2.

inline void validate_root(int n, int p, int q) {
  if (n < 2) fail(ErrorCode::InvalidRoot, "Euler number must be ≥ 2");
  if (q <= 0) fail(ErrorCode::InvalidRoot, "root denominator must be positive");
  if (((static_cast<long long>(p) * n) % q) != 0) fail(ErrorCode::InvalidRoot, "u^n ≠ 1");
  if (p % q == 0) fail(ErrorCode::InvalidRoot, "u = 1");
}

// The stabilized 3-term complex C →(d2) C² →(d1) C with the expansion pair (e, b)
// at entry β and a handle slide b ↦ b + s·u·a:
//   d1 = [(1−u), (1−u)·s·u],  d2 = [−s·u·β; β].
inline Differentials figure_eight_complex(cplx u, double beta, double s) {
  Mat d1(1, 2), d2(2, 1);
  d1 << (1.0 - u), (1.0 - u) * s * u;
  d2 << -s * u * beta, beta;
  return {d1, d2};
}

// Loop point at t ∈ [0, 1): expansion (β ↑), slide u (s ↑), collapse (β ↓), inverse slide (s ↓).
inline std::pair<double, double> figure_eight_loop(double t) {
  t -= std::floor(t);
  const double seg = 4.0 * t;
  const int k = std::min(3, static_cast<int>(seg));
  const double r = smoothstep5(seg - k);
  switch (k) {
    case 0: return {kPairFloor + (1.0 - kPairFloor) * r, 0.0};
    case 1: return {1.0, r};
    case 2: return {1.0 - (1.0 - kPairFloor) * r, 1.0};
    default: return {kPairFloor, 1.0 - r};
  }
}

namespace circle_layout {
inline constexpr double band_lo = -0.5; // southern constant region ends
inline constexpr double band_hi = 0.0;  // loop amplitude reaches 1 at the equator
} // namespace circle_layout

// Southern region: constant stabilized complex; equatorial band: the n-fold loop in the
// angular coordinate with amplitude rising to 1; northern cap: amplitude scaled radially
// to 0 at the pole.
inline ChainFamily circle_bundle_family(int n, int p, int q, int resolution) {
  validate_root(n, p, q);
  const cplx u = std::polar(1.0, 2.0 * kPi * p / q);
  auto atlas = build_base(ManifoldKind::Sphere2, resolution);
  FamilySampler fn = [n, u](int, const Coords&, const Eigen::VectorXd& y) {
    const double Z = y[2];
    const double r = std::hypot(y[0], y[1]);
    double amp;
    if (Z <= circle_layout::band_hi)
      amp = smoothstep5((Z - circle_layout::band_lo) / (circle_layout::band_hi - circle_layout::band_lo));
    else
      amp = r;
    const double phi = std::atan2(y[1], y[0]);
    auto [beta, s] = figure_eight_loop(n * phi / (2.0 * kPi));
    beta = kPairFloor + amp * (beta - kPairFloor);
    s *= amp;
    return figure_eight_complex(u, beta, s);
  };
  return sample_family(atlas, {1, 2, 1}, UnitTag{q, p}, "Named:circle-bundle", fn);
}

// Geometric alternative: fiberwise Morse complex of the height function on the circle
// fibre (maximum → minimum along two flow lines, one crossing the monodromy cut), in the
// trivialization of each hemisphere. The clutching map rotates the fibre by nφ; both
// critical points move together, so the transition acts on the basis by one phase
// e^{i·a·nφ}, a = p/q, which is single valued because u^n = 1.
inline ChainFamily circle_bundle_family_twisted(int n, int p, int q, int resolution) {
  validate_root(n, p, q);
  const cplx u = std::polar(1.0, 2.0 * kPi * p / q);
  auto atlas = build_base(ManifoldKind::Sphere2, resolution);
  const double a = static_cast<double>(p) / q;
  FamilySampler fn = [n, u, a](int chart, const Coords&, const Eigen::VectorXd& y) {
    Mat d(1, 1);
    d(0, 0) = 1.0 - u;
    if (chart == 1) {
      const cplx g = std::polar(1.0, 2.0 * kPi * a * n * std::atan2(y[1], y[0]) / (2.0 * kPi));
      d(0, 0) = g * d(0, 0) / g;
    }
    return Differentials{d};
  };
  return sample_family(atlas, {1, 1}, UnitTag{q, p}, "Named:circle-bundle-twisted", fn);
}

} // namespace torsionlab
