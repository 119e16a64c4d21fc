#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "constants.hpp"
#include "error.hpp"

namespace torsionlab {

// Interval and Box2 are open coordinate patches used by the local normal forms of
// genfront; the four closed kinds carry a fundamental class.
enum class ManifoldKind { Circle, Torus2, Sphere2, Sphere4, Interval, Box2 };

inline const char* kind_name(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Circle: return "Circle";
    case ManifoldKind::Torus2: return "Torus2";
    case ManifoldKind::Sphere2: return "Sphere2";
    case ManifoldKind::Sphere4: return "Sphere4";
    case ManifoldKind::Interval: return "Interval";
    case ManifoldKind::Box2: return "Box2";
  }
  return "?";
}

inline std::optional<ManifoldKind> kind_from_name(const std::string& s) {
  for (auto k : {ManifoldKind::Circle, ManifoldKind::Torus2, ManifoldKind::Sphere2, ManifoldKind::Sphere4,
                 ManifoldKind::Interval, ManifoldKind::Box2})
    if (s == kind_name(k)) return k;
  return std::nullopt;
}

inline bool is_closed(ManifoldKind k) { return k != ManifoldKind::Interval && k != ManifoldKind::Box2; }

// Fixed chart layout (bit-for-bit reproducible at a given resolution):
//
//   kind      charts  coordinates                          orientation  weights
//   Circle    1       θ ∈ [0, 2π) periodic                 +1           1
//   Torus2    1       (θ, φ) ∈ [0, 2π)² periodic           +1           1
//   Sphere2   2       stereographic, [−1.5, 1.5]² nodes    north +1     quintic smoothstep
//   Sphere4   2       stereographic, [−1.5, 1.5]⁴ nodes    south −1     in height Z, |Z| ≤ 0.3
//   Interval  1       [lo, hi] nodes                       +1           1
//   Box2      1       [lo, hi]² nodes                      +1           1
//
// North charts project from the south pole, south charts from the north pole;
// the transition between them is the inversion x ↦ x/|x|².
namespace layout {
inline constexpr double sphere_half_width = 1.5;
inline constexpr double sphere_blend = 0.3;
inline constexpr int sphere4_default_resolution = 16;
} // namespace layout

inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

using Coords = std::array<double, 4>;

struct Chart {
  int dim = 0;
  int res = 0;
  Coords lo{}, hi{}, h{};
  std::array<bool, 4> periodic{};
  int orientation = 1;
  std::size_t npoints = 0;
  std::array<std::size_t, 4> stride{};

  std::array<int, 4> multi_index(std::size_t p) const {
    std::array<int, 4> m{};
    for (int a = 0; a < dim; ++a) m[a] = static_cast<int>((p / stride[a]) % res);
    return m;
  }
  std::size_t index(const std::array<int, 4>& m) const {
    std::size_t p = 0;
    for (int a = 0; a < dim; ++a) p += static_cast<std::size_t>(m[a]) * stride[a];
    return p;
  }
  Coords coords(std::size_t p) const {
    Coords x{};
    auto m = multi_index(p);
    for (int a = 0; a < dim; ++a) x[a] = lo[a] + m[a] * h[a];
    return x;
  }
  // Quadrature weight of a node along the grid (trapezoid on non-periodic axes).
  double cell_volume(std::size_t p) const {
    double v = 1.0;
    auto m = multi_index(p);
    for (int a = 0; a < dim; ++a) {
      double w = h[a];
      if (!periodic[a] && (m[a] == 0 || m[a] == res - 1)) w *= 0.5;
      v *= w;
    }
    return v;
  }
};

struct OverlapEntry {
  int chart;
  std::size_t point;
  int other;
  Coords other_coords;
};

class BaseAtlas {
 public:
  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int resolution() const { return res_; }
  int ambient_dim() const { return amb_dim_; }
  int num_charts() const { return static_cast<int>(charts_.size()); }
  const Chart& chart(int c) const { return charts_[c]; }
  const std::vector<OverlapEntry>& overlaps() const { return overlaps_; }
  double weight(int c, std::size_t p) const { return weights_[c][p]; }
  const Coords& bounds_lo() const { return blo_; }
  const Coords& bounds_hi() const { return bhi_; }
  std::size_t total_points() const {
    std::size_t n = 0;
    for (auto& ch : charts_) n += ch.npoints;
    return n;
  }

  Eigen::VectorXd ambient(int c, std::size_t p) const {
    return Eigen::Map<const Eigen::VectorXd>(&ambient_[c][p * amb_dim_], amb_dim_);
  }

  Eigen::VectorXd to_ambient(int c, const Coords& x) const {
    Eigen::VectorXd y(amb_dim_);
    switch (kind_) {
      case ManifoldKind::Circle: y << std::cos(x[0]), std::sin(x[0]); break;
      case ManifoldKind::Torus2: y << std::cos(x[0]), std::sin(x[0]), std::cos(x[1]), std::sin(x[1]); break;
      case ManifoldKind::Sphere2:
      case ManifoldKind::Sphere4: {
        double r2 = 0.0;
        for (int a = 0; a < dim_; ++a) r2 += x[a] * x[a];
        for (int a = 0; a < dim_; ++a) y[a] = 2.0 * x[a] / (1.0 + r2);
        y[dim_] = (c == 0 ? 1.0 : -1.0) * (1.0 - r2) / (1.0 + r2);
        break;
      }
      case ManifoldKind::Interval:
      case ManifoldKind::Box2:
        for (int a = 0; a < dim_; ++a) y[a] = x[a];
        break;
    }
    return y;
  }

  // Partition weight of chart c at an ambient point.
  double weight_at(int c, const Eigen::VectorXd& y) const {
    if (charts_.size() == 1) return 1.0;
    const double z = y[dim_];
    const double wn = smoothstep5((z + layout::sphere_blend) / (2.0 * layout::sphere_blend));
    return c == 0 ? wn : 1.0 - wn;
  }

  // Chart coordinates of chart `to` for a point given in chart `from`.
  Coords transition(int from, const Coords& x, int to) const {
    if (from == to || charts_.size() == 1) return x;
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a) r2 += x[a] * x[a];
    Coords y{};
    for (int a = 0; a < dim_; ++a) y[a] = x[a] / r2;
    return y;
  }

  // ∂y/∂x of the transition.
  Eigen::MatrixXd transition_jacobian(int from, const Coords& x, int to) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim_, dim_);
    if (from == to || charts_.size() == 1) return J;
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a) r2 += x[a] * x[a];
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) J(i, j) = (i == j ? 1.0 / r2 : 0.0) - 2.0 * x[i] * x[j] / (r2 * r2);
    return J;
  }

  bool contains(int c, const Coords& x) const {
    const Chart& ch = charts_[c];
    for (int a = 0; a < dim_; ++a)
      if (!ch.periodic[a] && (x[a] < ch.lo[a] - 1e-12 || x[a] > ch.hi[a] + 1e-12)) return false;
    return true;
  }

  // Round metric for spheres, flat otherwise; the oriented volume-form component.
  double volume_density(int c, const Coords& x) const {
    double d = 1.0;
    if (kind_ == ManifoldKind::Sphere2 || kind_ == ManifoldKind::Sphere4) {
      double r2 = 0.0;
      for (int a = 0; a < dim_; ++a) r2 += x[a] * x[a];
      d = std::pow(2.0 / (1.0 + r2), dim_);
    }
    return charts_[c].orientation * d;
  }

  double closed_form_volume() const {
    switch (kind_) {
      case ManifoldKind::Circle: return 2.0 * kPi;
      case ManifoldKind::Torus2: return 4.0 * kPi * kPi;
      case ManifoldKind::Sphere2: return 4.0 * kPi;
      case ManifoldKind::Sphere4: return 8.0 * kPi * kPi / 3.0;
      default: {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= bhi_[a] - blo_[a];
        return v;
      }
    }
  }

  // Declared π₁ generators as closed sequences of (chart, point).
  std::vector<std::vector<std::size_t>> loop_generators() const {
    std::vector<std::vector<std::size_t>> loops;
    if (kind_ == ManifoldKind::Circle || kind_ == ManifoldKind::Torus2) {
      const Chart& ch = charts_[0];
      for (int a = 0; a < dim_; ++a) {
        std::vector<std::size_t> loop;
        std::array<int, 4> m{};
        for (int i = 0; i < res_; ++i) {
          m[a] = i;
          loop.push_back(ch.index(m));
        }
        loops.push_back(std::move(loop));
      }
    }
    return loops;
  }

  friend std::shared_ptr<const BaseAtlas> build_base(ManifoldKind, int, std::optional<std::pair<double, double>>);

 private:
  ManifoldKind kind_{};
  int dim_ = 0, res_ = 0, amb_dim_ = 0;
  Coords blo_{}, bhi_{};
  std::vector<Chart> charts_;
  std::vector<std::vector<double>> ambient_;
  std::vector<std::vector<double>> weights_;
  std::vector<OverlapEntry> overlaps_;
};

using AtlasPtr = std::shared_ptr<const BaseAtlas>;

inline AtlasPtr build_base(ManifoldKind kind, int resolution,
                           std::optional<std::pair<double, double>> bounds = std::nullopt) {
  if (resolution < 8) fail(ErrorCode::ResolutionTooSmall, "resolution " + std::to_string(resolution) + " < 8");
  auto at = std::make_shared<BaseAtlas>();
  at->kind_ = kind;
  at->res_ = resolution;
  auto make_chart = [&](int dim, double lo, double hi, bool periodic, int orientation) {
    Chart ch;
    ch.dim = dim;
    ch.res = resolution;
    ch.orientation = orientation;
    std::size_t s = 1;
    for (int a = dim - 1; a >= 0; --a) {
      ch.stride[a] = s;
      s *= static_cast<std::size_t>(resolution);
    }
    ch.npoints = s;
    for (int a = 0; a < dim; ++a) {
      ch.lo[a] = lo;
      ch.hi[a] = hi;
      ch.periodic[a] = periodic;
      ch.h[a] = periodic ? (hi - lo) / resolution : (hi - lo) / (resolution - 1);
    }
    return ch;
  };
  const double a = layout::sphere_half_width;
  switch (kind) {
    case ManifoldKind::Circle:
      at->dim_ = 1;
      at->amb_dim_ = 2;
      at->charts_.push_back(make_chart(1, 0.0, 2.0 * kPi, true, 1));
      break;
    case ManifoldKind::Torus2:
      at->dim_ = 2;
      at->amb_dim_ = 4;
      at->charts_.push_back(make_chart(2, 0.0, 2.0 * kPi, true, 1));
      break;
    case ManifoldKind::Sphere2:
    case ManifoldKind::Sphere4: {
      const int d = kind == ManifoldKind::Sphere2 ? 2 : 4;
      at->dim_ = d;
      at->amb_dim_ = d + 1;
      at->charts_.push_back(make_chart(d, -a, a, false, 1));
      at->charts_.push_back(make_chart(d, -a, a, false, -1));
      break;
    }
    case ManifoldKind::Interval:
    case ManifoldKind::Box2: {
      const int d = kind == ManifoldKind::Interval ? 1 : 2;
      auto [lo, hi] = bounds.value_or(kind == ManifoldKind::Interval ? std::pair{-1.0, 1.0} : std::pair{-1.5, 1.5});
      if (!(hi > lo)) fail(ErrorCode::UnsupportedKind, "empty patch bounds");
      at->dim_ = d;
      at->amb_dim_ = d;
      at->charts_.push_back(make_chart(d, lo, hi, false, 1));
      break;
    }
    default: fail(ErrorCode::UnsupportedKind, "unknown manifold kind");
  }
  for (int c = 0; c < at->num_charts(); ++c) {
    const Chart& ch = at->charts_[c];
    for (int x = 0; x < ch.dim; ++x) {
      at->blo_[x] = ch.lo[x];
      at->bhi_[x] = ch.hi[x];
    }
    std::vector<double> amb(ch.npoints * at->amb_dim_);
    std::vector<double> w(ch.npoints);
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      Eigen::VectorXd y = at->to_ambient(c, ch.coords(p));
      for (int i = 0; i < at->amb_dim_; ++i) amb[p * at->amb_dim_ + i] = y[i];
      w[p] = at->weight_at(c, y);
    }
    at->ambient_.push_back(std::move(amb));
    at->weights_.push_back(std::move(w));
  }
  if (at->num_charts() == 2) {
    for (int c = 0; c < 2; ++c) {
      const Chart& ch = at->charts_[c];
      for (std::size_t p = 0; p < ch.npoints; ++p) {
        Coords x = ch.coords(p);
        double r2 = 0.0;
        for (int i = 0; i < ch.dim; ++i) r2 += x[i] * x[i];
        if (r2 == 0.0) continue;
        Coords y = at->transition(c, x, 1 - c);
        if (at->contains(1 - c, y)) at->overlaps_.push_back({c, p, 1 - c, y});
      }
    }
  }
  return at;
}

// Increasing multi-indices of size `degree` in {0, …, dim−1}, lexicographic.
inline std::vector<std::vector<int>> multi_indices(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == degree) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < dim; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

inline int multi_index_position(const std::vector<std::vector<int>>& list, const std::vector<int>& I) {
  for (std::size_t k = 0; k < list.size(); ++k)
    if (list[k] == I) return static_cast<int>(k);
  return -1;
}

struct SampledForm {
  AtlasPtr atlas;
  int degree = 0;
  std::vector<std::vector<double>> comps; // per chart, point-major: p * ncomp + component

  SampledForm() = default;
  SampledForm(AtlasPtr a, int deg) : atlas(std::move(a)), degree(deg) {
    if (deg < 0 || deg > atlas->dim()) fail(ErrorCode::DegreeOverflow, "form degree out of range");
    const int nc = ncomp();
    for (int c = 0; c < atlas->num_charts(); ++c) comps.emplace_back(atlas->chart(c).npoints * nc, 0.0);
  }

  int ncomp() const { return static_cast<int>(multi_indices(atlas->dim(), degree).size()); }
  double& at(int c, std::size_t p, int k) { return comps[c][p * ncomp() + k]; }
  double at(int c, std::size_t p, int k) const { return comps[c][p * ncomp() + k]; }
};

// Sup norm over points where the chart carries partition weight.
inline double max_norm(const SampledForm& w) {
  double m = 0.0;
  const int nc = w.ncomp();
  for (int c = 0; c < w.atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < w.atlas->chart(c).npoints; ++p) {
      if (w.atlas->weight(c, p) <= 0.0) continue;
      for (int k = 0; k < nc; ++k) m = std::max(m, std::abs(w.comps[c][p * nc + k]));
    }
  return m;
}

namespace detail {

// Central difference along one axis: 4th order in the interior, 2nd order at the
// two outer layers of a non-periodic chart.
template <class T>
T axis_derivative(const Chart& ch, const std::vector<T>& f, std::size_t p, int axis) {
  const int n = ch.res;
  const auto m = ch.multi_index(p);
  const int i = m[axis];
  const double h = ch.h[axis];
  const std::size_t s = ch.stride[axis];
  auto at = [&](int j) -> const T& {
    if (ch.periodic[axis]) j = ((j % n) + n) % n;
    return f[p + (static_cast<std::ptrdiff_t>(j) - i) * static_cast<std::ptrdiff_t>(s)];
  };
  if (ch.periodic[axis] || (i >= 2 && i <= n - 3))
    return T((-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h));
  if (i == 0) return T((-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h));
  if (i == n - 1) return T((3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h));
  return T((at(i + 1) - at(i - 1)) / (2.0 * h));
}

} // namespace detail

inline SampledForm exterior_derivative(const SampledForm& w) {
  const int dim = w.atlas->dim();
  if (w.degree >= dim) fail(ErrorCode::DegreeOverflow, "d of a top-degree form");
  SampledForm out(w.atlas, w.degree + 1);
  const auto src = multi_indices(dim, w.degree);
  const auto dst = multi_indices(dim, w.degree + 1);
  const int nin = static_cast<int>(src.size()), nout = static_cast<int>(dst.size());
  for (int c = 0; c < w.atlas->num_charts(); ++c) {
    const Chart& ch = w.atlas->chart(c);
    for (int k = 0; k < nin; ++k) {
      std::vector<double> f(ch.npoints);
      for (std::size_t p = 0; p < ch.npoints; ++p) f[p] = w.comps[c][p * nin + k];
      for (int a = 0; a < dim; ++a) {
        if (std::find(src[k].begin(), src[k].end(), a) != src[k].end()) continue;
        std::vector<int> J = src[k];
        J.push_back(a);
        std::sort(J.begin(), J.end());
        const int pos = multi_index_position(dst, J);
        const int t = static_cast<int>(std::find(J.begin(), J.end(), a) - J.begin());
        const double sign = (t % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t p = 0; p < ch.npoints; ++p)
          out.comps[c][p * nout + pos] += sign * detail::axis_derivative(ch, f, p, a);
      }
    }
  }
  return out;
}

inline double integrate_form(const SampledForm& w) {
  if (w.degree != w.atlas->dim()) fail(ErrorCode::DegreeMismatch, "integrand must be a top-degree form");
  double total = 0.0;
  for (int c = 0; c < w.atlas->num_charts(); ++c) {
    const Chart& ch = w.atlas->chart(c);
    double acc = 0.0;
    for (std::size_t p = 0; p < ch.npoints; ++p) acc += w.atlas->weight(c, p) * w.comps[c][p] * ch.cell_volume(p);
    total += ch.orientation * acc;
  }
  return total;
}

inline SampledForm volume_form(const AtlasPtr& atlas) {
  SampledForm w(atlas, atlas->dim());
  for (int c = 0; c < atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < atlas->chart(c).npoints; ++p)
      w.comps[c][p] = atlas->volume_density(c, atlas->chart(c).coords(p));
  return w;
}

// Samples a form from a callable (chart, coords) → component vector.
template <class Fn>
SampledForm sample_form(const AtlasPtr& atlas, int degree, Fn&& fn) {
  SampledForm w(atlas, degree);
  const int nc = w.ncomp();
  for (int c = 0; c < atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < atlas->chart(c).npoints; ++p) {
      const std::vector<double> v = fn(c, atlas->chart(c).coords(p));
      for (int k = 0; k < nc; ++k) w.comps[c][p * nc + k] = v[k];
    }
  return w;
}

// Max deviation of Σ_c w_c from 1 over all chart points.
inline double partition_defect(const BaseAtlas& at) {
  double m = 0.0;
  for (int c = 0; c < at.num_charts(); ++c)
    for (std::size_t p = 0; p < at.chart(c).npoints; ++p) {
      const Eigen::VectorXd y = at.ambient(c, p);
      double s = 0.0;
      for (int o = 0; o < at.num_charts(); ++o) s += at.weight_at(o, y);
      m = std::max(m, std::abs(s - 1.0));
    }
  return m;
}

// Max coordinate error of going A → B → A over the overlap table.
inline double overlap_roundtrip_error(const BaseAtlas& at) {
  double m = 0.0;
  for (const auto& e : at.overlaps()) {
    Coords x = at.chart(e.chart).coords(e.point);
    Coords back = at.transition(e.other, e.other_coords, e.chart);
    for (int a = 0; a < at.dim(); ++a) m = std::max(m, std::abs(back[a] - x[a]));
    Eigen::VectorXd d = at.to_ambient(e.chart, x) - at.to_ambient(e.other, e.other_coords);
    m = std::max(m, d.cwiseAbs().maxCoeff());
  }
  return m;
}

namespace detail {

// Multilinear interpolation of component k of a form on chart c.
inline double interpolate(const SampledForm& w, int c, const Coords& x, int k) {
  const Chart& ch = w.atlas->chart(c);
  const int nc = w.ncomp();
  std::array<int, 4> base{};
  std::array<double, 4> frac{};
  for (int a = 0; a < ch.dim; ++a) {
    double t = (x[a] - ch.lo[a]) / ch.h[a];
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, ch.res - 2);
    base[a] = i;
    frac[a] = t - i;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << ch.dim); ++corner) {
    std::array<int, 4> m = base;
    double wgt = 1.0;
    for (int a = 0; a < ch.dim; ++a) {
      const bool up = (corner >> a) & 1;
      m[a] += up;
      wgt *= up ? frac[a] : 1.0 - frac[a];
    }
    acc += wgt * w.comps[c][ch.index(m) * nc + k];
  }
  return acc;
}

} // namespace detail

// Max mismatch between chart components and the pulled-back components of the
// other chart, over overlap points where both charts carry weight.
inline double overlap_form_mismatch(const SampledForm& w) {
  const auto& at = *w.atlas;
  if (at.num_charts() < 2) return 0.0;
  const auto idx = multi_indices(at.dim(), w.degree);
  const int nc = static_cast<int>(idx.size());
  double m = 0.0;
  for (const auto& e : at.overlaps()) {
    if (at.weight(e.chart, e.point) <= 0.0) continue;
    if (at.weight_at(e.other, at.ambient(e.chart, e.point)) <= 0.0) continue;
    const Coords x = at.chart(e.chart).coords(e.point);
    const Eigen::MatrixXd J = at.transition_jacobian(e.chart, x, e.other);
    std::vector<double> other(nc);
    for (int k = 0; k < nc; ++k) other[k] = detail::interpolate(w, e.other, e.other_coords, k);
    for (int i = 0; i < nc; ++i) {
      double v = 0.0;
      for (int j = 0; j < nc; ++j) {
        Eigen::MatrixXd minor(w.degree, w.degree);
        for (int r = 0; r < w.degree; ++r)
          for (int s = 0; s < w.degree; ++s) minor(r, s) = J(idx[j][r], idx[i][s]);
        v += other[j] * (w.degree ? minor.determinant() : 1.0);
      }
      m = std::max(m, std::abs(v - w.comps[e.chart][e.point * nc + i]));
    }
  }
  return m;
}

inline std::string component_label(const std::vector<int>& I) {
  if (I.empty()) return "1";
  std::string s;
  for (std::size_t t = 0; t < I.size(); ++t) {
    if (t) s += "^";
    s += "dx" + std::to_string(I[t]);
  }
  return s;
}

// CSV columns: chart, multi-index, component, value.
inline void write_form_csv(std::ostream& os, const SampledForm& w) {
  const auto idx = multi_indices(w.atlas->dim(), w.degree);
  os << "chart,multi_index,component,value\n";
  os.precision(17);
  for (int c = 0; c < w.atlas->num_charts(); ++c) {
    const Chart& ch = w.atlas->chart(c);
    for (std::size_t p = 0; p < ch.npoints; ++p) {
      auto m = ch.multi_index(p);
      std::string mi;
      for (int a = 0; a < ch.dim; ++a) mi += (a ? ";" : "") + std::to_string(m[a]);
      for (std::size_t k = 0; k < idx.size(); ++k)
        os << c << ',' << mi << ',' << component_label(idx[k]) << ',' << w.comps[c][p * idx.size() + k] << '\n';
    }
  }
}

} // namespace torsionlab
