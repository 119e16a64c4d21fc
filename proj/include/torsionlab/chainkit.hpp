#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "constants.hpp"
#include "error.hpp"

namespace torsionlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Trivial coefficients (order 0) or u = exp(2πi·numerator/order).
struct UnitTag {
  int order = 0;
  int numerator = 1;

  bool trivial() const { return order == 0; }
  cplx generator() const {
    if (trivial()) return {1.0, 0.0};
    return std::polar(1.0, 2.0 * kPi * numerator / order);
  }
  bool operator==(const UnitTag&) const = default;
};

namespace detail {

inline int euler_phi(int n) {
  int r = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

inline bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x)); }

// Decides whether z lies in Z[u]. Exact lattice decode when Z[u] has rank ≤ 2,
// bounded-coefficient search up to rank 6, otherwise undecided (nullopt).
inline std::optional<bool> in_unit_ring(cplx z, const UnitTag& tag, double tol) {
  if (tag.trivial()) return near_integer(z.real(), tol) && std::abs(z.imag()) <= tol;
  int n = tag.order / std::gcd(tag.order, std::abs(tag.numerator));
  const cplx u = tag.generator();
  const int phi = euler_phi(n);
  if (phi == 1) return near_integer(z.real(), tol) && std::abs(z.imag()) <= tol;
  if (phi == 2) {
    const double b = z.imag() / u.imag();
    const double a = z.real() - b * u.real();
    return near_integer(a, tol) && near_integer(b, tol);
  }
  if (phi > 6) return std::nullopt;
  std::vector<cplx> pw(phi);
  pw[0] = 1.0;
  for (int j = 1; j < phi; ++j) pw[j] = pw[j - 1] * u;
  std::vector<int> c(phi, -2);
  for (;;) {
    cplx s = 0.0;
    for (int j = 0; j < phi; ++j) s += double(c[j]) * pw[j];
    if (std::abs(s - z) <= tol * std::max(1.0, std::abs(z))) return true;
    int j = 0;
    while (j < phi && c[j] == 2) c[j++] = -2;
    if (j == phi) break;
    ++c[j];
  }
  return false;
}

inline double log_abs_det(const Mat& m, cplx* phase = nullptr) {
  if (m.rows() == 0) {
    if (phase) *phase = 1.0;
    return 0.0;
  }
  Eigen::PartialPivLU<Mat> lu(m);
  const Mat& u = lu.matrixLU();
  double acc = 0.0;
  cplx ph = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double a = std::abs(u(i, i));
    acc += std::log(a);
    ph *= u(i, i) / a;
  }
  if (phase) *phase = ph;
  return acc;
}

} // namespace detail

// Finite graded complex C_top → … → C_0 in a fixed basis. d(q) maps degree q to q−1.
class BasedComplex {
 public:
  BasedComplex() = default;

  BasedComplex(std::vector<int> ranks, std::vector<Mat> differentials, std::vector<double> filtration = {},
               UnitTag tag = {}, bool check_unit_ring = true)
      : ranks_(std::move(ranks)), d_(std::move(differentials)), filtration_(std::move(filtration)), tag_(tag) {
    if (ranks_.empty()) fail(ErrorCode::MalformedComplex, "no degrees");
    for (int r : ranks_)
      if (r < 0) fail(ErrorCode::MalformedComplex, "negative rank");
    if (d_.size() + 1 != ranks_.size())
      fail(ErrorCode::MalformedComplex, "expected " + std::to_string(ranks_.size() - 1) + " differentials");
    for (std::size_t q = 1; q < ranks_.size(); ++q) {
      const Mat& m = d_[q - 1];
      if (m.rows() != ranks_[q - 1] || m.cols() != ranks_[q])
        fail(ErrorCode::MalformedComplex, "differential of degree " + std::to_string(q) + " has wrong shape");
    }
    if (filtration_.empty()) filtration_.assign(total_rank(), 0.0);
    if (static_cast<int>(filtration_.size()) != total_rank())
      fail(ErrorCode::MalformedComplex, "filtration length differs from total rank");
    const double r = dd_residual();
    if (r > tol::construction) fail(ErrorCode::MalformedComplex, "d∘d residual " + std::to_string(r));
    if (!tag_.trivial() && check_unit_ring) {
      for (const Mat& m : d_)
        for (Eigen::Index i = 0; i < m.size(); ++i) {
          auto ok = detail::in_unit_ring(m.data()[i], tag_, tol::construction);
          if (!ok) {
            unit_ring_checked_ = false;
            continue;
          }
          if (!*ok) fail(ErrorCode::MalformedComplex, "entry outside Z[u]");
        }
    }
  }

  int top_degree() const { return static_cast<int>(ranks_.size()) - 1; }
  int rank(int q) const { return (q < 0 || q > top_degree()) ? 0 : ranks_[q]; }
  const std::vector<int>& ranks() const { return ranks_; }
  int total_rank() const { return std::accumulate(ranks_.begin(), ranks_.end(), 0); }
  int offset(int q) const { return std::accumulate(ranks_.begin(), ranks_.begin() + q, 0); }

  // d(q): C_q → C_{q−1}; zero-shaped outside 1..top.
  Mat d(int q) const {
    if (q < 1 || q > top_degree()) return Mat::Zero(rank(q - 1), rank(q));
    return d_[q - 1];
  }
  const std::vector<Mat>& differentials() const { return d_; }
  const std::vector<double>& filtration() const { return filtration_; }
  const UnitTag& unit_tag() const { return tag_; }
  bool unit_ring_checked() const { return unit_ring_checked_; }

  double dd_residual() const {
    double r = 0.0;
    for (int q = 2; q <= top_degree(); ++q) {
      Mat p = d_[q - 2] * d_[q - 1];
      if (p.size()) r = std::max(r, p.cwiseAbs().maxCoeff());
    }
    return r;
  }

  // Total differential on ⊕C_q (degree blocks in increasing order).
  Mat total_differential() const {
    const int n = total_rank();
    Mat D = Mat::Zero(n, n);
    for (int q = 1; q <= top_degree(); ++q) D.block(offset(q - 1), offset(q), rank(q - 1), rank(q)) = d_[q - 1];
    return D;
  }

 private:
  std::vector<int> ranks_;
  std::vector<Mat> d_;
  std::vector<double> filtration_;
  UnitTag tag_;
  bool unit_ring_checked_ = true;
};

struct AcyclicityCertificate {
  bool acyclic = false;
  double min_singular = 0.0;
};

inline AcyclicityCertificate is_acyclic(const BasedComplex& c) {
  if (c.dd_residual() > tol::construction) fail(ErrorCode::MalformedComplex, "d∘d ≠ 0");
  const Mat d = c.total_differential();
  if (d.rows() == 0) return {true, std::numeric_limits<double>::infinity()};
  const Mat D = d + d.adjoint();
  Eigen::JacobiSVD<Mat> svd(D);
  const double s = svd.singularValues().minCoeff();
  return {s > tol::invertibility, s};
}

struct TorsionValue {
  double log_abs = 0.0; // log|τ|
  cplx phase = 1.0;     // τ/|τ|
};

// Chain-contraction torsion. For each degree pick s_q, an orthonormal basis of
// (ker d_q)^⊥, set b_q = d_{q+1}(s_{q+1}) and τ = Π det[b_q | s_q]^{(−1)^q}.
inline TorsionValue fr_torsion_value(const BasedComplex& c) {
  auto cert = is_acyclic(c);
  if (!cert.acyclic) fail(ErrorCode::NotAcyclic, "min singular value " + std::to_string(cert.min_singular));
  const int top = c.top_degree();
  // rank of d_q is forced by exactness: rk d_q = r_{q-1} − rk d_{q-1}
  std::vector<int> rk(top + 2, 0);
  for (int q = 1; q <= top; ++q) rk[q] = c.rank(q - 1) - rk[q - 1];
  std::vector<Mat> s(top + 2);
  for (int q = 0; q <= top + 1; ++q) {
    if (q == 0 || q > top || rk[q] == 0) {
      s[q] = Mat::Zero(c.rank(q), 0);
      continue;
    }
    Mat dq_adj = c.d(q).adjoint();
    Eigen::ColPivHouseholderQR<Mat> qr(dq_adj);
    Mat Q = qr.householderQ();
    s[q] = Q.leftCols(rk[q]);
  }
  TorsionValue tv;
  for (int q = 0; q <= top; ++q) {
    Mat b = (q + 1 <= top) ? Mat(c.d(q + 1) * s[q + 1]) : Mat::Zero(c.rank(q), 0);
    Mat M(c.rank(q), b.cols() + s[q].cols());
    M << b, s[q];
    cplx ph;
    const double la = detail::log_abs_det(M, &ph);
    const int sign = (q % 2 == 0) ? 1 : -1;
    tv.log_abs += sign * la;
    tv.phase *= (sign > 0) ? ph : std::conj(ph);
  }
  return tv;
}

inline double fr_torsion(const BasedComplex& c) { return fr_torsion_value(c).log_abs; }

struct HandleSlide {
  int i, j;
  cplx coefficient;
  int degree;
};
struct MonomialChange {
  int degree;
  std::vector<int> permutation; // new slot j holds old generator permutation[j]
  std::vector<cplx> units;
};
struct Expansion {
  int degree; // pair spans degrees (degree, degree−1)
};
struct Collapse {
  int degree;
};
struct Suspension {};

using ComplexMove = std::variant<HandleSlide, MonomialChange, Expansion, Collapse, Suspension>;

namespace detail {

// Basis change g on degree q: d_q ↦ d_q g, d_{q+1} ↦ g⁻¹ d_{q+1}.
inline BasedComplex change_basis(const BasedComplex& c, int q, const Mat& g, const Mat& g_inv,
                                 std::vector<double> filtration) {
  std::vector<Mat> d = c.differentials();
  if (q >= 1) d[q - 1] = d[q - 1] * g;
  if (q + 1 <= c.top_degree()) d[q] = g_inv * d[q];
  return BasedComplex(c.ranks(), std::move(d), std::move(filtration), c.unit_tag(), false);
}

} // namespace detail

inline BasedComplex apply_move(const BasedComplex& c, const ComplexMove& move) {
  const int top = c.top_degree();
  if (auto* m = std::get_if<HandleSlide>(&move)) {
    if (m->degree < 0 || m->degree > top) fail(ErrorCode::DegreeMismatch, "slide degree out of range");
    const int r = c.rank(m->degree);
    if (m->i < 0 || m->j < 0 || m->i >= r || m->j >= r) fail(ErrorCode::IndexOutOfRange, "slide generator index");
    if (m->i == m->j) fail(ErrorCode::IndexOutOfRange, "slide needs i ≠ j");
    Mat g = Mat::Identity(r, r), gi = Mat::Identity(r, r);
    g(m->i, m->j) = m->coefficient;
    gi(m->i, m->j) = -m->coefficient;
    return detail::change_basis(c, m->degree, g, gi, c.filtration());
  }
  if (auto* m = std::get_if<MonomialChange>(&move)) {
    if (m->degree < 0 || m->degree > top) fail(ErrorCode::DegreeMismatch, "monomial degree out of range");
    const int r = c.rank(m->degree);
    if (static_cast<int>(m->permutation.size()) != r || static_cast<int>(m->units.size()) != r)
      fail(ErrorCode::IndexOutOfRange, "monomial change size");
    std::vector<bool> seen(r, false);
    for (int p : m->permutation) {
      if (p < 0 || p >= r || seen[p]) fail(ErrorCode::IndexOutOfRange, "not a permutation");
      seen[p] = true;
    }
    Mat g = Mat::Zero(r, r), gi = Mat::Zero(r, r);
    for (int j = 0; j < r; ++j) {
      const cplx s = m->units[j];
      if (std::abs(std::abs(s) - 1.0) > tol::construction) fail(ErrorCode::MalformedComplex, "non-unit scalar");
      g(m->permutation[j], j) = s;
      gi(j, m->permutation[j]) = 1.0 / s;
    }
    std::vector<double> f = c.filtration();
    const int off = c.offset(m->degree);
    for (int j = 0; j < r; ++j) f[off + j] = c.filtration()[off + m->permutation[j]];
    return detail::change_basis(c, m->degree, g, gi, std::move(f));
  }
  if (auto* m = std::get_if<Expansion>(&move)) {
    const int q = m->degree;
    if (q < 1 || q > top + 1) fail(ErrorCode::DegreeMismatch, "expansion degree must lie in 1..top+1");
    std::vector<int> ranks = c.ranks();
    if (q > top) ranks.push_back(0);
    std::vector<int> nr = ranks;
    nr[q] += 1;
    nr[q - 1] += 1;
    std::vector<Mat> d;
    for (int p = 1; p < static_cast<int>(nr.size()); ++p) {
      Mat old = c.d(p);
      Mat m2 = Mat::Zero(nr[p - 1], nr[p]);
      m2.topLeftCorner(old.rows(), old.cols()) = old;
      if (p == q) m2(nr[p - 1] - 1, nr[p] - 1) = 1.0;
      d.push_back(std::move(m2));
    }
    std::vector<double> f;
    for (int p = 0; p < static_cast<int>(nr.size()); ++p) {
      for (int j = 0; j < c.rank(p); ++j) f.push_back(c.filtration()[c.offset(p) + j]);
      if (p == q || p == q - 1) f.push_back(0.0);
    }
    return BasedComplex(nr, std::move(d), std::move(f), c.unit_tag(), false);
  }
  if (auto* m = std::get_if<Collapse>(&move)) {
    const int q = m->degree;
    if (q < 1 || q > top) fail(ErrorCode::DegreeMismatch, "collapse degree must lie in 1..top");
    if (c.rank(q) == 0 || c.rank(q - 1) == 0) fail(ErrorCode::IndexOutOfRange, "no generator to collapse");
    const int a = c.rank(q) - 1, b = c.rank(q - 1) - 1;
    const Mat dq = c.d(q);
    bool isolated = std::abs(dq(b, a) - 1.0) <= tol::construction;
    for (int i = 0; i < dq.rows(); ++i)
      if (i != b && std::abs(dq(i, a)) > tol::construction) isolated = false;
    for (int j = 0; j < dq.cols(); ++j)
      if (j != a && std::abs(dq(b, j)) > tol::construction) isolated = false;
    if (q + 1 <= top && c.rank(q + 1) > 0 && c.d(q + 1).row(a).cwiseAbs().maxCoeff() > tol::construction)
      isolated = false;
    if (q - 1 >= 1 && c.rank(q - 2) > 0 && c.d(q - 1).col(b).cwiseAbs().maxCoeff() > tol::construction)
      isolated = false;
    if (!isolated) fail(ErrorCode::DegreeMismatch, "last generators of degrees q, q−1 are not a cancelling pair");
    std::vector<int> nr = c.ranks();
    nr[q] -= 1;
    nr[q - 1] -= 1;
    std::vector<Mat> d;
    for (int p = 1; p <= top; ++p) d.push_back(c.d(p).topLeftCorner(nr[p - 1], nr[p]));
    std::vector<double> f;
    for (int p = 0; p <= top; ++p)
      for (int j = 0; j < nr[p]; ++j) f.push_back(c.filtration()[c.offset(p) + j]);
    // a trailing empty degree created by the collapse is dropped
    while (nr.size() > 1 && nr.back() == 0) {
      nr.pop_back();
      d.pop_back();
    }
    return BasedComplex(nr, std::move(d), std::move(f), c.unit_tag(), false);
  }
  // Suspension: C'_{q+1} = C_q, d' = −d
  std::vector<int> nr{0};
  nr.insert(nr.end(), c.ranks().begin(), c.ranks().end());
  std::vector<Mat> d{Mat::Zero(0, c.rank(0))};
  for (const Mat& m : c.differentials()) d.push_back(-m);
  return BasedComplex(nr, std::move(d), c.filtration(), c.unit_tag(), false);
}

inline BasedComplex direct_sum(const BasedComplex& a, const BasedComplex& b) {
  const int top = std::max(a.top_degree(), b.top_degree());
  std::vector<int> nr(top + 1);
  for (int q = 0; q <= top; ++q) nr[q] = a.rank(q) + b.rank(q);
  std::vector<Mat> d;
  for (int q = 1; q <= top; ++q) {
    Mat m = Mat::Zero(nr[q - 1], nr[q]);
    m.topLeftCorner(a.rank(q - 1), a.rank(q)) = a.d(q);
    m.bottomRightCorner(b.rank(q - 1), b.rank(q)) = b.d(q);
    d.push_back(std::move(m));
  }
  std::vector<double> f;
  for (int q = 0; q <= top; ++q) {
    for (int j = 0; j < a.rank(q); ++j) f.push_back(a.filtration()[a.offset(q) + j]);
    for (int j = 0; j < b.rank(q); ++j) f.push_back(b.filtration()[b.offset(q) + j]);
  }
  UnitTag tag = a.unit_tag() == b.unit_tag() ? a.unit_tag() : (b.unit_tag().trivial() ? a.unit_tag() : UnitTag{});
  if (!a.unit_tag().trivial() && !b.unit_tag().trivial() && !(a.unit_tag() == b.unit_tag())) tag = UnitTag{};
  return BasedComplex(nr, std::move(d), std::move(f), tag, false);
}

struct ChainMap {
  BasedComplex source, target;
  std::vector<Mat> maps; // maps[q]: source_q → target_q
};

// Cone_q = A_{q−1} ⊕ B_q, d(a, b) = (−d_A a, f(a) + d_B b).
inline BasedComplex mapping_cone(const ChainMap& f) {
  const BasedComplex& A = f.source;
  const BasedComplex& B = f.target;
  const int top_in = std::max(A.top_degree(), B.top_degree());
  auto fmap = [&](int q) -> Mat {
    if (q < 0 || q >= static_cast<int>(f.maps.size())) return Mat::Zero(B.rank(q), A.rank(q));
    return f.maps[q];
  };
  for (int q = 0; q <= top_in; ++q) {
    Mat m = fmap(q);
    if (m.rows() != B.rank(q) || m.cols() != A.rank(q)) fail(ErrorCode::NotChainMap, "map shape in degree " + std::to_string(q));
  }
  for (int q = 1; q <= top_in; ++q) {
    Mat lhs = fmap(q - 1) * A.d(q), rhs = B.d(q) * fmap(q);
    if (lhs.size() && (lhs - rhs).cwiseAbs().maxCoeff() > tol::construction)
      fail(ErrorCode::NotChainMap, "f∘d ≠ d∘f in degree " + std::to_string(q));
  }
  const int top = std::max(A.top_degree() + 1, B.top_degree());
  auto cr = [&](int q) { return A.rank(q - 1) + B.rank(q); };
  std::vector<int> nr(top + 1);
  for (int q = 0; q <= top; ++q) nr[q] = cr(q);
  std::vector<Mat> d;
  for (int q = 1; q <= top; ++q) {
    Mat m = Mat::Zero(nr[q - 1], nr[q]);
    const int a_out = A.rank(q - 2), a_in = A.rank(q - 1);
    if (a_out && a_in) m.topLeftCorner(a_out, a_in) = -A.d(q - 1);
    if (a_in && B.rank(q - 1)) m.block(a_out, 0, B.rank(q - 1), a_in) = fmap(q - 1);
    if (B.rank(q - 1) && B.rank(q)) m.block(a_out, a_in, B.rank(q - 1), B.rank(q)) = B.d(q);
    d.push_back(std::move(m));
  }
  std::vector<double> filt;
  for (int q = 0; q <= top; ++q) {
    for (int j = 0; j < A.rank(q - 1); ++j) filt.push_back(A.filtration()[A.offset(q - 1) + j]);
    for (int j = 0; j < B.rank(q); ++j) filt.push_back(B.filtration()[B.offset(q) + j]);
  }
  return BasedComplex(nr, std::move(d), std::move(filt), B.unit_tag(), false);
}

// Convenience: the 2-term complex C →(a) C in degrees 1 → 0.
inline BasedComplex two_term(cplx a, UnitTag tag = {}) {
  Mat m(1, 1);
  m(0, 0) = a;
  return BasedComplex({1, 1}, {m}, {}, tag, !tag.trivial());
}

} // namespace torsionlab
