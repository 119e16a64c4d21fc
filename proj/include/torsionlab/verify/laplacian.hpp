#pragma once

#include <Eigen/Dense>

#include "../chainkit.hpp"

namespace torsionlab::verify {

// Degree-q combinatorial Laplacian Δ_q = d_{q+1} d_{q+1}† + d_q† d_q.
inline Mat laplacian(const BasedComplex& c, int q) {
  Mat up = c.d(q + 1);
  Mat down = c.d(q);
  Mat L = Mat::Zero(c.rank(q), c.rank(q));
  if (up.cols()) L += up * up.adjoint();
  if (down.rows()) L += down.adjoint() * down;
  return L;
}

// ½ Σ_q (−1)^{q+1} q log det Δ_q from Hermitian eigenvalues.
inline double laplacian_torsion(const BasedComplex& c) {
  double acc = 0.0;
  for (int q = 1; q <= c.top_degree(); ++q) {
    if (c.rank(q) == 0) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(laplacian(c, q), Eigen::EigenvaluesOnly);
    double ld = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ld += std::log(es.eigenvalues()(i));
    acc += ((q + 1) % 2 == 0 ? 1.0 : -1.0) * q * ld;
  }
  return 0.5 * acc;
}

} // namespace torsionlab::verify
