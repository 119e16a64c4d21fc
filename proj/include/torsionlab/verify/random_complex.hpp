#pragma once

#include <random>

#include "../chainkit.hpp"

namespace torsionlab::verify {

// Acyclic by construction: a direct sum of cancelling pairs C →(a) C conjugated
// degree-wise by invertible upper-triangular matrices with unit-phase diagonals
// of random modulus.
inline BasedComplex random_acyclic(std::mt19937_64& rng, int max_total_rank = 12) {
  std::uniform_int_distribution<int> top_d(1, 4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int top = top_d(rng);
  std::uniform_int_distribution<int> pairs_d(1, max_total_rank / 2);
  const int pairs = pairs_d(rng);
  std::uniform_int_distribution<int> where(1, top);
  std::vector<int> pair_degree(pairs);
  std::vector<int> ranks(top + 1, 0);
  for (int p = 0; p < pairs; ++p) {
    pair_degree[p] = where(rng);
    ranks[pair_degree[p]]++;
    ranks[pair_degree[p] - 1]++;
  }
  std::vector<Mat> d;
  for (int q = 1; q <= top; ++q) d.push_back(Mat::Zero(ranks[q - 1], ranks[q]));
  std::vector<int> fill(top + 1, 0);
  for (int p = 0; p < pairs; ++p) {
    const int q = pair_degree[p];
    const cplx a = std::polar(std::exp(1.5 * unif(rng)), kPi * unif(rng));
    d[q - 1](fill[q - 1], fill[q]) = a;
    fill[q - 1]++;
    fill[q]++;
  }
  std::vector<Mat> g(top + 1), gi(top + 1);
  for (int q = 0; q <= top; ++q) {
    const int r = ranks[q];
    Mat m = Mat::Zero(r, r);
    for (int i = 0; i < r; ++i) {
      m(i, i) = std::polar(std::exp(0.5 * unif(rng)), kPi * unif(rng));
      for (int j = i + 1; j < r; ++j) m(i, j) = cplx(gauss(rng), gauss(rng)) * 0.7;
    }
    g[q] = m;
    gi[q] = r ? Mat(m.inverse()) : m;
  }
  for (int q = 1; q <= top; ++q) d[q - 1] = g[q - 1] * d[q - 1] * gi[q];
  std::vector<double> f;
  for (int q = 0; q <= top; ++q)
    for (int j = 0; j < ranks[q]; ++j) f.push_back(double(q) + 0.1 * j);
  return BasedComplex(ranks, std::move(d), std::move(f), {}, false);
}

} // namespace torsionlab::verify
