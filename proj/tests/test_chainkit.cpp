#include <catch_amalgamated.hpp>

#include <random>

#include "torsionlab/chainkit.hpp"
#include "torsionlab/verify/laplacian.hpp"
#include "torsionlab/verify/random_complex.hpp"

using namespace torsionlab;
using Catch::Matchers::WithinAbs;

namespace {

Mat m1(cplx a) {
  Mat m(1, 1);
  m(0, 0) = a;
  return m;
}

// C →(d2) C² →(d1) C with d1 = [a, b], d2 = [−b; a]·β.
BasedComplex three_term(cplx a, cplx b, cplx beta) {
  Mat d1(1, 2), d2(2, 1);
  d1 << a, b;
  d2 << -b * beta, a * beta;
  return BasedComplex({1, 2, 1}, {d1, d2});
}

} // namespace

TEST_CASE("two-term complex has torsion log|a|") {
  CHECK_THAT(fr_torsion(two_term(2.0)), WithinAbs(0.69314718055994531, 1e-14));
  CHECK_THAT(fr_torsion(two_term(cplx(0.0, 0.5))), WithinAbs(-0.69314718055994531, 1e-14));
  CHECK_THAT(fr_torsion(two_term(1.0)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("three-term complex against the hand-computed value") {
  const BasedComplex c = three_term(3.0, cplx(0.0, 4.0), 2.0);
  CHECK_THAT(fr_torsion(c), WithinAbs(verify::laplacian_torsion(c), 1e-12));
  // Δ1 has eigenvalues {25, 100} and Δ2 = 100: ½(log 2500 − 2 log 100) = −log 2
  CHECK_THAT(fr_torsion(c), WithinAbs(-0.69314718055994531, 1e-12));
}

TEST_CASE("random complexes match the Laplacian oracle") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const BasedComplex c = verify::random_acyclic(rng, 12);
    CHECK_THAT(fr_torsion(c), WithinAbs(verify::laplacian_torsion(c), 1e-9));
  }
}

TEST_CASE("elementary moves preserve |τ|") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const BasedComplex c = verify::random_acyclic(rng, 10);
    const double t = fr_torsion(c);
    for (int q = 0; q <= c.top_degree(); ++q) {
      const int r = c.rank(q);
      if (r >= 2) {
        const BasedComplex s = apply_move(c, HandleSlide{0, r - 1, cplx(u(rng), u(rng)), q});
        CHECK_THAT(fr_torsion(s), WithinAbs(t, 1e-9));
      }
      std::vector<int> perm(r);
      std::iota(perm.rbegin(), perm.rend(), 0);
      std::vector<cplx> units;
      for (int j = 0; j < r; ++j) units.push_back(std::polar(1.0, 3.0 * u(rng)));
      CHECK_THAT(fr_torsion(apply_move(c, MonomialChange{q, perm, units})), WithinAbs(t, 1e-9));
    }
    const BasedComplex e = apply_move(c, Expansion{1});
    CHECK_THAT(fr_torsion(e), WithinAbs(t, 1e-9));
    const BasedComplex back = apply_move(e, Collapse{1});
    std::vector<int> want = c.ranks();
    while (want.size() > 1 && want.back() == 0) want.pop_back(); // collapse drops empty top degrees
    CHECK(back.ranks() == want);
    CHECK_THAT(fr_torsion(back), WithinAbs(t, 1e-12));
  }
}

TEST_CASE("suspension inverts the torsion") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const BasedComplex c = verify::random_acyclic(rng, 8);
    CHECK_THAT(fr_torsion(apply_move(c, Suspension{})), WithinAbs(-fr_torsion(c), 1e-9));
  }
}

TEST_CASE("direct sums add torsion") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const BasedComplex a = verify::random_acyclic(rng, 6), b = verify::random_acyclic(rng, 6);
    CHECK_THAT(fr_torsion(direct_sum(a, b)), WithinAbs(fr_torsion(a) + fr_torsion(b), 1e-9));
  }
}

TEST_CASE("mapping cone of an isomorphism is acyclic") {
  const BasedComplex A({1}, {}), B({1}, {});
  const BasedComplex cone = mapping_cone({A, B, {m1(3.0)}});
  CHECK(is_acyclic(cone).acyclic);
  CHECK_THAT(fr_torsion(cone), WithinAbs(std::log(3.0), 1e-12));
  const BasedComplex C = two_term(2.0);
  CHECK_THROWS_MATCHES(mapping_cone({C, C, {m1(1.0), m1(2.0)}}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NotChainMap; }));
}

TEST_CASE("malformed and non-acyclic complexes are rejected") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoFailure;
  };
  Mat d1(1, 1), d2(1, 1);
  d1 << 1.0;
  d2 << 1.0;
  CHECK(code_of([&] { BasedComplex({1, 1, 1}, {d1, d2}); }) == ErrorCode::MalformedComplex);
  CHECK(code_of([&] { BasedComplex({1, 2}, {d1}); }) == ErrorCode::MalformedComplex);
  CHECK(code_of([&] { fr_torsion(two_term(0.0)); }) == ErrorCode::NotAcyclic);
  CHECK(code_of([&] { apply_move(two_term(1.0), HandleSlide{0, 0, 1.0, 0}); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { apply_move(two_term(2.0), Collapse{1}); }) == ErrorCode::DegreeMismatch);
}

TEST_CASE("unit-ring tags") {
  const UnitTag w{3, 1};
  const cplx u = w.generator();
  CHECK_NOTHROW(two_term(1.0 - u, w));
  CHECK_THROWS_AS(two_term(0.5, w), Error);
  CHECK(detail::euler_phi(12) == 4);
  CHECK(detail::euler_phi(7) == 6);
  CHECK(*detail::in_unit_ring(2.0 + 3.0 * u, w, 1e-12));
  CHECK_FALSE(detail::in_unit_ring(cplx(0.0, 1.0), UnitTag{11, 1}, 1e-12).has_value());
}
