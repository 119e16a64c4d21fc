#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "charclass.hpp"
#include "famtor.hpp"
#include "genfront.hpp"
#include "tubefun.hpp"
#include "verify/laplacian.hpp"
#include "verify/random_complex.hpp"

namespace torsionlab::acceptance {

using json = nlohmann::json;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  json detail = json::object();
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20240611;
  std::vector<int> only; // empty → all ten
};

namespace families {

// Ranks {2, 2}: d = I + s·(y·σ), invertible for s < 1.
inline ChainFamily sphere2_probe(int res, double s = 0.5) {
  return sample_family(build_base(ManifoldKind::Sphere2, res), {2, 2}, {}, "Named:sphere2-probe",
                       [s](int, const Coords&, const Eigen::VectorXd& y) {
                         const auto p = presets::pauli();
                         Mat d = Mat::Identity(2, 2);
                         for (int i = 0; i < 3; ++i) d += s * y[i] * p[i];
                         return Differentials{d};
                       });
}

// Ranks {1, 2, 1}: d1 = [a, b], d2 = β[−b; a] with a = 1 + 0.3y₃, b = 0.4(y₁ + iy₂).
inline ChainFamily sphere2_probe3(int res) {
  return sample_family(build_base(ManifoldKind::Sphere2, res), {1, 2, 1}, {}, "Named:sphere2-probe3",
                       [](int, const Coords&, const Eigen::VectorXd& y) {
                         const cplx a = 1.0 + 0.3 * y[2], b = 0.4 * cplx(y[0], y[1]);
                         const double beta = 1.0 + 0.2 * y[0];
                         Mat d1(1, 2), d2(2, 1);
                         d1 << a, b;
                         d2 << -beta * b, beta * a;
                         return Differentials{d1, d2};
                       });
}

inline ChainFamily sphere4_probe(int res) {
  return sample_family(build_base(ManifoldKind::Sphere4, res), {2, 2}, {}, "Named:sphere4-probe",
                       [](int, const Coords&, const Eigen::VectorXd& y) {
                         const auto p = presets::pauli();
                         Mat d = Mat::Identity(2, 2);
                         for (int i = 0; i < 3; ++i) d += 0.5 * y[i] * p[i];
                         d(0, 1) += cplx(0.0, 0.3) * y[3];
                         d(1, 0) += 0.2 * y[4];
                         return Differentials{d};
                       });
}

} // namespace families

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline double form_diff(const SampledForm& a, const SampledForm& b) {
  double m = 0.0;
  const int nc = a.ncomp();
  for (int c = 0; c < a.atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < a.atlas->chart(c).npoints; ++p) {
      if (a.atlas->weight(c, p) <= 0.0) continue;
      for (int k = 0; k < nc; ++k) m = std::max(m, std::abs(a.comps[c][p * nc + k] - b.comps[c][p * nc + k]));
    }
  return m;
}

inline SampledForm add_forms(const SampledForm& a, const SampledForm& b) {
  SampledForm s = a;
  for (std::size_t c = 0; c < s.comps.size(); ++c)
    for (std::size_t i = 0; i < s.comps[c].size(); ++i) s.comps[c][i] += b.comps[c][i];
  return s;
}

inline Mat monomial(int n, std::mt19937_64& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
  Mat g = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) g(perm[j], j) = std::polar(1.0, kPi * ((rng() % 2048) / 1024.0 - 1.0));
  return g;
}

// Convergence order between successive resolutions.
inline double order(double e_coarse, double e_fine, int r_coarse, int r_fine) {
  return std::log(e_coarse / e_fine) / std::log(double(r_fine) / r_coarse);
}

} // namespace detail

// ---------------------------------------------------------------------------

inline CriterionResult fr_oracle(const Options& o) {
  CriterionResult r{1, "FR-torsion oracle equivalence"};
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  int max_rank = 0;
  for (int i = 0; i < 200; ++i) {
    const BasedComplex c = verify::random_acyclic(rng, 12);
    int tr = 0;
    for (int q = 0; q <= c.top_degree(); ++q) tr += c.rank(q);
    max_rank = std::max(max_rank, tr);
    worst = std::max(worst, std::abs(fr_torsion(c) - verify::laplacian_torsion(c)));
  }
  r.passed = worst <= 1e-9;
  r.detail = {{"complexes", 200}, {"max_total_rank", max_rank}, {"max_abs_error", worst}, {"tolerance", 1e-9}};
  r.summary = "200 complexes, max |fr − oracle| = " + detail::num(worst);
  return r;
}

struct CircleCase {
  int n, p, q;
  double integral;
};

inline std::vector<CircleCase> circle_cases(bool twisted, int res) {
  std::vector<CircleCase> out{{3, 1, 3, 0.0}, {6, 1, 3, 0.0}, {3, 2, 3, 0.0}, {2, 1, 2, 0.0}};
  for (auto& c : out) {
    const ChainFamily f = twisted ? circle_bundle_family_twisted(c.n, c.p, c.q, res) : circle_bundle_family(c.n, c.p, c.q, res);
    c.integral = *torsion_form(f, 1).integral;
  }
  return out;
}

// Ratio, vanishing and calibrated-value tests on the four circle-bundle integrals.
// Below the significance floor the (3, ω) integral cannot anchor any ratio.
inline json dilog_tests(const std::vector<CircleCase>& cs, bool& passed) {
  constexpr double floor = 1e-6;
  const double i3 = cs[0].integral, i6 = cs[1].integral, i3b = cs[2].integral, i2 = cs[3].integral;
  const double im = dilog(std::polar(1.0, 2.0 * kPi / 3.0)).imag();
  json j;
  for (const auto& c : cs)
    j["integrals"].push_back({{"euler", c.n}, {"root", std::to_string(c.p) + "/" + std::to_string(c.q)}, {"integral", c.integral}});
  j["im_dilog_omega"] = im;
  j["significance_floor"] = floor;
  if (std::abs(i3) < floor) {
    j["significant"] = false;
    j["kappa"] = nullptr;
    passed = false;
    return j;
  }
  j["significant"] = true;
  const double r6 = i6 / i3, r3b = i3b / i3, r2 = std::abs(i2 / i3);
  const double kappa = i3 / (3.0 * im);
  const bool a = std::abs(r6 - 2.0) <= 0.04 && std::abs(r3b + 1.0) <= 0.02;
  const bool b = r2 <= 0.02;
  const bool c = std::abs(i6 - kappa * 6.0 * im) <= 0.02 * std::abs(kappa * 6.0 * im);
  j["ratio_6_to_3"] = r6;
  j["ratio_conj_to_3"] = r3b;
  j["ratio_n2_to_3"] = r2;
  j["kappa"] = kappa;
  j["ratio_test"] = a;
  j["vanishing_test"] = b;
  j["calibrated_test"] = c;
  passed = a && b && c;
  return j;
}

inline CriterionResult dilog_anchor(const Options&) {
  CriterionResult r{2, "Dilogarithm anchor (circle bundles)"};
  bool pm = false, pg = false;
  r.detail["model"] = dilog_tests(circle_cases(false, 64), pm);
  r.detail["geometric_fallback"] = dilog_tests(circle_cases(true, 64), pg);
  r.detail["resolution"] = 64;
  r.passed = pm || pg;
  const double i3 = r.detail["model"]["integrals"][0]["integral"].get<double>();
  const double g3 = r.detail["geometric_fallback"]["integrals"][0]["integral"].get<double>();
  r.summary = "I(3,ω) = " + detail::num(i3) + " (model), " + detail::num(g3) + " (fallback)";
  if (!r.passed) r.summary += "; below significance floor, κ undefined";
  return r;
}

inline CriterionResult zero_section(const Options& o) {
  CriterionResult r{3, "Zero-section triviality"};
  std::mt19937_64 rng(o.seed + 3);
  const BasedComplex tmpl = verify::random_acyclic(rng, 8);
  double worst = 0.0;
  auto run = [&](ManifoldKind kind, int res, int k) {
    const ChainFamily f = zero_section_family(build_base(kind, res), tmpl);
    const double m = max_norm(torsion_form(f, k).form);
    worst = std::max(worst, m);
    r.detail["cases"].push_back({{"base", kind_name(kind)}, {"resolution", res}, {"k", k}, {"max_norm", m}});
  };
  run(ManifoldKind::Sphere2, 16, 1);
  run(ManifoldKind::Sphere4, 8, 1);
  run(ManifoldKind::Sphere4, 8, 2);
  r.passed = worst <= 1e-10;
  r.summary = "max-norm " + detail::num(worst) + " (≤ 1e-10)";
  return r;
}

inline CriterionResult stabilization(const Options&) {
  CriterionResult r{4, "Stabilization invariance"};
  const ChainFamily f = circle_bundle_family(3, 1, 3, 64);
  const ChainFamily s = direct_sum(f, zero_section_family(f.atlas, two_term(cplx(2.0, 1.0))));
  const double a = *torsion_form(f, 1).integral, b = *torsion_form(s, 1).integral;
  const double d = std::abs(b - a);
  r.passed = d <= 1e-4 * std::abs(a);
  r.detail = {{"integral", a}, {"stabilized_integral", b}, {"abs_change", d}, {"tolerance_rel", 1e-4}};
  if (std::abs(a) < 1e-6) r.detail["note"] = "base integral below the 1e-6 significance floor of the dilogarithm anchor";
  r.summary = "|ΔI| = " + detail::num(d) + " with I = " + detail::num(a);
  return r;
}

inline CriterionResult twisted_shift(const Options&) {
  CriterionResult r{5, "Twisted-stabilization shift (Pontryagin side)"};
  auto q = presets::clifford_rigid(build_base(ManifoldKind::Sphere4, 16));
  BundleProjector E = stable_bundle(*q);
  // Q is a complex Hermitian family; its real stable bundle is declared, doubling the rank.
  E.complexified_real = true;
  E.complexification_factor = 2;
  const double ch2 = integrate_form(chern_character_form(E, 2));
  const double p1 = integrate_form(pontryagin_character(E, 1));
  const double n = std::round(ch2);
  const double half_z3 = 0.5 * zeta(3.0);
  const double want = -half_z3 * n;
  const BundleProjector EE = direct_sum(E, E);
  const double p1s = integrate_form(pontryagin_character(EE, 1));
  const bool integral = std::abs(ch2 - n) <= 1e-2 && std::abs(n) == 1.0;
  const bool shift = std::abs(p1 - want) <= 1e-2 * std::abs(want);
  const bool additive = std::abs(p1s - 2.0 * p1) <= 1e-6 * std::abs(p1);
  r.passed = integral && shift && additive;
  r.detail = {{"ch2", ch2},
              {"ch2_integer", n},
              {"p1", p1},
              {"p1_over_half_zeta3", p1 / half_z3},
              {"expected_p1", want},
              {"p1_direct_sum", p1s},
              {"additivity_error", std::abs(p1s - 2.0 * p1)},
              {"complexification_factor", E.complexification_factor}};
  r.summary = "ch2 = " + detail::num(ch2) + ", p1/(½ζ(3)) = " + detail::num(p1 / half_z3) +
              ", |p(E⊕E) − 2p(E)| = " + detail::num(std::abs(p1s - 2.0 * p1));
  return r;
}

inline CriterionResult framing_algebra(const Options&) {
  CriterionResult r{6, "Framing assembler algebra"};
  auto at = build_base(ManifoldKind::Sphere2, 16);
  SampledForm w = sample_form(at, 2, [&](int c, const Coords& x) {
    return std::vector<double>{std::sin(1.3 * x[0]) * std::cos(0.7 * x[1]) + 0.25 * c};
  });
  // an index-(1, 2) pair born over the northern region
  Mask region = full_mask(*at);
  for (int c = 0; c < at->num_charts(); ++c)
    for (std::size_t p = 0; p < at->chart(c).npoints; ++p) region[c][p] = at->ambient(c, p)[2] > 0.3;
  const Mask full = full_mask(*at);
  struct Layout {
    std::vector<std::pair<int, Mask>> strata;
    int chi;
  };
  const std::vector<Layout> layouts{{{{0, full}}, 1},
                                    {{{0, full}, {1, region}, {2, region}}, 1},
                                    {{{0, full}, {2, full}}, 2},
                                    {{{0, full}, {1, full}}, 0},
                                    {{{1, full}}, -1}};
  bool exact = true;
  for (const auto& L : layouts) {
    const StrataCochain s = pullback(w, L.strata);
    const int chi = euler_characteristic(s);
    const SampledForm back = pushdown(s);
    bool same = chi == L.chi;
    for (std::size_t c = 0; c < back.comps.size(); ++c)
      for (std::size_t i = 0; i < back.comps[c].size(); ++i) same = same && back.comps[c][i] == chi * w.comps[c][i];
    exact = exact && same;
    r.detail["pushdown_pullback"].push_back({{"strata", L.strata.size()}, {"chi", chi}, {"exact", same}});
  }
  TorsionResult tau;
  tau.degree = 2;
  tau.form = w;
  tau.integral = 0.8125;
  const StrataCochain g = pullback(w, layouts[1].strata);
  const double a = *tau.integral, b = integrate_form(pushdown(g));
  const double got = assemble_framing(tau, g);
  const bool assembled = got == -(a + b) && assemble_framing(tau, g, true) == a + b;
  bool caught = false;
  try {
    euler_characteristic(pullback(w, {{0, full}, {1, region}}));
  } catch (const Error& e) {
    caught = e.code() == ErrorCode::UncancelledBoundary;
  }
  r.passed = exact && assembled && caught;
  r.detail["assemble"] = {{"tau", a}, {"pushdown_integral", b}, {"assembled", got}, {"bitwise", assembled}};
  r.detail["uncancelled_boundary_rejected"] = caught;
  r.summary = std::string("π_*π^* = χ exact: ") + (exact ? "yes" : "no") + ", assemble = −(a+b): " +
              (assembled ? "yes" : "no") + ", lone stratum rejected: " + (caught ? "yes" : "no");
  return r;
}

inline CriterionResult chern_weil(const Options&) {
  CriterionResult r{7, "Chern–Weil integrality"};
  const double c1 = integrate_form(chern_character_form(presets::bott_projector(build_base(ManifoldKind::Sphere2, 64)), 1));
  const double c2 = integrate_form(chern_character_form(presets::clifford_projector(build_base(ManifoldKind::Sphere4, 16)), 2));
  const bool a = std::abs(std::abs(c1) - 1.0) <= 1e-3, b = std::abs(std::abs(c2) - 1.0) <= 1e-2;
  r.passed = a && b;
  r.detail = {{"bott_ch1", c1}, {"bott_resolution", 64}, {"clifford_ch2", c2}, {"clifford_resolution", 16}};
  r.summary = "ch1 = " + detail::num(c1) + ", ch2 = " + detail::num(c2);
  return r;
}

inline CriterionResult front_extraction(const Options&) {
  CriterionResult r{8, "Front extraction"};
  const GeneratingFunction f = presets::cubic_fold(201);
  FrontDiagram fd = fiberwise_critical_locus(f);
  locate_cusps(f, fd);
  double err = 0.0;
  std::size_t checked = 0;
  for (const SheetPoint& s : fd.sheets) {
    const double t = s.m[0];
    if (t < 0.01 - 1e-12) continue;
    const double want = (s.v[0] > 0 ? -2.0 : 2.0) * std::pow(t, 1.5);
    err = std::max(err, std::abs(s.z - want));
    ++checked;
  }
  bool cusp_ok = false;
  json cusps = json::array();
  for (const CuspPoint& c : fd.cusps) {
    const Classification k = classify_moderate(f, c.chart, c.m, c.v);
    cusps.push_back({{"t", c.m[0]}, {"kind", singularity_name(k.kind)}, {"co_orientation", c.co_orientation}});
    if (std::abs(c.m[0]) <= 1e-6 && k.kind == SingularityKind::BirthDeath && c.co_orientation > 0) cusp_ok = true;
  }
  const GeneratingFunction w = presets::wrinkle(41);
  FrontDiagram fw = fiberwise_critical_locus(w);
  locate_cusps(w, fw);
  double ring = 0.0;
  bool ring_bd = !fw.cusps.empty();
  for (const CuspPoint& c : fw.cusps) {
    ring = std::max(ring, std::abs(std::hypot(c.m[0], c.m[1]) - 1.0));
    if (classify_moderate(w, c.chart, c.m, c.v).kind != SingularityKind::BirthDeath) ring_bd = false;
  }
  const bool fold_ok = err <= 1e-6 && checked > 0;
  const bool ring_ok = ring_bd && ring <= 1e-6;
  r.passed = fold_ok && cusp_ok && ring_ok;
  r.detail = {{"fold_max_error", err},     {"fold_samples", checked},     {"fold_cusps", cusps},
              {"wrinkle_cusps", fw.cusps.size()}, {"wrinkle_ring_error", ring}, {"wrinkle_birth_death", ring_bd}};
  r.summary = "fold error " + detail::num(err) + ", cusp at t=0 " + (cusp_ok ? "BirthDeath/+" : "missing") + ", " +
              std::to_string(fw.cusps.size()) + " wrinkle cusps with ring error " + detail::num(ring);
  return r;
}

inline CriterionResult doubling(const Options&) {
  CriterionResult r{9, "Doubling"};
  auto at = build_base(ManifoldKind::Sphere2, 8);
  const GeneratingFunction f = presets::zero_section(at, 1, 1);
  const GeneratingFunction D = double_gf(f, 1.0);
  const FrontDiagram f0 = fiberwise_critical_locus(f);
  const FrontDiagram f1 = fiberwise_critical_locus(D);
  const int k = f0.sheets.empty() ? -1 : f0.sheets.front().index;
  std::map<std::pair<int, std::size_t>, std::vector<const SheetPoint*>> orig, dbl;
  for (const auto& s : f0.sheets) orig[{s.chart, s.point}].push_back(&s);
  for (const auto& s : f1.sheets) dbl[{s.chart, s.point}].push_back(&s);
  double union_err = 0.0;
  bool shape = orig.size() == dbl.size(), flat = true;
  for (const auto& [key, os] : orig) {
    auto it = dbl.find(key);
    if (it == dbl.end() || it->second.size() != 2 * os.size()) {
      shape = false;
      continue;
    }
    for (const SheetPoint* o : os)
      for (double shift : {-2.0, 2.0}) {
        double best = std::numeric_limits<double>::infinity();
        for (const SheetPoint* d : it->second) best = std::min(best, std::abs(d->z - (o->z + shift)));
        union_err = std::max(union_err, best);
      }
    for (const SheetPoint* d : it->second) {
      const int want = d->z < 0 ? k : k + 1;
      if (std::abs(std::abs(d->z) - 2.0) > 1e-8 || d->index != want) flat = false;
    }
  }
  r.passed = shape && flat && union_err <= 1e-8 && k >= 0;
  r.detail = {{"sigma", 1.0}, {"original_index", k}, {"sheets", f1.num_sheets}, {"front_union_error", union_err},
              {"flat_sheets_at_pm2", flat}, {"sheet_count_matches", shape}};
  r.summary = std::to_string(f1.num_sheets) + " sheets, indices " + std::to_string(k) + "/" + std::to_string(k + 1) +
              ", union error " + detail::num(union_err);
  return r;
}

inline CriterionResult property_battery(const Options& o) {
  CriterionResult r{10, "Property battery"};
  std::mt19937_64 rng(o.seed + 10);
  json& d = r.detail;

  // monomial-basis invariance of the torsion form
  const ChainFamily f = families::sphere2_probe3(16);
  const TorsionResult tf = torsion_form(f, 1);
  std::vector<Mat> g;
  for (int rk : f.ranks) g.push_back(detail::monomial(rk, rng));
  const double mono = detail::form_diff(tf.form, torsion_form(change_basis(f, g), 1).form);
  double fr_mono = 0.0;
  for (int i = 0; i < 50; ++i) {
    const BasedComplex c = verify::random_acyclic(rng, 10);
    const int q = static_cast<int>(rng() % (c.top_degree() + 1));
    std::vector<int> perm(c.rank(q));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<cplx> units(perm.size(), std::polar(1.0, 0.7 * (i + 1)));
    fr_mono = std::max(fr_mono, std::abs(fr_torsion(apply_move(c, MonomialChange{q, perm, units})) - fr_torsion(c)));
  }
  const bool p_mono = mono <= tol::family && fr_mono <= tol::invertibility;
  d["monomial_invariance"] = {{"form_max_diff", mono}, {"fr_max_diff", fr_mono}, {"passed", p_mono}};

  // direct-sum additivity
  // the second summand is resampled on the first one's atlas
  const ChainFamily h = sample_family(f.atlas, {2, 2}, {}, "Named:sphere2-probe", families::sphere2_probe(8, 0.6).sampler);
  const TorsionResult th = torsion_form(h, 1);
  const double add = detail::form_diff(torsion_form(direct_sum(f, h), 1).form, detail::add_forms(tf.form, th.form));
  const bool p_add = add <= tol::family;
  d["direct_sum_additivity"] = {{"form_max_diff", add}, {"passed", p_add}};

  // closedness O(res⁻²) on Sphere4
  const TorsionResult c8 = torsion_form(families::sphere4_probe(8), 1);
  const ChainFamily f12 = families::sphere4_probe(12);
  const TorsionResult c12 = torsion_form(f12, 1);
  const double p_cl_order = detail::order(c8.closedness_residual, c12.closedness_residual, 8, 12);
  const bool p_closed = p_cl_order >= 1.5;
  const double kt = max_norm(transgression_form(f12, 1));
  const double kt_gap = detail::form_diff(exterior_derivative(c12.form), transgression_form(f12, 1));
  d["closedness"] = {{"residual_res8", c8.closedness_residual},
                     {"residual_res12", c12.closedness_residual},
                     {"observed_order", p_cl_order},
                     {"transgression_max_norm_res12", kt},
                     {"d_form_minus_transgression_res12", kt_gap},
                     {"passed", p_closed}};

  // Stokes: ∫ d(f dg) over Sphere2 with f = e^{0.3y₁+0.5y₃}(1 + y₂), g = y₁ + y₃²
  std::vector<double> stokes;
  for (int res : {16, 32, 64}) {
    auto at = build_base(ManifoldKind::Sphere2, res);
    SampledForm f0(at, 0), g0(at, 0);
    for (int c = 0; c < at->num_charts(); ++c)
      for (std::size_t p = 0; p < at->chart(c).npoints; ++p) {
        const Eigen::VectorXd y = at->ambient(c, p);
        f0.comps[c][p] = std::exp(0.3 * y[0] + 0.5 * y[2]) * (1.0 + y[1]);
        g0.comps[c][p] = y[0] + y[2] * y[2];
      }
    SampledForm w = exterior_derivative(g0);
    for (int c = 0; c < at->num_charts(); ++c)
      for (std::size_t p = 0; p < at->chart(c).npoints; ++p)
        for (int k = 0; k < 2; ++k) w.comps[c][p * 2 + k] *= f0.comps[c][p];
    stokes.push_back(std::abs(integrate_form(exterior_derivative(w))));
  }
  // a level already at rounding counts as converged
  auto shrinks = [](double a, double b) { return b <= 1e-12 || a / b >= 3.0; };
  const bool p_stokes = shrinks(stokes[0], stokes[1]) && shrinks(stokes[1], stokes[2]);
  d["stokes"] = {{"residuals", stokes}, {"ratios", {stokes[0] / stokes[1], stokes[1] / stokes[2]}}, {"passed", p_stokes}};

  // index additivity under ⊕
  auto at2 = build_base(ManifoldKind::Sphere2, 8);
  TubeFunction t1 = tube_from_rigid(presets::standard_quadratic(at2, 2, 1));
  t1.status = TubeStatus::Unverified;
  t1.rigid.reset();
  t1.index = -1;
  const TubeReport r1 = verify_tube_type(t1);
  TubeFunction t2 = tube_from_rigid(presets::bott_rigid(at2));
  TubeFunction sum = oplus(t1, t2);
  const TubeReport rs = verify_tube_type(sum);
  const bool p_index = r1.index == 1 && t2.index == 2 && rs.index == 3 && sum.index == 3;
  d["index_additivity"] = {{"index_f", r1.index}, {"index_q", t2.index}, {"index_sum", rs.index}, {"tag", sum.tag}, {"passed", p_index}};

  r.passed = p_mono && p_add && p_closed && p_stokes && p_index;
  std::string fails;
  for (auto [name, ok] : std::vector<std::pair<const char*, bool>>{
           {"monomial", p_mono}, {"additivity", p_add}, {"closedness", p_closed}, {"stokes", p_stokes}, {"index", p_index}})
    if (!ok) fails += std::string(fails.empty() ? "" : ", ") + name;
  r.summary = fails.empty() ? "all five properties hold" : "failing: " + fails;
  if (!p_closed)
    r.summary += " (closedness residual " + detail::num(c8.closedness_residual) + " → " +
                 detail::num(c12.closedness_residual) + "; tracks the transgression form to " + detail::num(kt_gap) + ")";
  return r;
}

// ---------------------------------------------------------------------------

// Seconds; 0 where only an informal bound is given.
inline double runtime_limit(int id) {
  switch (id) {
    case 1: return 10.0;
    case 5: return 60.0;
    case 10: return 900.0;
    default: return 0.0;
  }
}

inline constexpr const char* kNames[10] = {"FR-torsion oracle equivalence",
                                            "Dilogarithm anchor (circle bundles)",
                                            "Zero-section triviality",
                                            "Stabilization invariance",
                                            "Twisted-stabilization shift (Pontryagin side)",
                                            "Framing assembler algebra",
                                            "Chern–Weil integrality",
                                            "Front extraction",
                                            "Doubling",
                                            "Property battery"};

using Callback = std::function<void(const CriterionResult&)>;

inline std::vector<CriterionResult> run(const Options& o = {}, const Callback& cb = {}) {
  using Fn = CriterionResult (*)(const Options&);
  const std::vector<Fn> all{fr_oracle,    dilog_anchor,    zero_section,     stabilization, twisted_shift,
                            framing_algebra, chern_weil, front_extraction, doubling,      property_battery};
  std::vector<CriterionResult> out;
  for (int i = 0; i < static_cast<int>(all.size()); ++i) {
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), i + 1) == o.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i](o);
    } catch (const Error& e) {
      r.id = i + 1;
      r.name = kNames[i];
      r.passed = false;
      r.summary = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (const double limit = runtime_limit(i + 1); limit > 0.0 && r.seconds > limit) {
      r.passed = false;
      r.summary += "; runtime " + detail::num(r.seconds) + " s exceeds " + detail::num(limit) + " s";
    }
    if (cb) cb(r);
    out.push_back(std::move(r));
  }
  return out;
}

// Timing is left out so identical runs serialize identically.
inline json to_json(const std::vector<CriterionResult>& rs) {
  json j = json::array();
  for (const auto& r : rs)
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"detail", r.detail}});
  return j;
}

} // namespace torsionlab::acceptance
