#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acceptance.hpp"
#include "charclass.hpp"
#include "famtor.hpp"
#include "genfront.hpp"
#include "io.hpp"
#include "tubefun.hpp"

namespace torsionlab {

using json = nlohmann::json;

struct PipelineConfig {
  std::string subcommand;
  std::string preset;
  std::string action; // tube: verify | stabilize | stable-bundle; front: extract | classify | lift | double
  std::filesystem::path input;
  std::filesystem::path out = "out";
  std::filesystem::path save_family;
  int resolution = 0; // 0 → preset default
  int degree = 1;
  int euler = 3;
  int root_p = 1, root_q = 3;
  double sigma = 1.0;
  bool emit_plots = false;
  std::uint64_t seed = 20240611;
  int threads = 0;
  std::vector<int> criteria; // suite subset
};

struct PipelineResult {
  json report;
  std::vector<std::filesystem::path> files;
  int exit_code = 0;
};

inline int exit_code_for(const Error& e) {
  switch (error_class(e.code())) {
    case ErrorClass::Validation: return 2;
    case ErrorClass::Numerical: return 3;
    case ErrorClass::Io: return 4;
  }
  return 2;
}

// "p/q" → (p, q)
inline std::pair<int, int> parse_root(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument("no slash");
    std::size_t a = 0, b = 0;
    const int p = std::stoi(s.substr(0, slash), &a);
    const int q = std::stoi(s.substr(slash + 1), &b);
    if (a != slash || b != s.size() - slash - 1) throw std::invalid_argument("trailing characters");
    return {p, q};
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidConfig, "--root expects p/q, got '" + s + "'");
  }
}

// Config file keys mirror the long flag names; flags given on the command line win.
inline void apply_config_file(PipelineConfig& cfg, const json& j, const std::vector<std::string>& given) {
  auto set = [&](const char* key, auto& field) {
    if (!j.contains(key) || std::find(given.begin(), given.end(), key) != given.end()) return;
    try {
      field = j[key].get<std::decay_t<decltype(field)>>();
    } catch (const json::exception&) {
      fail(ErrorCode::InvalidConfig, std::string("config key '") + key + "' has the wrong type");
    }
  };
  set("preset", cfg.preset);
  set("action", cfg.action);
  set("resolution", cfg.resolution);
  set("degree", cfg.degree);
  set("euler", cfg.euler);
  set("sigma", cfg.sigma);
  set("emit-plots", cfg.emit_plots);
  set("seed", cfg.seed);
  set("threads", cfg.threads);
  if (j.contains("root") && std::find(given.begin(), given.end(), "root") == given.end())
    std::tie(cfg.root_p, cfg.root_q) = parse_root(j["root"].get<std::string>());
  if (j.contains("input") && std::find(given.begin(), given.end(), "input") == given.end())
    cfg.input = j["input"].get<std::string>();
  if (j.contains("out") && std::find(given.begin(), given.end(), "out") == given.end()) cfg.out = j["out"].get<std::string>();
}

namespace pipeline {

inline int res_or(const PipelineConfig& c, int dflt) { return c.resolution > 0 ? c.resolution : dflt; }

inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::InvalidConfig, msg);
}

inline void emit(PipelineResult& r, const PipelineConfig& c, const std::string& name, const std::string& text) {
  const auto p = c.out / name;
  io::write_text(p, text);
  r.files.push_back(p);
}

inline ChainFamily family_preset(const PipelineConfig& c) {
  const std::string& p = c.preset;
  if (p == "sphere2-probe") return acceptance::families::sphere2_probe(res_or(c, 16));
  if (p == "sphere2-probe3") return acceptance::families::sphere2_probe3(res_or(c, 16));
  if (p == "sphere4-probe") return acceptance::families::sphere4_probe(res_or(c, 8));
  if (p == "circle-bundle") return circle_bundle_family(c.euler, c.root_p, c.root_q, res_or(c, 64));
  if (p == "circle-bundle-twisted") return circle_bundle_family_twisted(c.euler, c.root_p, c.root_q, res_or(c, 64));
  if (p == "zero-section-s2" || p == "zero-section-s4") {
    std::mt19937_64 rng(c.seed);
    const auto kind = p.back() == '2' ? ManifoldKind::Sphere2 : ManifoldKind::Sphere4;
    return zero_section_family(build_base(kind, res_or(c, kind == ManifoldKind::Sphere2 ? 16 : 8)), verify::random_acyclic(rng, 8));
  }
  fail(ErrorCode::InvalidConfig, "unknown family preset '" + p + "'");
}

inline PipelineResult run_fr(const PipelineConfig& c) {
  require(!c.input.empty(), "fr needs --input");
  const BasedComplex cx = io::complex_from_json(io::read_json(c.input));
  const auto cert = is_acyclic(cx);
  const TorsionValue tv = fr_torsion_value(cx);
  PipelineResult r;
  r.report = {{"subcommand", "fr"},
              {"input", c.input.filename().string()},
              {"log_abs_torsion", tv.log_abs},
              {"phase", io::to_json(tv.phase)},
              {"min_singular", cert.min_singular},
              {"laplacian_oracle", verify::laplacian_torsion(cx)}};
  return r;
}

inline PipelineResult run_family_torsion(const PipelineConfig& c) {
  require(c.degree >= 0, "--degree must be non-negative");
  ChainFamily f = !c.input.empty() ? io::read_family(c.input) : family_preset(c);
  PipelineResult r;
  if (!c.save_family.empty()) {
    io::write_family(c.save_family, f);
    r.files.push_back(c.save_family);
  }
  const TorsionResult t = torsion_form(f, c.degree);
  r.report = io::torsion_report(t);
  r.report["subcommand"] = "family-torsion";
  r.report["family"] = !c.input.empty() ? c.input.filename().string() : c.preset;
  r.report["provenance"] = f.provenance;
  if (c.emit_plots) emit(r, c, "family-torsion-form.csv", io::form_csv(t.form));
  return r;
}

inline PipelineResult run_circle_bundle(const PipelineConfig& c) {
  const bool twisted = c.preset == "twisted";
  require(c.preset.empty() || twisted, "circle-bundle presets: twisted");
  const ChainFamily f = twisted ? circle_bundle_family_twisted(c.euler, c.root_p, c.root_q, res_or(c, 64))
                                : circle_bundle_family(c.euler, c.root_p, c.root_q, res_or(c, 64));
  const TorsionResult t = torsion_form(f, 1);
  const double im = dilog(std::polar(1.0, 2.0 * kPi * c.root_p / c.root_q)).imag();
  PipelineResult r;
  r.report = io::torsion_report(t);
  r.report["subcommand"] = "circle-bundle";
  r.report["euler"] = c.euler;
  r.report["root"] = std::to_string(c.root_p) + "/" + std::to_string(c.root_q);
  r.report["model"] = twisted ? "geometric" : "figure-eight";
  r.report["n_im_dilog"] = c.euler * im;
  r.report["ratio_to_calibration"] = std::abs(c.euler * im) > 0 ? json(*t.integral / (c.euler * im)) : json(nullptr);
  if (c.emit_plots) emit(r, c, "circle-bundle-form.csv", io::form_csv(t.form));
  return r;
}

inline PipelineResult run_charclass(const PipelineConfig& c) {
  PipelineResult r;
  const cplx w = dilog(std::polar(1.0, 2.0 * kPi / 3.0));
  r.report = {{"subcommand", "charclass"},
              {"zeta3", zeta(3.0)},
              {"zeta5", zeta(5.0)},
              {"dilog_omega", io::to_json(w)}};
  const std::string p = c.preset.empty() ? "bott" : c.preset;
  BundleProjector b;
  if (p == "bott") {
    b = presets::bott_projector(build_base(ManifoldKind::Sphere2, res_or(c, 64)));
  } else if (p == "clifford") {
    b = presets::clifford_projector(build_base(ManifoldKind::Sphere4, res_or(c, 16)));
  } else if (p == "clifford-stable") {
    b = stable_bundle(*presets::clifford_rigid(build_base(ManifoldKind::Sphere4, res_or(c, 16))));
    b.complexified_real = true;
    b.complexification_factor = 2;
  } else {
    fail(ErrorCode::InvalidConfig, "unknown charclass preset '" + p + "'");
  }
  const int k = b.atlas->dim() / 2;
  const SampledForm ch = chern_character_form(b, k);
  r.report["preset"] = p;
  r.report["resolution"] = b.atlas->resolution();
  r.report["rank"] = b.rank;
  r.report["ch_degree"] = 2 * k;
  r.report["ch_integral"] = integrate_form(ch);
  if (2 < b.atlas->dim()) r.report["ch1_closedness"] = max_norm(exterior_derivative(chern_character_form(b, 1)));
  if (b.complexified_real && k % 2 == 0) {
    r.report["pontryagin_integral"] = integrate_form(pontryagin_character(b, k / 2));
    r.report["complexification_factor"] = b.complexification_factor;
  }
  if (c.emit_plots) emit(r, c, "charclass-ch.csv", io::form_csv(ch));
  return r;
}

inline json tube_json(const TubeReport& t) {
  return {{"condition1", t.condition1},
          {"condition2", t.condition2},
          {"condition3", t.condition3},
          {"status", status_name(t.status)},
          {"index", t.index},
          {"min_band_gradient", std::isfinite(t.min_band_gradient) ? json(t.min_band_gradient) : json(nullptr)},
          {"band_samples", t.band_samples},
          {"quadratic_fit_residual", std::isfinite(t.quadratic_fit_residual) ? json(t.quadratic_fit_residual) : json(nullptr)}};
}

inline TubeFunction tube_preset(const PipelineConfig& c) {
  const std::string p = c.preset.empty() ? "standard" : c.preset;
  if (p == "standard") {
    TubeFunction t = tube_from_rigid(presets::standard_quadratic(build_base(ManifoldKind::Sphere2, res_or(c, 8)), 2, 2));
    return t;
  }
  if (p == "bott") return tube_from_rigid(presets::bott_rigid(build_base(ManifoldKind::Sphere2, res_or(c, 32))));
  if (p == "clifford") return tube_from_rigid(presets::clifford_rigid(build_base(ManifoldKind::Sphere4, res_or(c, 16))));
  if (p == "mobius") return tube_from_rigid(presets::mobius(build_base(ManifoldKind::Circle, res_or(c, 64))));
  if (p == "height") return presets::homogenized_height(build_base(ManifoldKind::Sphere2, res_or(c, 8)), 3);
  fail(ErrorCode::InvalidConfig, "unknown tube preset '" + p + "'");
}

inline PipelineResult run_tube(const PipelineConfig& c) {
  const std::string action = c.action.empty() ? "verify" : c.action;
  TubeFunction f = tube_preset(c);
  PipelineResult r;
  r.report = {{"subcommand", "tube"}, {"preset", c.preset.empty() ? "standard" : c.preset}, {"action", action}, {"N", f.N}};
  if (action == "verify") {
    r.report["verification"] = tube_json(verify_tube_type(f));
  } else if (action == "stabilize") {
    TubeFunction s = oplus(f, tube_from_rigid(presets::standard_quadratic(f.atlas, 1, 1)));
    r.report["tag"] = s.tag;
    r.report["verification"] = tube_json(verify_tube_type(s));
  } else if (action == "stable-bundle") {
    require(static_cast<bool>(f.rigid), "stable-bundle needs a rigid preset");
    const BundleProjector b = stable_bundle(*f.rigid);
    r.report["rank"] = b.rank;
    r.report["complexified_real"] = b.complexified_real;
    if (f.atlas->dim() % 2 == 0 && b.rank > 0) {
      const int k = f.atlas->dim() / 2;
      r.report["ch_degree"] = 2 * k;
      r.report["ch_integral"] = integrate_form(chern_character_form(b, k));
    }
    if (!f.atlas->loop_generators().empty()) {
      const auto o = check_orientable(*f.rigid);
      r.report["orientable"] = o.orientable;
      r.report["holonomy"] = o.holonomy;
    }
  } else {
    fail(ErrorCode::InvalidConfig, "unknown tube action '" + action + "'");
  }
  return r;
}

inline GeneratingFunction front_preset(const PipelineConfig& c) {
  const std::string p = c.preset.empty() ? "cubic-fold" : c.preset;
  if (p == "cubic-fold") return presets::cubic_fold(res_or(c, 201));
  if (p == "wrinkle") return presets::wrinkle(res_or(c, 41));
  if (p == "zero-section") return presets::zero_section(build_base(ManifoldKind::Interval, res_or(c, 21)), 1, 1);
  fail(ErrorCode::InvalidConfig, "unknown front preset '" + p + "'");
}

inline PipelineResult run_front(const PipelineConfig& c) {
  const std::string action = c.action.empty() ? "extract" : c.action;
  GeneratingFunction f = front_preset(c);
  if (action == "double") f = double_gf(f, c.sigma);
  FrontDiagram fd = fiberwise_critical_locus(f);
  locate_cusps(f, fd);
  PipelineResult r;
  r.report = {{"subcommand", "front"}, {"preset", f.name}, {"action", action}, {"sheets", fd.num_sheets},
              {"samples", fd.sheets.size()}};
  json cusps = json::array();
  for (const CuspPoint& cp : fd.cusps) {
    json m = json::array();
    for (int a = 0; a < fd.atlas->dim(); ++a) m.push_back(cp.m[a]);
    cusps.push_back({{"m", m}, {"z", cp.z}, {"index", cp.index}, {"co_orientation", cp.co_orientation}});
  }
  r.report["cusps"] = cusps;
  if (action == "classify") {
    std::map<std::string, int> counts;
    for (const SheetPoint& s : fd.sheets) counts[singularity_name(classify_moderate(f, s).kind)]++;
    for (const CuspPoint& cp : fd.cusps) counts[singularity_name(classify_moderate(f, cp.chart, cp.m, cp.v).kind)]++;
    r.report["classification"] = counts;
  } else if (action == "lift") {
    const LegendrianLift L = legendrian_lift(fd);
    r.report["lift"] = {{"samples", L.samples.size()}, {"embedded", L.embedded}, {"coincidences", L.coincidences}};
  } else if (action == "double") {
    r.report["sigma"] = c.sigma;
    if (f.shape) {
      const AdmissibleReport a = check_admissible(f);
      r.report["admissible"] = a.admissible;
      r.report["compact_support"] = a.compact_support;
    }
  } else if (action != "extract") {
    fail(ErrorCode::InvalidConfig, "unknown front action '" + action + "'");
  }
  emit(r, c, "front.csv", io::front_csv(fd));
  if (c.emit_plots && fd.atlas->dim() == 1) emit(r, c, "front-cerf.svg", io::cerf_svg(fd));
  return r;
}

inline PipelineResult run_suite(const PipelineConfig& c, const acceptance::Callback& cb) {
  acceptance::Options o;
  o.seed = c.seed;
  o.only = c.criteria;
  const auto rs = acceptance::run(o, cb);
  PipelineResult r;
  r.report = {{"subcommand", "suite"}, {"criteria", acceptance::to_json(rs)}};
  bool all = true;
  for (const auto& x : rs) all = all && x.passed;
  r.report["all_passed"] = all;
  r.exit_code = all ? 0 : 1;
  return r;
}

} // namespace pipeline

// Runs one subcommand and writes <out>/<subcommand>.json. Errors propagate as Error.
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const acceptance::Callback& suite_cb = {}) {
  if (cfg.threads < 0) fail(ErrorCode::InvalidConfig, "--threads must be ≥ 0");
  if (cfg.threads > 0) set_threads(cfg.threads);
  if (cfg.resolution < 0) fail(ErrorCode::InvalidConfig, "--resolution must be positive");
  PipelineResult r;
  const std::string& s = cfg.subcommand;
  if (s == "fr") r = pipeline::run_fr(cfg);
  else if (s == "family-torsion") r = pipeline::run_family_torsion(cfg);
  else if (s == "circle-bundle") r = pipeline::run_circle_bundle(cfg);
  else if (s == "charclass") r = pipeline::run_charclass(cfg);
  else if (s == "tube") r = pipeline::run_tube(cfg);
  else if (s == "front") r = pipeline::run_front(cfg);
  else if (s == "suite") r = pipeline::run_suite(cfg, suite_cb);
  else fail(ErrorCode::InvalidConfig, "unknown subcommand '" + s + "'");
  const auto path = cfg.out / (s + ".json");
  io::write_json(path, io::versioned(r.report));
  r.files.insert(r.files.begin(), path);
  return r;
}

} // namespace torsionlab
