#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "torsionlab/pipeline.hpp"

using namespace torsionlab;

namespace {

struct Flags {
  std::string root;
  std::string config;
};

void add_common(CLI::App* sub, PipelineConfig& cfg, Flags& fl) {
  sub->add_option("--preset", cfg.preset, "named preset");
  sub->add_option("--input", cfg.input, "input file");
  sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
  sub->add_option("--resolution", cfg.resolution, "grid points per chart axis (0 = preset default)");
  sub->add_option("--degree", cfg.degree, "torsion degree k (form degree 2k)");
  sub->add_option("--euler", cfg.euler, "Euler number n of the circle bundle");
  sub->add_option("--root", fl.root, "root of unity e^{2πip/q} as p/q");
  sub->add_option("--sigma", cfg.sigma, "doubling separation");
  sub->add_option("--action", cfg.action, "tube: verify|stabilize|stable-bundle; front: extract|classify|lift|double");
  sub->add_option("--save-family", cfg.save_family, "write the sampled family manifest here");
  sub->add_flag("--emit-plots", cfg.emit_plots, "write CSV/SVG alongside the JSON report");
  sub->add_option("--threads", cfg.threads, "worker threads (default: TORSIONLAB_THREADS or all cores)");
  sub->add_option("--seed", cfg.seed, "seed for randomized inputs");
  sub->add_option("--config", fl.config, "JSON config file; flags override it");
}

std::vector<std::string> given_flags(const CLI::App* sub) {
  std::vector<std::string> out;
  for (const CLI::Option* o : sub->get_options())
    if (o->count() > 0) {
      std::string n = o->get_name();
      while (!n.empty() && n.front() == '-') n.erase(n.begin());
      out.push_back(n);
    }
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher torsion of chain-complex families, characteristic classes and generating-function fronts"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);
  PipelineConfig cfg;
  Flags fl;
  const std::vector<std::pair<const char*, const char*>> subs{
      {"fr", "Franz–Reidemeister torsion of a based complex (JSON)"},
      {"family-torsion", "torsion form of a family file or named family"},
      {"circle-bundle", "degree-1 torsion integral of a circle-bundle family"},
      {"charclass", "zeta, dilogarithm and Chern/Pontryagin integrals on presets"},
      {"tube", "tube-type verification, stabilization and stable bundles"},
      {"front", "fiberwise critical locus, cusps, Legendrian lift, doubling"},
      {"suite", "run the acceptance battery and emit a pass/fail matrix"}};
  std::vector<CLI::App*> apps;
  for (auto [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, cfg, fl);
    if (std::string(name) == "suite") s->add_option("--criteria", cfg.criteria, "subset of criterion ids");
    apps.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = nullptr;
  for (CLI::App* s : apps)
    if (s->parsed()) sub = s;
  cfg.subcommand = sub->get_name();

  try {
    if (!fl.config.empty()) apply_config_file(cfg, io::read_json(fl.config), given_flags(sub));
    if (!fl.root.empty()) std::tie(cfg.root_p, cfg.root_q) = parse_root(fl.root);
    auto progress = [](const acceptance::CriterionResult& r) {
      std::printf("[%s] %2d %-46s %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.summary.c_str());
      std::fflush(stdout);
    };
    const PipelineResult r = run_pipeline(cfg, progress);
    for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
    return r.exit_code;
  } catch (const Error& e) {
    const nlohmann::json rec = io::error_record(e);
    std::cerr << rec.dump() << "\n";
    try {
      io::write_json(cfg.out / (cfg.subcommand + ".error.json"), rec);
    } catch (const Error&) {
    }
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":{\"code\":\"IoFailure\",\"message\":" << nlohmann::json(e.what()).dump() << "}}\n";
    return 4;
  }
}
