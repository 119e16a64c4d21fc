#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "basegrid.hpp"
#include "chainkit.hpp"
#include "constants.hpp"
#include "error.hpp"
#include "famtor.hpp"
#include "genfront.hpp"

namespace torsionlab::io {

using json = nlohmann::json;

inline json versioned(json body) {
  body["version"] = kVersionString;
  body["schema"] = kSchemaVersion;
  return body;
}

// ---------------------------------------------------------------------------
// Based complexes

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(ErrorCode::MalformedComplex, "complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_to_json(const BasedComplex& c) {
  json j;
  j["degrees"] = c.ranks();
  json ds = json::array();
  for (const Mat& d : c.differentials()) {
    json flat = json::array();
    for (Eigen::Index r = 0; r < d.rows(); ++r)
      for (Eigen::Index s = 0; s < d.cols(); ++s) flat.push_back(to_json(d(r, s)));
    ds.push_back(flat);
  }
  j["differentials"] = ds;
  j["filtration"] = c.filtration();
  if (c.unit_tag().order == 0)
    j["unit_tag"] = nullptr;
  else
    j["unit_tag"] = {{"order", c.unit_tag().order}, {"numerator", c.unit_tag().numerator}};
  return j;
}

// differentials[q−1] holds d_q row-major as [[re, im], ...] of shape r_{q−1} × r_q.
inline BasedComplex complex_from_json(const json& j) {
  try {
    const auto ranks = j.at("degrees").get<std::vector<int>>();
    const json& ds = j.at("differentials");
    if (!ds.is_array() || ds.size() + 1 != ranks.size())
      fail(ErrorCode::MalformedComplex, "expected one differential per adjacent degree pair");
    std::vector<Mat> d;
    for (std::size_t q = 1; q < ranks.size(); ++q) {
      const json& flat = ds[q - 1];
      const int rows = ranks[q - 1], cols = ranks[q];
      if (!flat.is_array() || flat.size() != static_cast<std::size_t>(rows) * cols)
        fail(ErrorCode::MalformedComplex, "differential " + std::to_string(q) + " has the wrong entry count");
      Mat m(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int s = 0; s < cols; ++s) m(r, s) = cplx_from_json(flat[r * cols + s]);
      d.push_back(std::move(m));
    }
    std::vector<double> filt;
    if (j.contains("filtration") && !j["filtration"].is_null()) filt = j["filtration"].get<std::vector<double>>();
    UnitTag tag;
    if (j.contains("unit_tag") && !j["unit_tag"].is_null()) {
      tag.order = j["unit_tag"].at("order").get<int>();
      tag.numerator = j["unit_tag"].value("numerator", 1);
    }
    return BasedComplex(ranks, d, filt, tag);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedComplex, std::string("complex JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const std::filesystem::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::IoFailure, p.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot write " + p.string());
  out << s;
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + p.string());
}

inline void write_json(const std::filesystem::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Binary sidecar: little-endian f64 pairs.

inline void put_f64(std::string& buf, double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  char b[8];
  std::memcpy(b, &u, 8);
  buf.append(b, 8);
}

inline double get_f64(const std::string& buf, std::size_t& pos) {
  if (pos + 8 > buf.size()) fail(ErrorCode::IoFailure, "sidecar truncated");
  std::uint64_t u;
  std::memcpy(&u, buf.data() + pos, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  pos += 8;
  double x;
  std::memcpy(&x, &u, 8);
  return x;
}

inline json atlas_descriptor(const BaseAtlas& at) {
  json j{{"kind", kind_name(at.kind())}, {"resolution", at.resolution()}, {"dim", at.dim()}};
  if (!is_closed(at.kind())) j["bounds"] = {at.bounds_lo()[0], at.bounds_hi()[0]};
  return j;
}

inline AtlasPtr atlas_from_descriptor(const json& j) {
  const auto kind = kind_from_name(j.at("kind").get<std::string>());
  if (!kind) fail(ErrorCode::UnsupportedKind, "unknown manifold kind " + j.at("kind").get<std::string>());
  std::optional<std::pair<double, double>> bounds;
  if (j.contains("bounds")) bounds = std::make_pair(j["bounds"][0].get<double>(), j["bounds"][1].get<double>());
  return build_base(*kind, j.at("resolution").get<int>(), bounds);
}

// Manifest + sidecar. Layout: chart-major, then point, then d_1, d_2, …, each row-major.
inline void write_family(const std::filesystem::path& manifest, const ChainFamily& f) {
  std::string buf;
  for (const auto& chart : f.samples)
    for (const auto& d : chart)
      for (const Mat& m : d)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index s = 0; s < m.cols(); ++s) {
            put_f64(buf, m(r, s).real());
            put_f64(buf, m(r, s).imag());
          }
  const std::filesystem::path side = manifest.filename().string() + ".bin";
  json j{{"atlas", atlas_descriptor(*f.atlas)},
         {"degrees", f.ranks},
         {"provenance", f.provenance},
         {"sidecar", side.string()},
         {"layout", "chart, point, degree q = 1.., row-major [re, im] little-endian f64"}};
  j["unit_tag"] = f.unit_tag.order ? json{{"order", f.unit_tag.order}, {"numerator", f.unit_tag.numerator}} : json(nullptr);
  write_json(manifest, versioned(j));
  write_text(manifest.parent_path() / side, buf);
}

inline ChainFamily read_family(const std::filesystem::path& manifest) {
  const json j = read_json(manifest);
  try {
    ChainFamily f;
    f.atlas = atlas_from_descriptor(j.at("atlas"));
    f.ranks = j.at("degrees").get<std::vector<int>>();
    f.provenance = j.value("provenance", "Sampled");
    if (j.contains("unit_tag") && !j["unit_tag"].is_null())
      f.unit_tag = UnitTag{j["unit_tag"].at("order").get<int>(), j["unit_tag"].value("numerator", 1)};
    const std::string buf = read_text(manifest.parent_path() / j.at("sidecar").get<std::string>());
    std::size_t pos = 0;
    for (int c = 0; c < f.atlas->num_charts(); ++c) {
      std::vector<Differentials> pts(f.atlas->chart(c).npoints);
      for (auto& d : pts)
        for (std::size_t q = 1; q < f.ranks.size(); ++q) {
          Mat m(f.ranks[q - 1], f.ranks[q]);
          for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index s = 0; s < m.cols(); ++s) {
              const double re = get_f64(buf, pos);
              m(r, s) = cplx(re, get_f64(buf, pos));
            }
          d.push_back(std::move(m));
        }
      f.samples.push_back(std::move(pts));
    }
    if (pos != buf.size()) fail(ErrorCode::IoFailure, "sidecar has trailing data");
    return f;
  } catch (const json::exception& e) {
    fail(ErrorCode::IoFailure, std::string("family manifest: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports and tables

inline json torsion_report(const TorsionResult& r) {
  json j{{"degree", r.degree},
         {"closedness_residual", r.closedness_residual},
         {"resolution", r.resolution},
         {"lambda_nodes", r.lambda_nodes},
         {"imaginary_residual", r.imaginary_residual},
         {"min_singular", r.min_singular},
         {"atlas", atlas_descriptor(*r.form.atlas)}};
  j["integral"] = r.integral ? json(*r.integral) : json(nullptr);
  json n{{"c0", r.normalization.c0}, {"rule", r.normalization.rule}};
  n["kappa"] = r.normalization.kappa ? json(*r.normalization.kappa) : json(nullptr);
  j["normalization"] = n;
  return j;
}

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

inline std::string form_csv(const SampledForm& w) {
  std::ostringstream s;
  write_form_csv(s, w);
  return s.str();
}

inline std::string front_csv(const FrontDiagram& fd) {
  std::ostringstream s;
  const int d = fd.atlas->dim();
  s << "chart";
  for (int a = 0; a < d; ++a) s << ",m" << a;
  for (int i = 0; i < fd.N; ++i) s << ",v" << i;
  s << ",z,index,margin,sheet\n";
  for (const SheetPoint& p : fd.sheets) {
    s << p.chart;
    for (int a = 0; a < d; ++a) s << ',' << fmt(p.m[a]);
    for (int i = 0; i < fd.N; ++i) s << ',' << fmt(p.v[i]);
    s << ',' << fmt(p.z) << ',' << p.index << ',' << fmt(p.margin) << ',' << p.sheet << '\n';
  }
  return s.str();
}

// Cerf diagram (m, z) for one-dimensional bases; one polyline per sheet, cusps as dots.
inline std::string cerf_svg(const FrontDiagram& fd) {
  if (fd.atlas->dim() != 1) fail(ErrorCode::UnsupportedKind, "Cerf SVG needs a one-dimensional base");
  double x0 = fd.atlas->bounds_lo()[0], x1 = fd.atlas->bounds_hi()[0];
  double z0 = 0.0, z1 = 0.0;
  for (const SheetPoint& p : fd.sheets) {
    z0 = std::min(z0, p.z);
    z1 = std::max(z1, p.z);
  }
  if (z1 - z0 < 1e-12) {
    z0 -= 1.0;
    z1 += 1.0;
  }
  const double W = 640, H = 400, pad = 30;
  auto X = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
  auto Y = [&](double z) { return H - pad - (z - z0) / (z1 - z0) * (H - 2 * pad); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream s;
  s << std::fixed << std::setprecision(3);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << pad << "\" y1=\"" << Y(0) << "\" x2=\"" << W - pad << "\" y2=\"" << Y(0)
    << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
  std::map<int, std::vector<const SheetPoint*>> sheets;
  for (const SheetPoint& p : fd.sheets) sheets[p.sheet].push_back(&p);
  for (const auto& [id, pts] : sheets) {
    s << "<polyline fill=\"none\" stroke=\"" << colors[id % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (const SheetPoint* p : pts) s << X(p->m[0]) << ',' << Y(p->z) << ' ';
    s << "\"/>\n";
  }
  for (const CuspPoint& c : fd.cusps) s << "<circle cx=\"" << X(c.m[0]) << "\" cy=\"" << Y(c.z) << "\" r=\"3\" fill=\"black\"/>\n";
  s << "</svg>\n";
  return s.str();
}

inline json error_record(const Error& e) {
  return versioned(json{{"error", {{"code", error_name(e.code())}, {"module", error_module(e.code())}, {"message", e.what()}}}});
}

} // namespace torsionlab::io
