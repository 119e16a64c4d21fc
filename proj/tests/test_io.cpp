#include <catch_amalgamated.hpp>

#include <random>

#include "torsionlab/acceptance.hpp"
#include "torsionlab/io.hpp"
#include "torsionlab/verify/random_complex.hpp"

using namespace torsionlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("torsionlab-io-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::DomainError;
}

} // namespace

TEST_CASE("complex JSON round trip is exact") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    const BasedComplex c = verify::random_acyclic(rng, 9);
    const io::json j = io::complex_to_json(c);
    const BasedComplex back = io::complex_from_json(io::json::parse(j.dump()));
    REQUIRE(back.ranks() == c.ranks());
    for (std::size_t q = 0; q < c.differentials().size(); ++q) CHECK(back.differentials()[q] == c.differentials()[q]);
    CHECK(fr_torsion(back) == fr_torsion(c));
  }
}

TEST_CASE("hand-written complex documents") {
  const auto j = io::json::parse(R"({"degrees": [1, 1], "differentials": [[[0.0, 2.0]]]})");
  CHECK_THAT(fr_torsion(io::complex_from_json(j)), Catch::Matchers::WithinAbs(0.69314718055994531, 1e-15));
  const auto tagged = io::json::parse(R"({"degrees": [1, 1], "differentials": [[[3.0, 0.0]]], "unit_tag": {"order": 2}})");
  CHECK(io::complex_from_json(tagged).unit_tag().order == 2);

  CHECK(code_of([] { io::complex_from_json(io::json::parse(R"({"degrees": [1, 1]})")); }) == ErrorCode::MalformedComplex);
  CHECK(code_of([] { io::complex_from_json(io::json::parse(R"({"degrees": [1, 2], "differentials": [[[1, 0]]]})")); }) ==
        ErrorCode::MalformedComplex);
  CHECK(code_of([] { io::complex_from_json(io::json::parse(R"({"degrees": [1, 1], "differentials": [[1.0]]})")); }) ==
        ErrorCode::MalformedComplex);
}

TEST_CASE("family manifest and sidecar round trip") {
  const fs::path dir = scratch("family");
  const ChainFamily f = acceptance::families::sphere2_probe3(10);
  io::write_family(dir / "fam.json", f);
  CHECK(fs::exists(dir / "fam.json.bin"));
  const io::json m = io::read_json(dir / "fam.json");
  CHECK(m["schema"] == kSchemaVersion);
  CHECK(m["atlas"]["kind"] == "Sphere2");

  const ChainFamily g = io::read_family(dir / "fam.json");
  CHECK(g.ranks == f.ranks);
  CHECK(g.atlas->resolution() == f.atlas->resolution());
  for (int c = 0; c < f.atlas->num_charts(); ++c)
    for (std::size_t p = 0; p < f.atlas->chart(c).npoints; ++p)
      for (std::size_t q = 0; q < f.at(c, p).size(); ++q) CHECK(g.at(c, p)[q] == f.at(c, p)[q]);

  std::string bin = io::read_text(dir / "fam.json.bin");
  io::write_text(dir / "fam.json.bin", bin + "x");
  CHECK(code_of([&] { io::read_family(dir / "fam.json"); }) == ErrorCode::IoFailure);
  io::write_text(dir / "fam.json.bin", bin.substr(0, bin.size() - 8));
  CHECK(code_of([&] { io::read_family(dir / "fam.json"); }) == ErrorCode::IoFailure);
  fs::remove_all(dir);
}

TEST_CASE("missing and malformed files") {
  CHECK(code_of([] { io::read_json("/nonexistent/torsionlab.json"); }) == ErrorCode::IoFailure);
  const fs::path dir = scratch("bad");
  io::write_text(dir / "x.json", "{not json");
  CHECK(code_of([&] { io::read_json(dir / "x.json"); }) == ErrorCode::IoFailure);
  fs::remove_all(dir);
}

TEST_CASE("reports carry version and schema") {
  const io::json v = io::versioned({{"a", 1}});
  CHECK(v["version"] == kVersionString);
  CHECK(v["schema"] == kSchemaVersion);
  CHECK(v["a"] == 1);

  const Error e(ErrorCode::InvalidRoot, "ζ is not primitive");
  const io::json r = io::error_record(e);
  CHECK(r["error"]["code"] == "InvalidRoot");
  CHECK(r["error"]["module"] == error_module(ErrorCode::InvalidRoot));
  CHECK(r["error"]["message"].get<std::string>().find("primitive") != std::string::npos);
}

TEST_CASE("front tables and Cerf pictures") {
  const GeneratingFunction f = presets::cubic_fold(11);
  FrontDiagram fd = fiberwise_critical_locus(f);
  locate_cusps(f, fd);
  const std::string csv = io::front_csv(fd);
  CHECK(csv.rfind("chart,m0,v0,z,index,margin,sheet\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(fd.sheets.size() + 1));

  const std::string svg = io::cerf_svg(fd);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);

  const GeneratingFunction w = presets::wrinkle(11);
  CHECK(code_of([&] { io::cerf_svg(fiberwise_critical_locus(w)); }) == ErrorCode::UnsupportedKind);
}

TEST_CASE("fmt round-trips doubles") {
  for (double x : {0.1, -2.0 / 3.0, 1e-300, 6.02214076e23}) CHECK(std::stod(io::fmt(x)) == x);
}
