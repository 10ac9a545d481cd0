#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "mapper/manifest.hpp"
#include "mapper/mapper.hpp"
#include "mapper/rspace.hpp"
#include "mapper/synth.hpp"

using namespace mapper;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = MAPPER_CLI_PATH;
const std::string kData = MAPPER_DATA_DIR;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string data(const std::string& name) { return kData + "/" + name; }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("mapper_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("exit codes") {
  TempDir tmp;
  spit(tmp / "bad.json", "{\"critical\": [0, 1");
  CHECK(run("reeb " + tmp / "bad.json").code == 2);
  CHECK(run("reeb " + tmp / "missing.json").code == 2);
  CHECK(run("sample " + data("annulus_complex.json") + " -n 0 --sigma 0.1").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("--version").code == 0);

  // Well-formed JSON with inconsistent content is a domain failure.
  spit(tmp / "broken.json", R"({"critical":[1,0],"strata":[[],[],[]],"points":[[],[]],"left":[{},{}],"right":[{},{}]})");
  CHECK(run("validate " + tmp / "broken.json").code == 1);
  CHECK(run("mapper-functor " + tmp / "broken.json " + data("torus_cover.json")).code == 1);

  for (const auto* name : {"torus_rgraph.json", "torus_cover.json", "interval_rgraph.json", "point_a.json",
                           "branching_complex.json", "seven_cover.json", "annulus_plan.toml"}) {
    CAPTURE(name);
    CHECK(run("validate " + data(name)).code == 0);
  }
}

TEST_CASE("reeb subcommand") {
  TempDir tmp;
  const auto torus = run("reeb " + data("torus_rgraph.json") + " --dot " + tmp / "t.dot");
  REQUIRE(torus.code == 0);
  const RGraph R = rgraph_from_json(json::parse(torus.out));
  CHECK(R.critical.size() == 4);
  CHECK(betti(R).b1 == 1);
  CHECK(to_json(R).dump(2) + "\n" == torus.out);
  CHECK(slurp(tmp.path / "t.dot").find("graph") != std::string::npos);

  const auto interval = run("reeb " + data("interval_rgraph.json"));
  REQUIRE(interval.code == 0);
  const RGraph I = rgraph_from_json(json::parse(interval.out));
  CHECK(I.vertex_count() == 2);
  CHECK(I.edge_count() == 1);

  // A geometric complex is accepted directly.
  const auto branching = run("reeb " + data("branching_complex.json"));
  REQUIRE(branching.code == 0);
  CHECK(betti(rgraph_from_json(json::parse(branching.out))).b1 == 1);
}

TEST_CASE("mapper functor subcommand") {
  const auto r = run("mapper-functor " + data("torus_rgraph.json") + " " + data("torus_cover.json"));
  REQUIRE(r.code == 0);
  const auto M = cosheaf_from_json(json::parse(r.out));
  CHECK(to_json(M).dump(2) + "\n" == r.out);
  CHECK(M.critical == std::vector<double>{-0.5, 1.4, 1.6, 3.5});
  CHECK(costalk(M, 1.5).size() == 2);

  TempDir tmp;
  spit(tmp / "short.json", R"({"cover":[[0.5, 4]]})");
  CHECK(run("mapper-functor " + data("torus_rgraph.json") + " " + tmp / "short.json").code == 1);
  const auto extended = run("mapper-functor " + data("torus_rgraph.json") + " " + tmp / "short.json --auto-extend");
  CHECK(extended.code == 0);
  CHECK(costalk(cosheaf_from_json(json::parse(extended.out)), 0.2).size() == 1);
}

TEST_CASE("enhanced mapper golden graph") {
  const auto r = run("enhanced-mapper --space " + data("branching_complex.json") + " --cover " + data("seven_cover.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out == slurp(data("branching_enhanced_golden.json")));
  const auto G = enhanced_from_json(json::parse(r.out));
  CHECK(to_json(G).dump(2) + "\n" == r.out);
  CHECK(betti(G.graph).b1 == 1);

  // The golden graph agrees with the component count of every fiber over the
  // cover elements and their overlaps.
  const auto X = complex_from_json(json::parse(slurp(data("branching_complex.json"))));
  const auto U = cover_from_json(json::parse(slurp(data("seven_cover.json"))));
  const auto M = mapper_functor(true_reeb_cosheaf(X), U);
  for (const auto& V : intersection_closure(U)) {
    CAPTURE(V.lo);
    CAPTURE(V.hi);
    CHECK(evaluate(M, V).size() == fiber_components(X, V).size());
  }

  // Dense samples through the density path recover the same graph.
  TempDir tmp;
  REQUIRE(run("sample " + data("branching_complex.json") + " -n 20000 --sigma 0.01 --seed 3 -o " + tmp / "p.csv").code == 0);
  const auto pts = run("enhanced-mapper --points " + tmp / "p.csv --cover " + data("seven_cover.json"));
  REQUIRE(pts.code == 0);
  CHECK(rgraph_isomorphic(enhanced_from_json(json::parse(pts.out)).graph, G.graph));
}

TEST_CASE("enhanced mapper input rules") {
  const std::string space = "--space " + data("torus_rgraph.json");
  CHECK(run("enhanced-mapper --cover " + data("torus_cover.json")).code == 2);
  CHECK(run("enhanced-mapper " + space + " --points x.csv --cover " + data("torus_cover.json")).code == 2);
  TempDir tmp;
  spit(tmp / "short.json", R"({"cover":[[-0.5, 1.6], [1.4, 2.5]]})");
  CHECK(run("enhanced-mapper " + space + " --cover " + tmp / "short.json").code == 1);
  CHECK(run("enhanced-mapper " + space + " --cover " + tmp / "short.json --auto-extend").code == 0);

  const auto dot = run("enhanced-mapper " + space + " --cover " + data("torus_cover.json") + " --dot " + tmp / "g.dot");
  REQUIRE(dot.code == 0);
  const std::string text = slurp(tmp.path / "g.dot");
  CHECK(text.find("value=") != std::string::npos);
  CHECK(text.find("span=") != std::string::npos);
}

TEST_CASE("classic mapper subcommand") {
  const std::string args = "--space " + data("torus_rgraph.json") + " --cover " + data("torus_cover.json");
  const auto nerve = run("classic-mapper " + args);
  REQUIRE(nerve.code == 0);
  CHECK(json::parse(nerve.out)["nodes"].size() == 2);
  CHECK(json::parse(nerve.out)["edges"].size() == 1);
  const auto multi = run("classic-mapper --multinerve " + args);
  REQUIRE(multi.code == 0);
  CHECK(json::parse(multi.out)["edges"].size() == 2);
  const auto geo = run("classic-mapper --geometric " + args);
  REQUIRE(geo.code == 0);
  CHECK(enhanced_from_json(json::parse(geo.out)).graph.edge_count() == 2);
  CHECK(run("classic-mapper --geometric --multinerve " + args).code == 2);
}

TEST_CASE("distance subcommand") {
  const std::string pair = data("point_a.json") + " " + data("point_b.json");
  const auto exact = run("distance " + pair);
  REQUIRE(exact.code == 0);
  const json j = json::parse(exact.out);
  CHECK(j["epsilon"].get<double>() == doctest::Approx(0.75).epsilon(1e-9));
  CHECK_FALSE(j["budget_exceeded"].get<bool>());
  CHECK_FALSE(j.contains("witness"));

  const auto bound = run("distance --bound --witness " + pair);
  REQUIRE(bound.code == 0);
  const json b = json::parse(bound.out);
  CHECK(b["epsilon"].get<double>() >= j["epsilon"].get<double>() - 1e-9);
  CHECK(b.contains("witness"));
  CHECK(run("distance --bound --exact " + pair).code == 2);

  const auto self = run("distance " + data("torus_rgraph.json") + " " + data("torus_rgraph.json"));
  REQUIRE(self.code == 0);
  CHECK(json::parse(self.out)["epsilon"].get<double>() == 0.0);
}

TEST_CASE("sample subcommand and point input") {
  TempDir tmp;
  const std::string args = "sample " + data("annulus_complex.json") + " -n 400 --sigma 0.05 --seed 5";
  const auto a = run(args);
  REQUIRE(a.code == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 400);
  CHECK(run(args).out == a.out);
  CHECK(run(args, "MAPPER_SEED=6").out != a.out);
  CHECK(run("sample " + data("annulus_complex.json") + " -n 400 --sigma 0.05 --seed 6").out ==
        run(args, "MAPPER_SEED=6").out);
  CHECK(run(args, "MAPPER_SEED=abc").code == 2);

  // Header row, comments and blank lines are skipped.
  spit(tmp / "h.csv", "x,y\n# comment\n\n" + a.out);
  spit(tmp / "p.csv", a.out);
  const std::string cover = " --cover " + data("annulus_cover.json");
  const auto plain = run("pc-mapper " + tmp / "p.csv" + cover);
  REQUIRE(plain.code == 0);
  CHECK(run("pc-mapper " + tmp / "h.csv" + cover).out == plain.out);
  spit(tmp / "ragged.csv", "0,1\n0.5\n");
  CHECK(run("pc-mapper " + tmp / "ragged.csv" + cover).code == 2);
  spit(tmp / "bad_w.csv", a.out);
  CHECK(run("pc-mapper " + tmp / "bad_w.csv" + cover + " --w 1,1").code == 1);
}

TEST_CASE("point cloud mapper on the annulus") {
  TempDir tmp;
  REQUIRE(run("sample " + data("annulus_complex.json") + " -n 2000 --sigma 0.05 --seed 11 -o " + tmp / "a.csv").code == 0);
  const std::string args = tmp / "a.csv" + " --cover " + data("annulus_cover.json");
  const auto c1 = run("pc-mapper " + args);
  REQUIRE(c1.code == 0);
  const auto F = cosheaf_from_json(json::parse(c1.out));
  CHECK(to_json(F).dump(2) + "\n" == c1.out);
  const auto X = complex_from_json(json::parse(slurp(data("annulus_complex.json"))));
  const auto U = cover_from_json(json::parse(slurp(data("annulus_cover.json"))));
  CHECK(is_isomorphic(F, mapper_functor(true_reeb_cosheaf(X), U)).isomorphic);

  const auto g1 = run("enhanced-mapper --points " + args);
  REQUIRE(g1.code == 0);
  CHECK(run("enhanced-mapper --points " + args).out == g1.out);
  const auto G = enhanced_from_json(json::parse(g1.out));
  CHECK(betti(G.graph).b1 == 1);
  CHECK(G.graph.vertex_count() == 4);

  // Explicit settings flow through the config file.
  spit(tmp / "kde.toml", "beta = 4.0\n");
  const auto cfg = run("pc-mapper " + args + " --config " + tmp / "kde.toml -o " + tmp / "c.json");
  REQUIRE(cfg.code == 0);
  const json manifest = json::parse(slurp(tmp.path / "c.json.manifest.json"));
  CHECK(manifest["config"]["kde"]["r"].get<double>() > 0);
}

TEST_CASE("manifest reproducibility") {
  TempDir tmp;
  const std::string out1 = tmp / "one.csv", out2 = tmp / "two.csv";
  const std::string base = "sample " + data("branching_complex.json") + " -n 300 --sigma 0.02 --seed 9 -o ";
  REQUIRE(run(base + out1).code == 0);
  REQUIRE(run(base + out2).code == 0);
  const RunManifest m1 = manifest_from_json(json::parse(slurp(out1 + ".manifest.json")));
  const RunManifest m2 = manifest_from_json(json::parse(slurp(out2 + ".manifest.json")));
  CHECK(m1.seed == std::optional<std::uint64_t>(9));
  CHECK(m1.input_hashes == m2.input_hashes);
  CHECK(m1.config == m2.config);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(m1.output_hashes.at(out1) == hash_file(out1));
  CHECK(manifest_from_json(to_json(m1)).reproducibility_key() == m1.reproducibility_key());

  // Replaying the recorded arguments reproduces the output bytes.
  std::string replay;
  for (std::size_t i = 0; i + 1 < m1.arguments.size(); ++i) replay += m1.arguments[i] + " ";
  REQUIRE(run(replay + out2).code == 0);
  CHECK(slurp(out2) == slurp(out1));

  const std::string explicit_path = tmp / "m.json";
  REQUIRE(run("reeb " + data("torus_rgraph.json") + " --manifest " + explicit_path).code == 0);
  const json m = json::parse(slurp(explicit_path));
  CHECK(m["command"] == "reeb");
  CHECK(m["outputs"].contains("stdout"));
}

TEST_CASE("experiment subcommand") {
  TempDir tmp;
  spit(tmp / "plan.toml", "complex = \"" + data("annulus_complex.json") + "\"\n" +
                              "cover = [[-1.5, -0.6], [-0.8, 0.8], [0.6, 1.5]]\n"
                              "sigma = 0.05\nsizes = [300, 1500]\ntrials = 6\nseed = 21\n");
  const auto serial = run("experiment " + tmp / "plan.toml --jobs 1 -o " + tmp / "s.csv");
  REQUIRE(serial.code == 0);
  REQUIRE(run("experiment " + tmp / "plan.toml --jobs 3 -o " + tmp / "p.csv").code == 0);
  const std::string table = slurp(tmp.path / "s.csv");
  CHECK(table == slurp(tmp.path / "p.csv"));
  CHECK(table.rfind("n,trials,recovered,rate,budget_exceeded,certified,errors\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  const json m = json::parse(slurp(tmp / "s.csv.manifest.json"));
  CHECK(m["seed"] == 21);
  REQUIRE(run("experiment " + tmp / "plan.toml --jobs 2 -o " + tmp / "e.csv", "MAPPER_SEED=22").code == 0);
  CHECK(json::parse(slurp(tmp / "e.csv.manifest.json"))["seed"] == 22);

  spit(tmp / "broken.toml", "sizes = [300\n");
  CHECK(run("experiment " + tmp / "broken.toml").code == 2);
  spit(tmp / "empty.toml", "complex = \"" + data("annulus_complex.json") + "\"\ncover = [[-2, 2]]\nsizes = []\n");
  CHECK(run("experiment " + tmp / "empty.toml").code == 1);
}
