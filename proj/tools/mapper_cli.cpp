// Command-line front end.  Exit codes: 0 success, 1 domain failure, 2 usage
// or unreadable input.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mapper/distance.hpp"
#include "mapper/experiment.hpp"
#include "mapper/manifest.hpp"
#include "mapper/mapper.hpp"
#include "mapper/rspace.hpp"
#include "mapper/synth.hpp"

using namespace mapper;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string dir_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? "." : path.substr(0, slash);
}

json load_document(const std::string& path) {
  const std::string text = read_text(path);
  if (ends_with(path, ".toml")) {
    try {
      return toml_to_json(text);
    } catch (const SynthError& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Cosheaf documents carry "strata"; R-graph documents carry "attach_left".
ConstructibleCosheaf load_space(const std::string& path) {
  const json j = load_document(path);
  if (j.is_object() && j.contains("strata")) return cosheaf_from_json(j);
  if (j.is_object() && j.contains("attach_left")) return reeb_cosheaf(rgraph_from_json(j));
  if (j.is_object() && j.contains("segments")) return true_reeb_cosheaf(complex_from_json(j));
  throw CosheafError(path + ": not a cosheaf, R-graph or geometric complex");
}

// Points as CSV rows; a non-numeric first row is taken as a header.
PointCloud load_points(const std::string& path) {
  std::istringstream in(read_text(path));
  PointCloud pc;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (pc.dim == 0 && pc.coords.empty()) continue;
      throw UsageError(path + ":" + std::to_string(row) + ": non-numeric value");
    }
    if (pc.dim == 0) pc.dim = values.size();
    if (values.size() != pc.dim) throw UsageError(path + ":" + std::to_string(row) + ": expected " +
                                                  std::to_string(pc.dim) + " columns");
    pc.coords.insert(pc.coords.end(), values.begin(), values.end());
  }
  if (pc.coords.empty()) throw UsageError(path + ": no points");
  return pc;
}

std::string points_csv(const PointCloud& pc) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < pc.size(); ++i) {
    for (std::size_t k = 0; k < pc.dim; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", pc.point(i)[k]);
      out += buf;
      out += k + 1 < pc.dim ? "," : "\n";
    }
  }
  return out;
}

// Range of critical values bounding the support; infinite when unbounded.
std::pair<double, double> support_range(const ConstructibleCosheaf& F) {
  if (F.empty()) return {0, 0};
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < F.strata.size(); ++i) {
    if (F.strata[i].empty()) continue;
    lo = std::min(lo, i == 0 ? -kInf : F.critical[i - 1]);
    hi = std::max(hi, i == F.size() ? kInf : F.critical[i]);
  }
  for (std::size_t j = 0; j < F.points.size(); ++j) {
    if (F.points[j].empty()) continue;
    lo = std::min(lo, F.critical[j]);
    hi = std::max(hi, F.critical[j]);
  }
  return {lo, hi};
}

struct Run {
  RunManifest manifest;
  std::string out_path;
  std::string manifest_path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void input(const std::string& path) {
    if (!std::ifstream(path)) throw UsageError("cannot open '" + path + "'");
    manifest.add_input(path);
  }

  void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
      std::cout << text;
      manifest.output_hashes["stdout"] = fnv1a_hex(text);
    } else {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw UsageError("cannot write '" + path + "'");
      out << text;
      manifest.output_hashes[path] = fnv1a_hex(text);
    }
  }

  void finish() {
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string path = manifest_path;
    if (path.empty() && !out_path.empty() && out_path != "-") path = out_path + ".manifest.json";
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << to_json(manifest).dump(2) << "\n";
  }
};

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("MAPPER_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (s[used] != '\0') throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("MAPPER_SEED is not an unsigned integer: '") + s + "'");
  }
}

NiceCover load_cover(const std::string& path, Run& run) {
  run.input(path);
  return cover_from_json(load_document(path));
}

// Graph outputs need compact support, so `bounded` caps added rays just past
// the range.
NiceCover spanning_cover(NiceCover U, double lo, double hi, bool extend, Run& run, bool bounded = false) {
  if (U.covers_closed(lo, hi)) return U;
  if (!extend) {
    std::ostringstream msg;
    msg << "cover does not span the filter range [" << lo << ", " << hi << "]; pass --auto-extend to add rays";
    throw CoverError(msg.str());
  }
  const ExtendedCover ext = auto_extend(U, lo, hi);
  run.manifest.config["auto_extend"] = {{"added_left", ext.added_left}, {"added_right", ext.added_right}};
  if (!ext.misses_range) std::cerr << "warning: added rays reach into the filter range\n";
  if (!bounded) return ext.cover;
  const double pad = 0.1 * std::max(hi - lo, 1.0);
  std::vector<Interval> elems = ext.cover.elements;
  for (auto& e : elems) {
    if (std::isinf(e.lo)) e.lo = std::min(lo, e.hi) - pad;
    if (std::isinf(e.hi)) e.hi = std::max(hi, e.lo) + pad;
  }
  return NiceCover(std::move(elems));
}

struct PointOptions {
  std::string config;
  std::string w;
  double c = 0;
  double beta = 0;
};

void add_point_options(CLI::App* cmd, PointOptions& o) {
  cmd->add_option("--config", o.config, "KDE settings (JSON or TOML: beta, r, L1, L2, eps1, eps2)");
  cmd->add_option("--w", o.w, "filter direction, comma separated (default: last axis)");
  cmd->add_option("--c", o.c, "filter offset");
  cmd->add_option("--beta", o.beta, "bandwidth factor, overrides the config file")->check(CLI::PositiveNumber);
}

// Points with filter and KDE configuration applied.
std::pair<PointCloud, KdeConfig> prepare_points(const std::string& path, const PointOptions& o, Run& run) {
  run.input(path);
  PointCloud pc = load_points(path);
  if (o.w.empty()) {
    pc.filter.w.assign(pc.dim, 0.0);
    pc.filter.w.back() = 1;
  } else {
    std::stringstream s(o.w);
    std::string part;
    while (std::getline(s, part, ',')) {
      try {
        pc.filter.w.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw UsageError("--w: not a number: '" + part + "'");
      }
    }
  }
  pc.filter.c = o.c;
  KdeTemplate t;
  if (!o.config.empty()) {
    run.input(o.config);
    t = kde_template_from_json(load_document(o.config));
  }
  if (o.beta > 0) t.beta = o.beta;
  pc.validate();
  const KdeConfig cfg = t.instantiate(pc);
  run.manifest.config["filter"] = {{"w", pc.filter.w}, {"c", pc.filter.c}};
  run.manifest.config["kde"] = to_json(cfg);
  return {std::move(pc), cfg};
}

std::pair<double, double> filter_range(const PointCloud& pc) {
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    lo = std::min(lo, pc.value(i));
    hi = std::max(hi, pc.value(i));
  }
  return {lo, hi};
}

void write_dot(const std::string& path, const std::string& dot, Run& run) {
  if (!path.empty()) run.emit(dot, path);
}

int report_domain(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mapper graphs, Reeb graphs and interleaving distances for constructible R-spaces"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  Run run;
  for (int i = 1; i < argc; ++i) run.manifest.arguments.push_back(argv[i]);
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("-o,--out", run.out_path, "output file (default stdout)");
    cmd->add_option("--manifest", run.manifest_path, "manifest file (default <out>.manifest.json)");
  };

  std::string file_a, file_b, cover_path, dot_path, space_path, points_path;
  bool auto_ext = false, multinerve = false, geometric = false, bound = false, exact = false, with_witness = false;
  std::size_t n = 0, budget = 0;
  double sigma = 0;
  std::uint64_t seed = 0;
  int jobs = 0;
  PointOptions popts;

  auto* validate_cmd = app.add_subcommand("validate", "check a cosheaf, R-graph, cover, complex or plan file");
  validate_cmd->add_option("file", file_a)->required();

  auto* reeb_cmd = app.add_subcommand("reeb", "Reeb graph of an R-graph or complex");
  reeb_cmd->add_option("space", file_a)->required();
  reeb_cmd->add_option("--dot", dot_path, "also write DOT");
  common(reeb_cmd);

  auto* functor_cmd = app.add_subcommand("mapper-functor", "mapper cosheaf of a space over a cover");
  functor_cmd->add_option("space", file_a)->required();
  functor_cmd->add_option("cover", cover_path)->required();
  functor_cmd->add_flag("--auto-extend", auto_ext, "add rays when the cover misses the support");
  common(functor_cmd);

  auto* enhanced_cmd = app.add_subcommand("enhanced-mapper", "enhanced mapper graph from a space or points");
  auto* src = enhanced_cmd->add_option_group("input");
  src->add_option("--space", space_path, "cosheaf, R-graph or complex file");
  src->add_option("--points", points_path, "CSV point cloud");
  src->require_option(1);
  enhanced_cmd->add_option("--cover", cover_path)->required();
  enhanced_cmd->add_option("--dot", dot_path, "also write DOT");
  enhanced_cmd->add_flag("--auto-extend", auto_ext, "add rays when the cover misses the filter range");
  add_point_options(enhanced_cmd, popts);
  common(enhanced_cmd);

  auto* classic_cmd = app.add_subcommand("classic-mapper", "nerve-style mapper graph");
  auto* csrc = classic_cmd->add_option_group("input");
  csrc->add_option("--space", space_path, "cosheaf, R-graph or complex file");
  csrc->add_option("--points", points_path, "CSV point cloud");
  csrc->require_option(1);
  classic_cmd->add_option("--cover", cover_path)->required();
  auto* multi_flag = classic_cmd->add_flag("--multinerve", multinerve, "keep one edge per overlap component");
  classic_cmd->add_flag("--geometric", geometric, "geometric realization over the element midpoints")
      ->excludes(multi_flag);
  classic_cmd->add_option("--dot", dot_path, "also write DOT");
  classic_cmd->add_flag("--auto-extend", auto_ext, "add rays when the cover misses the filter range");
  add_point_options(classic_cmd, popts);
  common(classic_cmd);

  auto* distance_cmd = app.add_subcommand("distance", "interleaving distance between two spaces");
  distance_cmd->add_option("first", file_a)->required();
  distance_cmd->add_option("second", file_b)->required();
  auto* bound_flag = distance_cmd->add_flag("--bound", bound, "stop at the first feasible candidate");
  distance_cmd->add_flag("--exact", exact, "bisect to tolerance (default)")->excludes(bound_flag);
  distance_cmd->add_flag("--witness", with_witness, "include the interleaving witness");
  distance_cmd->add_option("--budget", budget, "search node budget per check");
  common(distance_cmd);

  auto* sample_cmd = app.add_subcommand("sample", "sample points near a geometric complex");
  sample_cmd->add_option("complex", file_a)->required();
  sample_cmd->add_option("-n,--count", n, "number of points")->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--sigma", sigma, "noise radius")->check(CLI::NonNegativeNumber);
  auto* seed_opt = sample_cmd->add_option("--seed", seed, "random seed (MAPPER_SEED overrides)");
  common(sample_cmd);

  auto* pc_cmd = app.add_subcommand("pc-mapper", "random mapper cosheaf of a point cloud");
  pc_cmd->add_option("points", points_path)->required();
  pc_cmd->add_option("--cover", cover_path)->required();
  pc_cmd->add_flag("--auto-extend", auto_ext, "add rays when the cover misses the filter range");
  add_point_options(pc_cmd, popts);
  common(pc_cmd);

  auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo recovery experiment");
  exp_cmd->add_option("plan", file_a)->required();
  exp_cmd->add_option("--jobs", jobs, "worker threads (0: all)")->check(CLI::NonNegativeNumber);
  common(exp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  CLI::App* cmd = app.get_subcommands().front();
  run.manifest.command = cmd->get_name();

  try {
    if (cmd == validate_cmd) {
      const json j = load_document(file_a);
      std::string kind;
      std::vector<std::string> problems;
      try {
        if (j.is_object() && j.contains("strata")) {
          kind = "cosheaf";
          cosheaf_from_json(j).validate();
        } else if (j.is_object() && j.contains("attach_left")) {
          kind = "rgraph";
          problems = validate(rgraph_from_json(j));
        } else if (j.is_object() && j.contains("sizes")) {
          kind = "plan";
          plan_from_json(j, dir_of(file_a));
        } else if (j.is_object() && j.contains("cover")) {
          kind = "cover";
          cover_from_json(j);
        } else if (j.is_object() && j.contains("segments")) {
          kind = "complex";
          complex_from_json(j);
        } else {
          throw UsageError(file_a + ": unrecognised document");
        }
      } catch (const CosheafError& e) {
        problems.push_back(e.what());
      }
      if (problems.empty()) {
        std::cout << "ok: " << kind << "\n";
        return 0;
      }
      for (const auto& p : problems) std::cout << "invalid " << kind << ": " << p << "\n";
      return 1;
    }

    if (cmd == reeb_cmd) {
      run.input(file_a);
      const json j = load_document(file_a);
      RGraph X;
      if (j.contains("segments")) X = complex_rgraph(complex_from_json(j));
      else X = rgraph_from_json(j);
      if (const auto problems = validate(X); !problems.empty()) throw RGraphError(problems.front());
      const RGraph R = reeb_graph(X);
      run.emit(to_json(R).dump(2) + "\n", run.out_path);
      write_dot(dot_path, to_dot(R, "reeb"), run);
    } else if (cmd == functor_cmd) {
      run.input(file_a);
      const ConstructibleCosheaf F = load_space(file_a);
      const auto [lo, hi] = support_range(F);
      const NiceCover U = spanning_cover(load_cover(cover_path, run), lo, hi, auto_ext, run);
      run.manifest.config["cover"] = to_json(U);
      run.emit(to_json(mapper_functor(F, U)).dump(2) + "\n", run.out_path);
    } else if (cmd == enhanced_cmd || cmd == classic_cmd) {
      std::optional<EnhancedMapperGraph> enhanced;
      std::optional<AbstractGraph> nerve;
      if (!space_path.empty()) {
        run.input(space_path);
        const ConstructibleCosheaf F = load_space(space_path);
        const auto [lo, hi] = support_range(F);
        const NiceCover U = spanning_cover(load_cover(cover_path, run), lo, hi, auto_ext, run, true);
        run.manifest.config["cover"] = to_json(U);
        if (cmd == enhanced_cmd) {
          enhanced = enhanced_mapper(F, U);
        } else {
          require_cover_spans(F, U);
          const MapperOracles o = oracles_from_functor(CosheafFunctor(F), U);
          if (geometric) enhanced = geometric_mapper_from_oracles(o, U);
          else nerve = multinerve ? multinerve_mapper(o, U) : classic_mapper(o, U);
        }
      } else {
        const auto [pc, cfg] = prepare_points(points_path, popts, run);
        const auto [lo, hi] = filter_range(pc);
        const NiceCover U = spanning_cover(load_cover(cover_path, run), lo, hi, auto_ext, run, true);
        run.manifest.config["cover"] = to_json(U);
        const DensityIndex index(pc, cfg);
        for (const auto& w : tameness_warnings(index, U)) std::cerr << "warning: " << w << "\n";
        if (cmd == enhanced_cmd) {
          enhanced = display_locale(normalize(dhat_pi_cosheaf(index, U)));
        } else {
          const LevelSetFunctor inner(index, cfg.inner_level()), outer(index, cfg.outer_level());
          const ImagePrecosheaf image(inner, outer, [&](const Interval& I) {
            return index.pi0_map(cfg.inner_level(), cfg.outer_level(), I);
          });
          const MapperOracles o = oracles_from_functor(image, U);
          if (geometric) enhanced = geometric_mapper_from_oracles(o, U);
          else nerve = multinerve ? multinerve_mapper(o, U) : classic_mapper(o, U);
        }
      }
      if (enhanced) {
        run.emit(to_json(*enhanced).dump(2) + "\n", run.out_path);
        write_dot(dot_path, to_dot(*enhanced, "mapper"), run);
      } else {
        run.emit(to_json(*nerve).dump(2) + "\n", run.out_path);
        write_dot(dot_path, to_dot(*nerve, "nerve"), run);
      }
    } else if (cmd == distance_cmd) {
      run.input(file_a);
      run.input(file_b);
      const ConstructibleCosheaf F = load_space(file_a), G = load_space(file_b);
      SearchLimits limits;
      if (budget > 0) limits.budget = budget;
      const DistanceResult d = interleaving_distance(F, G, 1e-9, !bound, limits);
      run.manifest.config["mode"] = bound ? "bound" : "exact";
      json out = {{"epsilon", real_to_json(d.epsilon)},
                  {"exact", !bound && !d.budget_exceeded},
                  {"budget_exceeded", d.budget_exceeded}};
      if (with_witness && d.witness) out["witness"] = to_json(*d.witness);
      run.emit(out.dump(2) + "\n", run.out_path);
      if (d.budget_exceeded) {
        std::cerr << "error: search budget exceeded; the reported value is an upper bound\n";
        run.finish();
        return 1;
      }
    } else if (cmd == sample_cmd) {
      run.input(file_a);
      const GeometricComplex X = complex_from_json(load_document(file_a));
      if (auto s = env_seed()) seed = *s;
      else if (!*seed_opt) seed = 0;
      run.manifest.seed = seed;
      run.manifest.config = {{"n", n}, {"sigma", sigma}};
      run.emit(points_csv(sample(X, n, sigma, seed)), run.out_path);
    } else if (cmd == pc_cmd) {
      const auto [pc, cfg] = prepare_points(points_path, popts, run);
      const auto [lo, hi] = filter_range(pc);
      const NiceCover U = spanning_cover(load_cover(cover_path, run), lo, hi, auto_ext, run);
      run.manifest.config["cover"] = to_json(U);
      const DensityIndex index(pc, cfg);
      for (const auto& w : tameness_warnings(index, U)) std::cerr << "warning: " << w << "\n";
      run.emit(to_json(dhat_pi_cosheaf(index, U)).dump(2) + "\n", run.out_path);
    } else if (cmd == exp_cmd) {
      run.input(file_a);
      const json doc = load_document(file_a);
      ExperimentPlan plan = plan_from_json(doc, dir_of(file_a));
      if (auto s = env_seed()) plan.seed = *s;
      run.manifest.seed = plan.seed;
      run.manifest.config = to_json(plan);
      const ExperimentResult r = run_experiment(plan, jobs);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      if (r.delta.delta < kInf) std::cerr << "thickening estimate (approximate): " << r.delta.delta << "\n";
      run.emit(to_csv(r), run.out_path);
    }
    run.finish();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CosheafError& e) {
    return report_domain(e);
  } catch (const json::exception& e) {
    return report_domain(e);
  } catch (const std::runtime_error& e) {
    return report_domain(e);
  }
  return 0;
}
