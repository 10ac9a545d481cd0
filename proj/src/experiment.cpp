#include "mapper/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <omp.h>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "mapper/distance.hpp"
#include "mapper/mapper.hpp"

namespace mapper {

KdeConfig KdeTemplate::instantiate(const PointCloud& cloud) const {
  KdeConfig cfg;
  cfg.r = r ? *r : default_bandwidth(cloud.size(), cloud.dim, beta);
  cfg.C_K = kernel_integral(cfg.kernel, cloud.dim);
  if (!L1 || !L2) default_levels(cfg, kde_at_samples(cloud, cfg, false));
  if (L1) cfg.L1 = *L1;
  if (L2) cfg.L2 = *L2;
  cfg.eps1 = eps1 ? *eps1 : (cfg.L1 - cfg.L2) / 8;
  cfg.eps2 = eps2 ? *eps2 : (cfg.L1 - cfg.L2) / 8;
  cfg.validate();
  return cfg;
}

void ExperimentPlan::validate() const {
  complex.validate();
  cover.validate();
  if (!(sigma >= 0)) throw SynthError("noise radius must be non-negative");
  if (sizes.empty()) throw SynthError("plan lists no sample sizes");
  for (std::size_t n : sizes)
    if (n == 0) throw SynthError("sample size must be positive");
  if (trials == 0) throw SynthError("plan needs at least one trial");
  if (!(kde.beta > 0)) throw SynthError("bandwidth factor beta must be positive");
  if (!(delta_pitch > 0)) throw SynthError("grid pitch must be positive");
}

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SynthError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SynthError("'" + path + "': " + e.what());
  }
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || path.front() == '/' || base.empty()) return path;
  return base + "/" + path;
}

}  // namespace

KdeTemplate kde_template_from_json(const nlohmann::json& k) {
  if (!k.is_object()) throw SynthError("KDE settings must be a table");
  KdeTemplate t;
  try {
    t.beta = k.value("beta", 3.0);
    auto opt = [&](const char* key, std::optional<double>& slot) {
      if (k.contains(key)) slot = k.at(key).get<double>();
    };
    opt("r", t.r);
    opt("L1", t.L1);
    opt("L2", t.L2);
    opt("eps1", t.eps1);
    opt("eps2", t.eps2);
  } catch (const nlohmann::json::exception& e) {
    throw SynthError(std::string("malformed KDE settings: ") + e.what());
  }
  if (k.contains("kernel") && k.at("kernel") != "bump") throw SynthError("unknown kernel " + k.at("kernel").dump());
  return t;
}

nlohmann::json to_json(const KdeTemplate& t) {
  nlohmann::json kde = {{"beta", t.beta}};
  if (t.r) kde["r"] = *t.r;
  if (t.L1) kde["L1"] = *t.L1;
  if (t.L2) kde["L2"] = *t.L2;
  if (t.eps1) kde["eps1"] = *t.eps1;
  if (t.eps2) kde["eps2"] = *t.eps2;
  return kde;
}

nlohmann::json toml_to_json(const std::string& text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw SynthError(msg.str());
  }
  std::ostringstream js;
  js << toml::json_formatter{table};
  return nlohmann::json::parse(js.str());
}

ExperimentPlan plan_from_json(const nlohmann::json& j, const std::string& base_dir) {
  ExperimentPlan plan;
  try {
    const auto& cx = j.at("complex");
    plan.complex = complex_from_json(cx.is_string() ? read_json_file(resolve(base_dir, cx.get<std::string>())) : cx);
    const auto& cv = j.at("cover");
    plan.cover = cover_from_json(cv.is_string() ? read_json_file(resolve(base_dir, cv.get<std::string>()))
                                 : cv.is_array() ? nlohmann::json{{"cover", cv}}
                                                 : cv);
    plan.sigma = j.value("sigma", 0.0);
    plan.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    plan.trials = j.value("trials", std::size_t{1});
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.delta_pitch = j.value("delta_pitch", 0.01);
    if (j.contains("kde")) plan.kde = kde_template_from_json(j.at("kde"));
  } catch (const nlohmann::json::exception& e) {
    throw SynthError(std::string("malformed plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

ExperimentPlan plan_from_toml(const std::string& text, const std::string& base_dir) {
  return plan_from_json(toml_to_json(text), base_dir);
}

nlohmann::json to_json(const ExperimentPlan& plan) {
  return {{"complex", to_json(plan.complex)}, {"cover", to_json(plan.cover)["cover"]},
          {"sigma", plan.sigma},             {"sizes", plan.sizes},
          {"trials", plan.trials},           {"seed", plan.seed},
          {"delta_pitch", plan.delta_pitch}, {"kde", to_json(plan.kde)}};
}

TrialOutcome run_trial(const ExperimentPlan& plan, const ConstructibleCosheaf& target, std::size_t n,
                       std::size_t trial) {
  TrialOutcome out;
  out.n = n;
  out.trial = trial;
  out.seed = derive_seed(plan.seed, n, trial);
  try {
    const PointCloud cloud = sample(plan.complex, n, plan.sigma, out.seed);
    const KdeConfig cfg = plan.kde.instantiate(cloud);
    const DensityIndex index(cloud, cfg, false);
    const auto iso = is_isomorphic(dhat_pi_cosheaf(index, plan.cover), target);
    out.recovered = iso.isomorphic;
    out.budget_exceeded = iso.budget_exceeded;
  } catch (const CosheafError& e) {
    out.error = e.what();
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, int jobs) {
  plan.validate();
  ExperimentResult result;
  const ConstructibleCosheaf truth = true_reeb_cosheaf(plan.complex);
  require_cover_spans(truth, plan.cover);
  const ConstructibleCosheaf target = mapper_functor(truth, plan.cover);
  const Certificate cert = resolution_certificate(truth, plan.cover);
  result.resolution = cert.resolution;
  result.certificate_valid = cert.valid;
  if (!cert.valid) result.warnings.push_back("resolution bound could not be certified for this cover");

  if (plan.complex.dim == 2) {
    result.delta = estimate_delta_u(plan.complex, plan.cover, plan.delta_pitch);
    if (result.delta.delta == 0) {
      result.inapplicable = true;
      result.warnings.push_back("thickening estimate is zero: a cover boundary sits on a critical value");
    } else if (plan.sigma >= result.delta.delta) {
      result.warnings.push_back("noise radius is not below the estimated thickening radius");
    }
  } else {
    result.warnings.push_back("thickening estimate skipped for non-planar complex");
  }

  const std::size_t total = plan.sizes.size() * plan.trials;
  result.outcomes.resize(total);
  if (jobs == 1) {
    for (std::size_t k = 0; k < total; ++k)
      result.outcomes[k] = run_trial(plan, target, plan.sizes[k / plan.trials], k % plan.trials);
  } else {
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t k = 0; k < total; ++k)
      result.outcomes[k] = run_trial(plan, target, plan.sizes[k / plan.trials], k % plan.trials);
  }

  for (std::size_t s = 0; s < plan.sizes.size(); ++s) {
    ExperimentRow row;
    row.n = plan.sizes[s];
    row.trials = plan.trials;
    for (std::size_t t = 0; t < plan.trials; ++t) {
      const TrialOutcome& o = result.outcomes[s * plan.trials + t];
      row.recovered += o.recovered;
      row.budget_exceeded += o.budget_exceeded;
      row.errors += !o.error.empty();
    }
    row.certified = cert.valid ? row.recovered : 0;
    row.rate = static_cast<double>(row.recovered) / static_cast<double>(row.trials);
    result.rows.push_back(row);
  }
  return result;
}

std::string to_csv(const ExperimentResult& result) {
  std::string out = "n,trials,recovered,rate,budget_exceeded,certified,errors\n";
  for (const auto& r : result.rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.4f,%zu,%zu,%zu\n", r.n, r.trials, r.recovered, r.rate,
                  r.budget_exceeded, r.certified, r.errors);
    out += buf;
  }
  return out;
}

bool rates_nondecreasing(const std::vector<ExperimentRow>& rows, std::size_t inversions, double slack) {
  std::size_t drops = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double drop = rows[i - 1].rate - rows[i].rate;
    if (drop <= 0) continue;
    if (drop > slack + 1e-12) return false;
    ++drops;
  }
  return drops <= inversions;
}

}  // namespace mapper
