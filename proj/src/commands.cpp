#include "xmem/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "xmem/bigauss.hpp"
#include "xmem/excursion.hpp"
#include "xmem/memory.hpp"
#include "xmem/numeric.hpp"
#include "xmem/sample_io.hpp"

namespace xmem {

namespace {

using nlohmann::ordered_json;

std::string num(double v) { return shortest(v); }

// Extended reals in JSON: finite numbers stay numbers, infinities become strings.
ordered_json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

ordered_json certificate_json(const MemoryVerdict& v) {
  if (!v.certificate) return nullptr;
  return ordered_json{{"k", v.certificate->k}, {"reason", v.certificate->reason}};
}

struct Case {
  double eta;
  MemoryVerdict verdict;
};

std::string classify_json(const ExperimentConfig& c, bool volatility) {
  const Transform g = c.transform->build();
  std::vector<double> etas = c.sweep_eta;
  const bool eta_sweep = !etas.empty();
  if (!eta_sweep) etas.push_back(c.model->eta);

  std::vector<FiniteMeasure> measures;
  if (c.measure) measures.push_back(c.measure->build());
  for (double u : c.sweep_dirac) measures.push_back(FiniteMeasure::dirac(u));

  std::optional<ZDistribution> z;
  if (volatility) z = c.z->build();
  const int k_max = c.k_max > 0 ? c.k_max : (volatility ? 60 : 2000);

  std::vector<Case> cases;
  std::string model_label;
  for (double eta : etas) {
    ModelSpec spec = *c.model;
    spec.eta = eta;
    const CovarianceModel model = spec.build();
    if (model_label.empty() || !eta_sweep) model_label = model.describe();
    for (const auto& mu : measures) {
      cases.push_back({eta, volatility ? volatility_memory_series(g, *z, model, mu, k_max, c.tol)
                                       : classify_subordinated(g, model, mu, k_max, c.tol)});
    }
  }
  std::size_t worst = 0;
  for (std::size_t i = 1; i < cases.size(); ++i) {
    if (severity(cases[i].verdict.verdict) > severity(cases[worst].verdict.verdict)) worst = i;
  }
  const MemoryVerdict& w = cases[worst].verdict;
  ordered_json j;
  j["schema"] = 1;
  j["command"] = c.command;
  j["verdict"] = to_string(w.verdict);
  j["series_value"] = jnum(w.series_value);
  j["certificate"] = certificate_json(w);
  j["mu"] = w.mu.describe();
  j["transform"] = g.label();
  j["model"] = eta_sweep ? c.model->family + " sweep" : model_label;
  j["truncation"] = w.truncation;
  if (z) j["z"] = z->describe();
  if (cases.size() > 1) {
    ordered_json rows = ordered_json::array();
    for (const auto& cs : cases) {
      rows.push_back({{"eta", cs.eta},
                      {"mu", cs.verdict.mu.describe()},
                      {"verdict", to_string(cs.verdict.verdict)},
                      {"series_value", jnum(cs.verdict.series_value)},
                      {"tail_bound", jnum(cs.verdict.tail_bound)},
                      {"certificate", certificate_json(cs.verdict)},
                      {"truncation", cs.verdict.truncation}});
    }
    j["sweep"] = rows;
  } else {
    j["tail_bound"] = jnum(w.tail_bound);
  }
  return j.dump(2) + "\n";
}

std::string rank_json(const ExperimentConfig& c) {
  const Transform g = c.transform->build();
  std::optional<ZDistribution> z;
  if (c.z) z = c.z->build();
  const CovarianceModel model = c.model ? c.model->build() : CovarianceModel::white_noise(1);
  const int k_max = c.k_max > 0 ? c.k_max : 12;

  ordered_json j;
  j["schema"] = 1;
  j["command"] = c.command;
  j["transform"] = g.label();
  j["z"] = z ? ordered_json(z->describe()) : ordered_json(nullptr);
  j["model"] = c.model ? ordered_json(model.describe()) : ordered_json(nullptr);

  // Rank of the centred transform itself, when its mean exists.
  const QuadResult mean = gaussian_expectation([&](double y) { return g(y); });
  if (mean.converged && std::isfinite(mean.value)) {
    const RankResult r = hermite_rank([&](double y) { return g(y) - mean.value; }, k_max, c.tol);
    j["centered_transform"] = {{"rank", r.rank ? ordered_json(*r.rank) : ordered_json(nullptr)},
                               {"finite_variance", r.finite_variance}};
  } else {
    j["centered_transform"] = nullptr;
  }
  ordered_json rows = ordered_json::array();
  for (double u : c.levels) {
    const CltTheory t = xi_and_rank(g, z, u, model, k_max, c.tol);
    ordered_json row{{"level", u},
                     {"q", t.q ? ordered_json(*t.q) : ordered_json(nullptr)},
                     {"xi_zero", t.xi_zero},
                     {"sigma2", t.sigma2 ? ordered_json(*t.sigma2) : ordered_json(nullptr)}};
    if (c.model) row["predicted_exponent"] = t.predicted_exponent;
    rows.push_back(row);
  }
  j["levels"] = rows;
  return j.dump(2) + "\n";
}

Artifact clt_csv(const ExperimentConfig& c) {
  EnsembleConfig e;
  e.model = c.model->build();
  if (c.transform) e.transform = c.transform->build();
  if (c.z) e.z = c.z->build();
  e.levels = c.levels;
  e.n_values = c.n_values;
  e.replicates = *c.replicates;
  e.master_seed = *c.seed;
  e.threads = c.threads.value_or(1);
  const EnsembleResult r = mc_ensemble(e);

  const std::string z_family = e.z ? to_string(e.z->family) : "none";
  const std::string id = c.experiment_id.empty() ? "clt" : c.experiment_id;
  const std::string fixed = id + "," + std::to_string(e.model.dim) + "," + num(e.model.tail_exponent()) +
                            "," + e.transform.label() + "," + z_family + ",";
  std::ostringstream os;
  os << "experiment_id,d,eta,transform,z_family,level,n,replicates,mean,variance,skewness,kurtosis,"
        "exponent,exponent_stderr,predicted_exponent,seed\n";
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const CltTheory theory = xi_and_rank(e.transform, e.z, r.levels[l], e.model);
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
      const auto& cell = r.cell(l, i);
      os << fixed << num(cell.level) << "," << cell.n << "," << r.replicates << ","
         << num(cell.moments.mean) << "," << num(cell.moments.variance) << ","
         << num(cell.moments.skewness) << "," << num(cell.moments.excess_kurtosis) << ",,,"
         << num(theory.predicted_exponent) << "," << *c.seed << "\n";
    }
    const ScalingReport s = r.scaling(l);
    os << fixed << num(r.levels[l]) << ",summary," << r.replicates << ",,,,," << num(s.exponent) << ","
       << num(s.combined_stderr()) << "," << num(theory.predicted_exponent) << "," << *c.seed << "\n";
  }
  Artifact a{os.str(), "csv", {}};
  if (!c.dump_path.empty()) {
    const std::size_t last = r.n_values.size() - 1;
    const CirculantEmbedding emb(e.model, r.n_values[last]);
    const RngSpec rng{e.master_seed, static_cast<std::uint64_t>(last) << 32};
    const FieldSample y = emb.sample(rng);
    const FieldSample x = e.z ? volatility_field(y, e.transform, *e.z, rng) : subordinate(y, e.transform);
    std::ostringstream bin(std::ios::binary);
    write_binary(bin, x);
    a.extras.emplace_back(c.dump_path, bin.str());
  }
  return a;
}

std::string partial_sum_csv(const ExperimentConfig& c) {
  PartialSumConfig p;
  p.model = c.model->build();
  p.alpha = *c.alpha;
  p.n_values = c.n_values;
  p.replicates = *c.replicates;
  p.master_seed = *c.seed;
  p.threads = c.threads.value_or(1);
  p.q_lo = c.q_lo;
  p.q_hi = c.q_hi;
  const PartialSumReport r = partial_sum_scaling(p);
  const std::string id = c.experiment_id.empty() ? "partial-sum" : c.experiment_id;
  const std::string fixed = id + "," + num(p.model.tail_exponent()) + "," + num(p.alpha) + ",";
  std::ostringstream os;
  os << "experiment_id,eta,alpha,n,replicates,iqr,exponent,exponent_stderr,predicted_exponent,seed\n";
  for (std::size_t i = 0; i < p.n_values.size(); ++i) {
    os << fixed << p.n_values[i] << "," << p.replicates << "," << num(r.iqr[i]) << ",,,"
       << num(r.predicted) << "," << p.master_seed << "\n";
  }
  os << fixed << "summary," << p.replicates << ",," << num(r.scaling.exponent) << ","
     << num(r.scaling.exponent_stderr) << "," << num(r.predicted) << "," << p.master_seed << "\n";
  return os.str();
}

std::string cov_check_csv(const ExperimentConfig& c) {
  const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto& us = c.cov_u.empty() ? grid : c.cov_u;
  const auto& vs = c.cov_v.empty() ? grid : c.cov_v;
  std::ostringstream os;
  os << "r,u,v,integral,series,oracle,delta_series,delta_oracle\n";
  for (double r : c.cov_r) {
    for (double u : us) {
      for (double v : vs) {
        const double integral = indicator_cov_integral({r, u, v});
        const double series = indicator_cov_series_adaptive({r, u, v}).value;
        const double oracle = orthant_oracle(r, u, v) - normal_tail(u) * normal_tail(v);
        os << num(r) << "," << num(u) << "," << num(v) << "," << num(integral) << "," << num(series)
           << "," << num(oracle) << "," << num(std::fabs(integral - series)) << ","
           << num(std::fabs(integral - oracle)) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace

Artifact execute(const ExperimentConfig& c) {
  validate_for_command(c);
  const std::string& cmd = c.command;
  if (cmd == "classify") return {classify_json(c, false), "json", {}};
  if (cmd == "volatility-classify") return {classify_json(c, true), "json", {}};
  if (cmd == "rank") return {rank_json(c), "json", {}};
  if (cmd == "clt") return clt_csv(c);
  if (cmd == "partial-sum") return {partial_sum_csv(c), "csv", {}};
  if (cmd == "cov-check") return {cov_check_csv(c), "csv", {}};
  throw ConfigError("unknown command '" + cmd + "'");
}

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw ConfigError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

int run_command(const std::string& command, const std::string& config_path,
                const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig c = load_config(config_path);
    if (c.command.empty()) c.command = command;
    if (c.command != command) {
      throw ConfigError("config declares command '" + c.command + "' but '" + command + "' was requested");
    }
    if (overrides.seed) c.seed = overrides.seed;
    if (overrides.threads) c.threads = overrides.threads;
    if (!overrides.out.empty()) c.output_path = overrides.out;
    const Artifact a = execute(c);
    for (const auto& [path, bytes] : a.extras) write_atomic(path, bytes);
    if (c.output_path.empty()) {
      out << a.text;
    } else {
      write_atomic(c.output_path, a.text);
    }
    return kExitOk;
  } catch (const NumericError& e) {
    err << "xmem: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    err << "xmem: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "xmem: error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Memory classification and excursion scaling experiments"};
  app.require_subcommand(1);
  std::string config_path;
  RunOverrides overrides;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string selected;
  for (const auto& name : known_commands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", overrides.out, "output path (default: run.output or stdout)");
    sub->add_option("--seed", seed, "override run.seed");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&, name, sub] {
      selected = name;
      if (sub->count("--seed")) overrides.seed = seed;
      if (sub->count("--threads")) overrides.threads = threads;
    });
  }
  std::string target;
  std::string plot;
  auto* rep = app.add_subcommand("report", "summarize run artifacts");
  rep->add_option("path", target, "artifact file or run directory")->required();
  rep->add_option("--plot", plot, "write gnuplot data for variance plots");
  rep->callback([&] { selected = "report"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "xmem: " << e.what() << "\n";
    return kExitConfig;
  }
  if (selected == "report") {
    return report(target, plot.empty() ? std::nullopt : std::optional<std::filesystem::path>(plot), out, err);
  }
  return run_command(selected, config_path, overrides, out, err);
}

}  // namespace xmem
