#include "xmem/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "xmem/numeric.hpp"

namespace xmem {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError("not a number: '" + s + "'");
  return v;
}

template <class T>
T to_integer(const std::string& s) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

std::vector<int> to_ints(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ',')) out.push_back(to_integer<int>(part));
  return out;
}

std::string fmt(double v) { return shortest(v); }

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

ModelSpec& model(ExperimentConfig& c) {
  if (!c.model) c.model.emplace();
  return *c.model;
}
TransformSpec& transform(ExperimentConfig& c) {
  if (!c.transform) c.transform.emplace();
  return *c.transform;
}
MeasureSpec& measure(ExperimentConfig& c) {
  if (!c.measure) c.measure.emplace();
  return *c.measure;
}
ZSpec& zspec(ExperimentConfig& c) {
  if (!c.z) c.z.emplace();
  return *c.z;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s{
      {"command", [](auto& c, const auto& v) { c.command = v; }},
      {"experiment_id", [](auto& c, const auto& v) { c.experiment_id = v; }},
      {"model.family", [](auto& c, const auto& v) { model(c).family = v; }},
      {"model.eta", [](auto& c, const auto& v) { model(c).eta = to_double(v); }},
      {"model.lambda", [](auto& c, const auto& v) { model(c).lambda = to_double(v); }},
      {"model.dim", [](auto& c, const auto& v) { model(c).dim = to_integer<int>(v); }},
      {"model.lattice", [](auto& c, const auto& v) { model(c).lattice = to_bool(v); }},
      {"model.lags", [](auto& c, const auto& v) { model(c).lags = to_doubles(v); }},
      {"model.values", [](auto& c, const auto& v) { model(c).values = to_doubles(v); }},
      {"transform.name", [](auto& c, const auto& v) { transform(c).name = v; }},
      {"transform.param", [](auto& c, const auto& v) { transform(c).param = to_double(v); }},
      {"measure.dirac",
       [](auto& c, const auto& v) {
         auto& m = measure(c);
         m.dirac.clear();
         for (const auto& part : split(v, ',')) {
           const auto colon = part.find(':');
           if (colon == std::string::npos) {
             m.dirac.push_back({to_double(part), 1.0});
           } else {
             m.dirac.push_back({to_double(trim(part.substr(0, colon))), to_double(trim(part.substr(colon + 1)))});
           }
         }
       }},
      {"measure.gaussian",
       [](auto& c, const auto& v) {
         auto vals = to_doubles(v);
         if (vals.size() == 2) vals.push_back(1.0);
         if (vals.size() != 3) throw ConfigError("measure.gaussian expects mean, sd[, mass]");
         measure(c).gaussian = vals;
       }},
      {"measure.points", [](auto& c, const auto& v) { measure(c).gaussian_points = to_integer<int>(v); }},
      {"z.family", [](auto& c, const auto& v) { zspec(c).family = v; }},
      {"z.alpha", [](auto& c, const auto& v) { zspec(c).alpha = to_double(v); }},
      {"z.x_min", [](auto& c, const auto& v) { zspec(c).x_min = to_double(v); }},
      {"z.lambda", [](auto& c, const auto& v) { zspec(c).lambda = to_double(v); }},
      {"z.symmetric", [](auto& c, const auto& v) { zspec(c).symmetric = to_bool(v); }},
      {"levels", [](auto& c, const auto& v) { c.levels = to_doubles(v); }},
      {"n_values", [](auto& c, const auto& v) { c.n_values = to_ints(v); }},
      {"run.replicates", [](auto& c, const auto& v) { c.replicates = to_integer<int>(v); }},
      {"run.seed", [](auto& c, const auto& v) { c.seed = to_integer<std::uint64_t>(v); }},
      {"run.threads", [](auto& c, const auto& v) { c.threads = to_integer<int>(v); }},
      {"run.output", [](auto& c, const auto& v) { c.output_path = v; }},
      {"run.dump", [](auto& c, const auto& v) { c.dump_path = v; }},
      {"run.plot", [](auto& c, const auto& v) { c.plot_path = v; }},
      {"series.k_max", [](auto& c, const auto& v) { c.k_max = to_integer<int>(v); }},
      {"series.tol", [](auto& c, const auto& v) { c.tol = to_double(v); }},
      {"sweep.eta", [](auto& c, const auto& v) { c.sweep_eta = to_doubles(v); }},
      {"sweep.dirac", [](auto& c, const auto& v) { c.sweep_dirac = to_doubles(v); }},
      {"psum.alpha", [](auto& c, const auto& v) { c.alpha = to_double(v); }},
      {"psum.q_lo", [](auto& c, const auto& v) { c.q_lo = to_double(v); }},
      {"psum.q_hi", [](auto& c, const auto& v) { c.q_hi = to_double(v); }},
      {"covcheck.r", [](auto& c, const auto& v) { c.cov_r = to_doubles(v); }},
      {"covcheck.u", [](auto& c, const auto& v) { c.cov_u = to_doubles(v); }},
      {"covcheck.v", [](auto& c, const auto& v) { c.cov_v = to_doubles(v); }},
  };
  return s;
}

}  // namespace

CovarianceModel ModelSpec::build() const {
  if (family == "cauchy") return CovarianceModel::cauchy(eta, dim, lattice);
  if (family == "exp_decay") return CovarianceModel::exp_decay(lambda, dim, lattice);
  if (family == "user_grid") return CovarianceModel::user_grid(lags, values, dim, lattice);
  if (family == "white_noise") return CovarianceModel::white_noise(dim);
  throw ConfigError("unknown model.family '" + family + "'");
}

Transform TransformSpec::build() const { return Transform::preset(name, param); }

FiniteMeasure MeasureSpec::build() const {
  std::optional<DensityPart> density;
  if (gaussian) {
    const auto& g = *gaussian;
    density = FiniteMeasure::gaussian_density(g[0], g[1], g[2], 6.0, gaussian_points).density();
  }
  if (dirac.empty() && !density) throw ConfigError("measure: neither measure.dirac nor measure.gaussian given");
  return FiniteMeasure(dirac, density);
}

ZDistribution ZSpec::build() const {
  if (family == "gaussian") return ZDistribution::gaussian();
  if (family == "pareto") return ZDistribution::pareto(alpha, symmetric, x_min);
  if (family == "exponential") return ZDistribution::exponential(lambda);
  if (family == "rademacher") return ZDistribution::rademacher();
  throw ConfigError("unknown z.family '" + family + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      it->second(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  const ExperimentConfig defaults;
  std::ostringstream os;
  auto line = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  if (!c.command.empty()) line("command", c.command);
  if (!c.experiment_id.empty()) line("experiment_id", c.experiment_id);
  if (c.model) {
    const auto& m = *c.model;
    line("model.family", m.family);
    line("model.eta", fmt(m.eta));
    line("model.lambda", fmt(m.lambda));
    line("model.dim", std::to_string(m.dim));
    line("model.lattice", m.lattice ? "true" : "false");
    if (!m.lags.empty()) line("model.lags", join(m.lags));
    if (!m.values.empty()) line("model.values", join(m.values));
  }
  if (c.transform) {
    line("transform.name", c.transform->name);
    line("transform.param", fmt(c.transform->param));
  }
  if (c.measure) {
    const auto& m = *c.measure;
    if (!m.dirac.empty()) {
      std::string v;
      for (std::size_t i = 0; i < m.dirac.size(); ++i) {
        v += (i ? ", " : "") + fmt(m.dirac[i].location) + ":" + fmt(m.dirac[i].weight);
      }
      line("measure.dirac", v);
    }
    if (m.gaussian) line("measure.gaussian", join(*m.gaussian));
    line("measure.points", std::to_string(m.gaussian_points));
  }
  if (c.z) {
    line("z.family", c.z->family);
    line("z.alpha", fmt(c.z->alpha));
    line("z.x_min", fmt(c.z->x_min));
    line("z.lambda", fmt(c.z->lambda));
    line("z.symmetric", c.z->symmetric ? "true" : "false");
  }
  if (!c.levels.empty()) line("levels", join(c.levels));
  if (!c.n_values.empty()) line("n_values", join(c.n_values));
  if (c.replicates) line("run.replicates", std::to_string(*c.replicates));
  if (c.seed) line("run.seed", std::to_string(*c.seed));
  if (c.threads) line("run.threads", std::to_string(*c.threads));
  if (!c.output_path.empty()) line("run.output", c.output_path);
  if (!c.dump_path.empty()) line("run.dump", c.dump_path);
  if (!c.plot_path.empty()) line("run.plot", c.plot_path);
  line("series.k_max", std::to_string(c.k_max));
  line("series.tol", fmt(c.tol));
  if (!c.sweep_eta.empty()) line("sweep.eta", join(c.sweep_eta));
  if (!c.sweep_dirac.empty()) line("sweep.dirac", join(c.sweep_dirac));
  if (c.alpha) line("psum.alpha", fmt(*c.alpha));
  line("psum.q_lo", fmt(c.q_lo));
  line("psum.q_hi", fmt(c.q_hi));
  if (!c.cov_r.empty()) line("covcheck.r", join(c.cov_r));
  if (!c.cov_u.empty()) line("covcheck.u", join(c.cov_u));
  if (!c.cov_v.empty()) line("covcheck.v", join(c.cov_v));
  return os.str();
}

void validate_for_command(const ExperimentConfig& c) {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(c.command + ": missing " + what);
  };
  const std::string& cmd = c.command;
  if (cmd == "classify" || cmd == "volatility-classify") {
    need(c.model.has_value(), "model.*");
    need(c.transform.has_value(), "transform.*");
    need(c.measure.has_value() || !c.sweep_dirac.empty(), "measure.* or sweep.dirac");
    if (cmd == "volatility-classify") need(c.z.has_value(), "z.*");
  } else if (cmd == "rank") {
    need(c.transform.has_value(), "transform.*");
    need(!c.levels.empty(), "levels");
  } else if (cmd == "clt") {
    need(c.model.has_value(), "model.*");
    need(!c.levels.empty(), "levels");
    need(c.n_values.size() >= 3, "n_values (at least 3)");
    need(c.replicates.has_value(), "run.replicates");
    need(c.seed.has_value(), "run.seed");
  } else if (cmd == "partial-sum") {
    need(c.model.has_value(), "model.*");
    need(c.alpha.has_value(), "psum.alpha");
    need(c.n_values.size() >= 3, "n_values (at least 3)");
    need(c.replicates.has_value(), "run.replicates");
    need(c.seed.has_value(), "run.seed");
  } else if (cmd == "cov-check") {
    need(!c.cov_r.empty(), "covcheck.r");
  }
}

}  // namespace xmem
