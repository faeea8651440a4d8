// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   xmem_acceptance [artifact_dir]
//
// Stochastic criteria go through the same command path as the CLI and their
// CSV artifacts are written to artifact_dir (default: ./acceptance_artifacts).
// Every stochastic run is executed twice; criterion 13 compares the bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <valarray>
#include <vector>

#include "xmem/bigauss.hpp"
#include "xmem/commands.hpp"
#include "xmem/config.hpp"
#include "xmem/excursion.hpp"
#include "xmem/hermite.hpp"
#include "xmem/memory.hpp"
#include "xmem/numeric.hpp"

using namespace xmem;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20261018;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double phibar(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// CSV rows keyed by column name.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static Csv parse(const std::string& text) {
    Csv c;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
      if (!line.empty() && line.back() == ',') cells.emplace_back();
      (first ? c.header : c.rows.emplace_back()) = cells;
      first = false;
    }
    return c;
  }
  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("missing column " + name);
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row].at(col(name))); }
  // First row whose `key` column equals `value`.
  std::size_t find(const std::string& key, const std::string& value, std::size_t from = 0) const {
    for (std::size_t i = from; i < rows.size(); ++i)
      if (rows[i].at(col(key)) == value) return i;
    throw std::runtime_error("no row with " + key + " = " + value);
  }
};

class Runner {
 public:
  explicit Runner(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  // Runs a config twice, stores the first artifact on disk and records
  // whether the second run reproduced it byte for byte.
  Csv stochastic(const std::string& name, const std::string& config_text) {
    ExperimentConfig c = parse_config(config_text);
    c.threads = int(std::max(1u, std::thread::hardware_concurrency()));
    validate_for_command(c);
    const Artifact a = execute(c);
    const Artifact b = execute(c);
    const fs::path path = dir_ / (name + "." + a.extension);
    write_atomic(path, a.text);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream disk;
    disk << in.rdbuf();
    reruns_[name] = disk.str() == b.text;
    return Csv::parse(a.text);
  }

  const std::map<std::string, bool>& reruns() const { return reruns_; }

 private:
  fs::path dir_;
  std::map<std::string, bool> reruns_;
};

// 1
Outcome orthant_identity() {
  Outcome o;
  double worst = 0.0;
  for (double r : {-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    worst = std::max(worst, std::fabs(indicator_cov_integral({r, 0.0, 0.0}) - std::asin(r) / (2 * std::numbers::pi)));
  }
  o.require(worst < 1e-8, "max error above 1e-8");
  o.note(fmt("max |err| %.1e", worst));
  return o;
}

// 2
Outcome cross_form() {
  Outcome o;
  double worst_series = 0.0, worst_oracle = 0.0;
  for (int i = -9; i <= 9; ++i) {
    const double r = 0.1 * i;
    for (int u = -2; u <= 2; ++u) {
      for (int v = -2; v <= 2; ++v) {
        const double integral = indicator_cov_integral({r, double(u), double(v)});
        const double series = indicator_cov_series_adaptive({r, double(u), double(v)}).value;
        const double oracle = orthant_oracle(r, u, v) - phibar(u) * phibar(v);
        worst_series = std::max(worst_series, std::fabs(integral - series));
        worst_oracle = std::max(worst_oracle, std::fabs(integral - oracle));
      }
    }
  }
  o.require(worst_series < 1e-10, "integral vs series above 1e-10");
  o.require(worst_oracle < 1e-8, "integral vs oracle above 1e-8");
  o.note(fmt("max |int-series| %.1e, max |int-oracle| %.1e", worst_series, worst_oracle));
  return o;
}

// 3
Outcome hoeffding() {
  Outcome o;
  for (double r : {-0.4, 0.0, 0.6}) {
    const double got = hoeffding_reconstruct(r, 8.0, 0.05);
    o.require(std::fabs(got - r) < 1e-4, fmt("r = %g reconstructed as %.6f", r, got));
    o.note(fmt("r=%g: err %.1e", r, got - r));
  }
  return o;
}

// 4
Outcome hermite_orthogonality() {
  Outcome o;
  constexpr int kMax = 12;
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j <= kMax; ++j)
    for (int k = j; k <= kMax; ++k) pairs.emplace_back(j, k);
  auto integrand = [&](long double x) {
    long double h[kMax + 1];
    h[0] = 1.0L;
    h[1] = x;
    for (int n = 1; n < kMax; ++n) h[n + 1] = x * h[n] - n * h[n - 1];
    std::valarray<long double> out(pairs.size());
    const long double w = normal_pdf(x);
    for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = h[pairs[i].first] * h[pairs[i].second] * w;
    return out;
  };
  const QuadratureSpec quad;
  const auto r = adaptive_simpson_vec(integrand, pairs.size(), -quad.domain_halfwidth, quad.domain_halfwidth,
                                      (quad.node_count - 1) / 2, quad.rel_tol, 0.0);
  long double worst = 0.0L;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [j, k] = pairs[i];
    const long double exact = j == k ? std::tgamma(k + 1.0L) : 0.0L;
    worst = std::max(worst, std::fabs(r[i].value - exact));
  }
  o.require(worst < 1e-8L, "orthogonality error above 1e-8");

  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> xs(-6.0, 6.0);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng);
    for (int n = 1; n <= 20; ++n) {
      const double hn = hermite_eval(n, x);
      const double scale = std::fabs(hn) + std::fabs(x * hermite_eval(n - 1, x)) + 1.0;
      if (std::fabs(hermite_eval(n, -x) - (n % 2 ? -hn : hn)) > 1e-12 * scale) ++bad;
      if (std::fabs(hermite_eval(n + 1, x) - (x * hn - n * hermite_eval(n - 1, x))) >
          1e-12 * (std::fabs(x * hn) + n * std::fabs(hermite_eval(n - 1, x)) + 1.0))
        ++bad;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " parity/recurrence mismatches");
  o.note(fmt("max orthogonality err %.1e, 100 random points", double(worst)));
  return o;
}

// 5
Outcome stirling_ratio() {
  Outcome o;
  const double at100 = half_factorial_ratio(100) * std::sqrt(std::numbers::pi * 100);
  o.require(at100 > 0.997 && at100 < 1.0, fmt("ratio at 100 = %.6f", at100));
  bool increasing = true;
  for (int k = 1; k < 100; ++k) {
    increasing = increasing && half_factorial_ratio(k + 1) * std::sqrt(std::numbers::pi * (k + 1)) >
                                   half_factorial_ratio(k) * std::sqrt(std::numbers::pi * k);
  }
  o.require(increasing, "not increasing on 1..100");
  o.note(fmt("ratio(100) sqrt(100 pi) = %.6f", at100));
  return o;
}

// 6
Outcome example_threshold() {
  Outcome o;
  const std::vector<std::pair<double, Verdict>> expect{
      {0.2, Verdict::LRD}, {0.4, Verdict::LRD}, {0.5, Verdict::BOUNDARY}, {0.6, Verdict::SRD}, {0.8, Verdict::SRD}};
  std::string line;
  for (double alpha : {1.5, 3.0}) {
    for (const auto& [eta, want] : expect) {
      const auto v = classify_subordinated(Transform::exp_sq(alpha), CovarianceModel::cauchy(eta),
                                           FiniteMeasure::dirac(2.0));
      o.require(v.verdict == want, fmt("alpha %g eta %g: ", alpha, eta) + to_string(v.verdict));
      if (alpha == 1.5) line += fmt("%g:", eta) + to_string(v.verdict) + " ";
    }
  }
  o.note(line + "(same for alpha 3)");
  return o;
}

// 7
Outcome rank_suite() {
  Outcome o;
  auto centred = [](const Transform& g) {
    const double mean = gaussian_expectation([&](double y) { return g(y); }).value;
    return std::function<double(double)>([g, mean](double y) { return g(y) - mean; });
  };
  for (const Transform& g : {Transform::identity(), Transform::signed_exp(2.0), Transform::signed_exp(3.0)}) {
    const auto r = hermite_rank(centred(g), 12);
    o.require(r.rank == 1, g.label() + " centred: rank not 1");
  }
  for (const Transform& g : {Transform::exp_sq(1.5), Transform::exp_sq(3.0), Transform::abs_exp_sq(2.0)}) {
    const auto r = hermite_rank(centred(g), 12);
    o.require(r.rank == 2, g.label() + " centred: rank not 2");
    // Indicator at a level whose preimage is away from 0.
    const auto xi = xi_and_rank(g, std::nullopt, g(1.3), CovarianceModel::cauchy(0.3));
    o.require(xi.q == 2, g.label() + " indicator: rank not 2");
  }
  int zero_cases = 0;
  for (const auto& z : {ZDistribution::pareto(1.5, true), ZDistribution::gaussian(), ZDistribution::rademacher()}) {
    const auto xi = xi_and_rank(Transform::abs_exp_sq(2.0), z, 0.0, CovarianceModel::cauchy(0.3), 12);
    double worst = 0.0;
    for (std::size_t k = 1; k < xi.rank.coefficients.size(); ++k) worst = std::max(worst, std::fabs(xi.rank.coefficients[k]));
    o.require(xi.xi_zero && worst < 1e-7, "xi at u = 0 has a coefficient above tol");
    ++zero_cases;
  }
  o.note("monotone -> 1, even -> 2, xi(u=0) = 0 for " + std::to_string(zero_cases) + " symmetric Z");
  return o;
}

// 8
Outcome classifier_vs_direct() {
  Outcome o;
  const auto mu = FiniteMeasure::dirac(0.0);
  const auto v = classify_subordinated(Transform::identity(), CovarianceModel::cauchy(3.0), mu);
  const auto direct = sigma2_numeric([](double t) { return std::pow(1.0 + t * t, -1.5); }, mu, 200.0, 0.01);
  const double d = direct.value + direct.tail_estimate;
  const double rel = std::fabs(v.series_value - d) / d;
  o.require(v.verdict == Verdict::SRD, "not SRD");
  o.require(rel < 1e-3, fmt("relative difference %.2e", rel));
  o.note(fmt("series %.8f direct %.8f rel %.1e", v.series_value, d, rel));
  return o;
}

std::string clt_config(const std::string& id, const std::string& model, const std::string& transform,
                       const std::string& z, const std::string& levels) {
  return "command = clt\nexperiment_id = " + id + "\n" + model + transform + z + "levels = " + levels +
         "\nn_values = 1024, 2048, 4096, 8192, 16384\nrun.replicates = 500\nrun.seed = " + std::to_string(kSeed) +
         "\n";
}

// 9
Outcome clt_regime(Runner& run) {
  Outcome o;
  const Csv c = run.stochastic("clt_white_noise",
                               clt_config("white_noise", "model.family = white_noise\n",
                                          "transform.name = identity\n", "", "0"));
  const std::size_t big = c.find("n", "16384");
  const double var = c.num(big, "variance"), kurt = c.num(big, "kurtosis");
  const std::size_t s = c.find("n", "summary");
  const double e = c.num(s, "exponent");
  o.require(std::fabs(var - 0.25) <= 0.05 * 0.25, fmt("variance %.4f outside 0.25 +- 5%%", var));
  o.require(std::fabs(kurt) <= 0.3, fmt("excess kurtosis %.3f outside +-0.3", kurt));
  o.require(std::fabs(e - 1.0) <= 0.1, fmt("exponent %.3f outside 1 +- 0.1", e));
  o.note(fmt("var %.4f, kurtosis %.3f, exponent %.3f", var, kurt, e) +
         fmt(" +- %.3f", c.num(s, "exponent_stderr")));
  return o;
}

// 10
Outcome rank_one_regime(Runner& run) {
  Outcome o;
  const Csv c = run.stochastic("clt_rank1", clt_config("rank1", "model.family = cauchy\nmodel.eta = 0.4\n",
                                                       "transform.name = identity\n", "", "1"));
  const std::size_t s = c.find("n", "summary");
  const double e = c.num(s, "exponent");
  o.require(std::fabs(e - 1.6) <= 0.15, fmt("exponent %.3f outside 1.6 +- 0.15", e));
  o.note(fmt("exponent %.3f +- %.3f (predicted %.2f)", e, c.num(s, "exponent_stderr"), c.num(s, "predicted_exponent")));
  return o;
}

// 11
Outcome volatility_dichotomy(Runner& run) {
  Outcome o;
  const Csv c = run.stochastic(
      "clt_volatility",
      clt_config("volatility", "model.family = cauchy\nmodel.eta = 0.3\n", "transform.name = abs_exp_sq\ntransform.param = 2\n",
                 "z.family = pareto\nz.alpha = 1.5\nz.symmetric = true\n", "0, 1"));
  const std::size_t s0 = c.find("n", "summary");
  const std::size_t s1 = c.find("n", "summary", s0 + 1);
  const double e0 = c.num(s0, "exponent"), e1 = c.num(s1, "exponent");
  o.require(std::fabs(e0 - 1.0) <= 0.1, fmt("u=0 exponent %.3f outside 1 +- 0.1", e0));
  o.require(std::fabs(e1 - 1.4) <= 0.2, fmt("u=1 exponent %.3f outside 1.4 +- 0.2", e1));
  o.note(fmt("u=0: %.3f +- %.3f", e0, c.num(s0, "exponent_stderr")) +
         fmt(", u=1: %.3f +- %.3f", e1, c.num(s1, "exponent_stderr")));
  return o;
}

// 12. Windows start at 2^12: below that the eta = 0.2 sum is still crossing
// over from the stable to the Rosenblatt scaling and the IQR slope overshoots.
Outcome partial_sum_regimes(Runner& run) {
  Outcome o;
  for (const auto& [eta, want] : {std::pair{0.8, 1.0 / 1.5}, std::pair{0.2, 0.8}}) {
    const std::string id = eta > 0.5 ? "psum_stable" : "psum_rosenblatt";
    const Csv c = run.stochastic(id, "command = partial-sum\nexperiment_id = " + id +
                                         "\nmodel.family = cauchy\nmodel.eta = " + fmt("%g", eta) +
                                         "\npsum.alpha = 1.5\nn_values = 4096, 8192, 16384, 32768, 65536, "
                                         "131072, 262144\nrun.replicates = 500\nrun.seed = " + std::to_string(kSeed) + "\n");
    const std::size_t s = c.find("n", "summary");
    const double th = c.num(s, "exponent");
    o.require(std::fabs(th - want) <= 0.1, fmt("eta %g: theta %.3f outside %.3f +- 0.1", eta, th, want));
    o.note(fmt("eta %g: theta %.3f", eta, th) + fmt(" +- %.3f", c.num(s, "exponent_stderr")));
  }
  return o;
}

// 13
Outcome determinism(const Runner& run) {
  Outcome o;
  for (const auto& [name, same] : run.reruns()) o.require(same, name + " differs on rerun");
  o.require(run.reruns().size() == 5, "expected 5 stochastic artifacts");
  o.note(std::to_string(run.reruns().size()) + " artifacts compared byte for byte");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  Runner runner(argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts"));
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "orthant identity", 1, orthant_identity},
      {2, "cross-form equivalence", 10, cross_form},
      {3, "Hoeffding reconstruction", 30, hoeffding},
      {4, "Hermite orthogonality, parity, recurrence", 5, hermite_orthogonality},
      {5, "half-factorial Stirling ratio", 1, stirling_ratio},
      {6, "exp_sq threshold at d/2", 10, example_threshold},
      {7, "Hermite rank suite", 10, rank_suite},
      {8, "classifier vs direct integral", 30, classifier_vs_direct},
      {9, "CLT regime, white noise", 2 * 120, [&] { return clt_regime(runner); }},
      {10, "non-CLT regime, rank 1", 2 * 300, [&] { return rank_one_regime(runner); }},
      {11, "volatility dichotomy", 2 * 300, [&] { return volatility_dichotomy(runner); }},
      {12, "partial-sum regimes", 2 * 300, [&] { return partial_sum_regimes(runner); }},
      {13, "determinism", 1, [&] { return determinism(runner); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) o.require(false, fmt("runtime %.1f s over %.0f s", secs, c.limit_s));
    failed += !o.pass;
    std::printf("%s %2d %-42s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
