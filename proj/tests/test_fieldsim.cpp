#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "xmem/errors.hpp"
#include "xmem/fieldsim.hpp"
#include "xmem/numeric.hpp"
#include "xmem/sample_io.hpp"

using namespace xmem;

namespace {

constexpr std::uint64_t kSeed = 20261018;

// Mean of y_t y_{t+lag} for a zero-mean sequence.
double lag_product(const std::vector<double>& y, int lag) {
  double s = 0.0;
  for (std::size_t t = 0; t + lag < y.size(); ++t) s += y[t] * y[t + lag];
  return s / static_cast<double>(y.size() - lag);
}

double lag_product_2d(const FieldSample& f, int di, int dj) {
  double s = 0.0;
  int count = 0;
  for (int i = 0; i + di < f.n; ++i) {
    for (int j = 0; j + dj < f.n; ++j) {
      s += f.at(i, j) * f.at(i + di, j + dj);
      ++count;
    }
  }
  return s / count;
}

}  // namespace

TEST_CASE("engines are reproducible and stream-separated") {
  auto a = make_engine({kSeed, 7}, StreamPurpose::gaussian_field);
  auto b = make_engine({kSeed, 7}, StreamPurpose::gaussian_field);
  auto c = make_engine({kSeed, 8}, StreamPurpose::gaussian_field);
  auto d = make_engine({kSeed, 7}, StreamPurpose::white_noise);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("1-D white noise has no lag-1 correlation") {
  const auto model = CovarianceModel::white_noise(1);
  const CirculantEmbedding emb(model, 1024);
  double pooled = 0.0;
  for (int r = 0; r < 200; ++r) pooled += lag_product(emb.sample({kSeed, std::uint64_t(r)}).values, 1);
  pooled /= 200;
  CHECK(std::fabs(pooled) < 3.0 / std::sqrt(200.0 * 1024.0));
}

TEST_CASE("1-D Cauchy field: variance and lag-10 correlation") {
  const auto model = CovarianceModel::cauchy(0.4);
  const CirculantEmbedding emb(model, 4096);
  double var = 0.0, lag10 = 0.0;
  for (int r = 0; r < 100; ++r) {
    const auto y = emb.sample({kSeed, std::uint64_t(r)}).values;
    var += lag_product(y, 0);
    lag10 += lag_product(y, 10);
  }
  var /= 100;
  lag10 /= 100;
  const double expect = std::pow(101.0, -0.2);
  CHECK(std::fabs(var - 1.0) < 0.05);
  CHECK(std::fabs(lag10 - expect) < 0.03);
}

TEST_CASE("1-D embedding reproduces the model covariance matrix") {
  // 20000 replicates of a 64-point window; every entry within 4 standard errors.
  const auto model = CovarianceModel::cauchy(1.5);
  const int n = 64, reps = 20000;
  const CirculantEmbedding emb(model, n);
  std::vector<double> sum(n * n, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto y = emb.sample({kSeed, std::uint64_t(r)}).values;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) sum[i * n + j] += y[i] * y[j];
    }
  }
  int worst_i = 0, worst_j = 0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double rho = model.correlation(j - i);
      const double se = std::sqrt((1.0 + rho * rho) / reps);
      const double z = std::fabs(sum[i * n + j] / reps - rho) / se;
      if (z > worst) {
        worst = z;
        worst_i = i;
        worst_j = j;
      }
    }
  }
  INFO("worst entry (" << worst_i << ", " << worst_j << ") at " << worst << " standard errors");
  CHECK(worst < 4.0);
}

TEST_CASE("2-D fields: white noise, isotropy, and lag correlation") {
  SUBCASE("white noise") {
    const CirculantEmbedding emb(CovarianceModel::white_noise(2), 256);
    const int reps = 20;
    double nn = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto f = emb.sample({kSeed, std::uint64_t(r)});
      nn += 0.5 * (lag_product_2d(f, 1, 0) + lag_product_2d(f, 0, 1));
    }
    nn /= reps;
    CHECK(std::fabs(nn) < 3.0 / (256.0 * std::sqrt(double(reps))));
  }
  SUBCASE("Cauchy eta = 0.6") {
    const auto model = CovarianceModel::cauchy(0.6, 2);
    const CirculantEmbedding emb(model, 256);
    CHECK(emb.embedding_size() >= 512);
    CHECK(emb.embedding_size() <= 16 * 256);
    double a = 0.0, b = 0.0, c = 0.0;
    const int reps = 50;
    for (int r = 0; r < reps; ++r) {
      const auto f = emb.sample({kSeed, std::uint64_t(r)});
      a += lag_product_2d(f, 5, 0);
      b += lag_product_2d(f, 0, 5);
      c += lag_product_2d(f, 3, 4);
    }
    CHECK(std::fabs(a - b) / reps < 0.02);
    const double expect = std::pow(26.0, -0.3);
    CHECK(std::fabs(c / reps - expect) < 0.03);
  }
}

TEST_CASE("embedding sizes and failures") {
  // Slow 2-D decay needs a larger torus than the minimal 2n.
  const CirculantEmbedding slow(CovarianceModel::cauchy(0.3, 2), 64);
  CHECK(slow.embedding_size() > 128);
  CHECK(slow.embedding_size() <= 16 * 64);
  const CirculantEmbedding fast(CovarianceModel::exp_decay(1.0), 256);
  CHECK(fast.embedding_size() == 512);

  // A triangular correlation that drops to zero too sharply is not positive definite on the torus.
  const auto bad = CovarianceModel::user_grid({0.0, 1.0, 2.0, 3.0}, {1.0, 0.95, 0.0, 0.0});
  CHECK_THROWS_AS(CirculantEmbedding(bad, 64), NonEmbeddableError);
  CHECK_THROWS_AS(CirculantEmbedding(CovarianceModel::cauchy(0.5), 100), DomainError);
  CHECK_THROWS_AS(simulate_gaussian_2d(64, CovarianceModel::cauchy(0.5), {kSeed, 0}), DomainError);
}

TEST_CASE("identical RngSpec gives bit-identical samples") {
  const auto a = simulate_gaussian_1d(512, CovarianceModel::cauchy(0.7), {kSeed, 3});
  const auto b = simulate_gaussian_1d(512, CovarianceModel::cauchy(0.7), {kSeed, 3});
  const auto c = simulate_gaussian_1d(512, CovarianceModel::cauchy(0.7), {kSeed, 4});
  REQUIRE(a.values.size() == b.values.size());
  CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
  CHECK(a.values != c.values);
  CHECK(a.provenance == b.provenance);
}

TEST_CASE("subordination") {
  const auto y = simulate_gaussian_1d(4096, CovarianceModel::white_noise(1), {kSeed, 1});
  CHECK(subordinate(y, Transform::identity()).values == y.values);
  CHECK_FALSE(subordinate(y, Transform::identity()).provenance.gaussian);
  CHECK_THROWS_AS(subordinate(subordinate(y, Transform::identity()), Transform::identity()), DomainError);

  SUBCASE("heavy tail of exp_sq: empirical 99% quantile") {
    const auto x = subordinate(y, Transform::exp_sq(2.0));
    std::vector<double> v = x.values;
    std::sort(v.begin(), v.end());
    const double empirical = v[static_cast<std::size_t>(0.99 * (v.size() - 1))];
    // P(e^{Y^2/4} > q) = 0.01 at q = e^{z^2/4}, z the 0.995 normal quantile.
    const double z = 2.5758293035489004;
    const double q = std::exp(z * z / 4.0);
    CHECK(empirical > q / 1.5);
    CHECK(empirical < q * 1.5);
  }
  SUBCASE("even transforms ignore the sign of the input") {
    FieldSample flipped = y;
    for (double& v : flipped.values) v = -v;
    CHECK(subordinate(flipped, Transform::exp_sq(2.0)).values == subordinate(y, Transform::exp_sq(2.0)).values);
  }
  SUBCASE("pushforward CDF within the DKW band") {
    // One value per replicate of a long-memory field: i.i.d. draws of the marginal.
    const auto model = CovarianceModel::cauchy(0.4);
    const CirculantEmbedding emb(model, 64);
    const auto g = Transform::signed_exp(1.5);
    const int reps = 4000;
    std::vector<double> draws;
    for (int r = 0; r < reps; ++r) draws.push_back(subordinate(emb.sample({kSeed, std::uint64_t(r)}), g).values[17]);
    std::sort(draws.begin(), draws.end());
    const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * reps));
    for (double probe : {-10.0, -3.0, -1.0, -0.3, 0.0, 0.2, 0.8, 2.0, 5.0, 20.0}) {
      const double ecdf = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), probe) - draws.begin()) / reps;
      const double cdf = 1.0 - oracle::phibar(generalized_inverse(g, probe));
      CHECK(std::fabs(ecdf - cdf) < band);
    }
  }
}

TEST_CASE("volatility fields") {
  const auto gauss = ZDistribution::gaussian();
  SUBCASE("constant factor gives white noise") {
    FieldSample ones;
    ones.n = 1 << 14;
    ones.values.assign(ones.n, 1.0);
    const auto x = volatility_field(ones, Transform::identity(), gauss, {kSeed, 2});
    double m = 0.0;
    for (double v : x.values) m += v;
    m /= x.size();
    CHECK(std::fabs(m) < 4.0 / std::sqrt(double(x.size())));
    CHECK(std::fabs(lag_product(x.values, 1)) < 3.0 / std::sqrt(double(x.size())));
  }
  const auto model = CovarianceModel::cauchy(0.3);
  const CirculantEmbedding emb(model, 4096);
  const auto g = Transform::exp_sq(2.0);
  SUBCASE("symmetric signs") {
    const auto y = emb.sample({kSeed, 5});
    const auto x = volatility_field(y, g, gauss, {kSeed, 5});
    double pos = 0.0;
    for (double v : x.values) pos += v > 0;
    CHECK(std::fabs(pos / x.size() - 0.5) < 3.0 / (2.0 * std::sqrt(double(x.size()))));
  }
  SUBCASE("marginal exceedance matches quadrature") {
    const int reps = 100;
    std::vector<double> fractions;
    for (int r = 0; r < reps; ++r) {
      const RngSpec rng{kSeed, std::uint64_t(100 + r)};
      const auto x = volatility_field(emb.sample(rng), g, gauss, rng);
      double c = 0.0;
      for (double v : x.values) c += v > 1.0;
      fractions.push_back(c / x.size());
    }
    const auto m = sample_moments(fractions);
    const double se = std::sqrt(m.variance / reps);
    CHECK(std::fabs(m.mean - marginal_tail(g, gauss, 1.0)) < 3.0 * se);
  }
  SUBCASE("Y and Z streams are independent") {
    // G > 0, so sign(X) = sign(Z).
    double s = 0.0, s_abs = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < 20; ++r) {
      const RngSpec rng{kSeed, std::uint64_t(300 + r)};
      const auto y = emb.sample(rng);
      const auto x = volatility_field(y, g, gauss, rng);
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double sign = x.values[i] > 0 ? 1.0 : -1.0;
        s += y.values[i] * sign;
        s_abs += (std::fabs(y.values[i]) - std::sqrt(2.0 / std::numbers::pi)) * sign;
        ++count;
      }
    }
    // The i.i.d. sign factor decorrelates the products, so each mean has standard error <= 1/sqrt(N).
    CHECK(std::fabs(s / count) < 4.0 / std::sqrt(double(count)));
    CHECK(std::fabs(s_abs / count) < 4.0 / std::sqrt(double(count)));
  }
}

TEST_CASE("marginal tail") {
  CHECK(marginal_tail(Transform::identity(), std::nullopt, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(marginal_tail(Transform::exp_sq(2.0), std::nullopt, std::exp(0.25)) ==
        doctest::Approx(2.0 * oracle::phibar(1.0)).epsilon(1e-14));
  CHECK(2.0 * oracle::phibar(1.0) == doctest::Approx(0.3173105).epsilon(1e-7));
  CHECK(marginal_tail(Transform::exp_sq(2.0), ZDistribution::gaussian(), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(marginal_tail(Transform::exp_sq(2.0), ZDistribution::pareto(1.5, true), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  // Independent oracle for the volatility case: fixed-step quadrature of Phibar(u / G(y)).
  const auto g = Transform::exp_sq(2.0);
  const double ref = oracle::normal_expectation([&](double y) { return oracle::phibar(1.0 / g(y)); });
  CHECK(marginal_tail(g, ZDistribution::gaussian(), 1.0) == doctest::Approx(ref).epsilon(1e-10));
  // Pareto Z with unit-median modulus: P(|Z| > 1) = 1/2.
  const auto z = ZDistribution::pareto(1.5, true);
  CHECK(z.tail(1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(z.below(-1.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("sample files") {
  const auto s = simulate_gaussian_2d(32, CovarianceModel::cauchy(1.2, 2), {kSeed, 9});
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  write_binary(buf, s);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 32 + 8 * 32 * 32);
  CHECK(bytes.substr(0, 4) == "XMEM");
  std::uint32_t version = 0, d = 0, n = 0;
  std::uint64_t seed = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&d, bytes.data() + 8, 4);
  std::memcpy(&n, bytes.data() + 12, 4);
  std::memcpy(&seed, bytes.data() + 16, 8);
  CHECK(version == 1);
  CHECK(d == 2);
  CHECK(n == 32);
  CHECK(seed == kSeed);
  const auto back = read_binary(buf);
  CHECK(back.values == s.values);
  CHECK(back.dim == 2);

  std::istringstream junk("XMEQ this is not a sample");
  CHECK_THROWS_AS(read_binary(junk), DomainError);

  std::ostringstream csv;
  write_csv(csv, s);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 32);
}
