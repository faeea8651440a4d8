#pragma once

// Stationary Gaussian sequences and planar fields on the integer lattice by
// circulant embedding, their subordination X = G(Y), and stochastic
// volatility fields X = G(Y) Z with white noise Z.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xmem/covariance.hpp"
#include "xmem/transform.hpp"
#include "xmem/zdist.hpp"

namespace xmem {

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

enum class StreamPurpose : std::uint32_t { gaussian_field = 1, white_noise = 2, aux = 3 };

/// Engine for (master seed, stream, purpose). Distinct triples give unrelated
/// streams through std::seed_seq mixing; equal triples give equal streams.
std::mt19937_64 make_engine(const RngSpec& rng, StreamPurpose purpose);

struct Provenance {
  std::string model;
  std::vector<std::string> transforms;
  std::string z;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool gaussian = true;  // values are the Gaussian field itself

  bool operator==(const Provenance&) const = default;
};

/// Values on {0..n-1}^d, row-major for d = 2.
struct FieldSample {
  int dim = 1;
  int n = 0;
  double cell_volume = 1.0;
  std::vector<double> values;
  Provenance provenance;

  std::size_t size() const { return values.size(); }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
};

/// Circulant embedding of the covariance of an n (or n x n) window. The
/// spectrum and the FFT plan are computed once; sample() is const and may be
/// called concurrently.
class CirculantEmbedding {
 public:
  CirculantEmbedding(const CovarianceModel& model, int n);
  ~CirculantEmbedding();
  CirculantEmbedding(const CirculantEmbedding&) = delete;
  CirculantEmbedding& operator=(const CirculantEmbedding&) = delete;

  FieldSample sample(const RngSpec& rng) const;

  int n() const { return n_; }
  int dim() const { return model_.dim; }
  /// Side length of the embedding (2n .. 16n).
  int embedding_size() const { return m_; }
  /// Eigenvalues in (-1e-8 max, 0) that were set to zero.
  int clamped_count() const { return clamped_; }
  const CovarianceModel& model() const { return model_; }

 private:
  struct Plan;
  CovarianceModel model_;
  int n_ = 0;
  int m_ = 0;
  int clamped_ = 0;
  std::vector<double> scale_;  // sqrt(lambda / m^d)
  std::unique_ptr<Plan> plan_;
};

FieldSample simulate_gaussian_1d(int n, const CovarianceModel& model, const RngSpec& rng);
FieldSample simulate_gaussian_2d(int n, const CovarianceModel& model, const RngSpec& rng);

/// Pointwise X_t = G(Y_t). Requires a Gaussian sample.
FieldSample subordinate(const FieldSample& y, const Transform& g);

/// X_t = G(Y_t) Z_t, Z i.i.d. from `z` drawn from the white-noise stream of `rng`.
FieldSample volatility_field(const FieldSample& y, const Transform& g, const ZDistribution& z,
                             const RngSpec& rng);

/// P(X_0 > u) for X = G(Y) or X = G(Y) Z: closed form without Z, otherwise
/// E[P(G(Y) Z > u | Y)] by adaptive quadrature split at the kinks of F_Z.
double marginal_tail(const Transform& g, const std::optional<ZDistribution>& z, double u);

/// y -> P(G(y) Z > u), the conditional exceedance probability.
double conditional_exceedance(const Transform& g, const ZDistribution& z, double u, double y);

/// Points y where the conditional exceedance is not smooth.
std::vector<double> conditional_exceedance_breaks(const Transform& g, const ZDistribution& z,
                                                  double u);

}  // namespace xmem
