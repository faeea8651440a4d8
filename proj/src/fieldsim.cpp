#include "xmem/fieldsim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "xmem/errors.hpp"
#include "xmem/numeric.hpp"

namespace xmem {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* data = nullptr;
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

fftw_plan make_plan(int dim, int m, fftw_complex* buf) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  return dim == 1 ? fftw_plan_dft_1d(m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE)
                  : fftw_plan_dft_2d(m, m, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
}

void destroy_plan(fftw_plan p) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(p);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::mt19937_64 make_engine(const RngSpec& rng, StreamPurpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng.master_seed),
                    static_cast<std::uint32_t>(rng.master_seed >> 32),
                    static_cast<std::uint32_t>(rng.stream_id),
                    static_cast<std::uint32_t>(rng.stream_id >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

struct CirculantEmbedding::Plan {
  fftw_plan plan = nullptr;
  std::size_t length = 0;
};

CirculantEmbedding::CirculantEmbedding(const CovarianceModel& model, int n)
    : model_(model), n_(n), plan_(std::make_unique<Plan>()) {
  model_.validate();
  if (!is_power_of_two(n) || n < 2) throw DomainError("circulant embedding: n must be a power of two >= 2");
  const int d = model_.dim;
  if (model_.family == CovFamily::white_noise) {
    m_ = n;
    return;
  }
  for (int m = 2 * n; m <= 16 * n; m *= 2) {
    const std::size_t len = d == 1 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m) * m;
    FftwBuffer buf(len);
    fftw_plan plan = make_plan(d, m, buf.data);
    auto fold = [m](int j) { return std::min(j, m - j); };
    if (d == 1) {
      for (int j = 0; j < m; ++j) {
        buf.data[j][0] = model_.correlation(fold(j));
        buf.data[j][1] = 0.0;
      }
    } else {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const std::size_t at = static_cast<std::size_t>(i) * m + j;
          buf.data[at][0] = model_.correlation(std::hypot(fold(i), fold(j)));
          buf.data[at][1] = 0.0;
        }
      }
    }
    fftw_execute(plan);
    double top = 0.0, bottom = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      top = std::max(top, buf.data[i][0]);
      bottom = std::min(bottom, buf.data[i][0]);
    }
    if (bottom < -1e-8 * top) {
      destroy_plan(plan);
      continue;
    }
    m_ = m;
    clamped_ = 0;
    scale_.resize(len);
    const double norm = static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) {
      double lambda = buf.data[i][0];
      if (lambda < 0.0) {
        lambda = 0.0;
        ++clamped_;
      }
      scale_[i] = std::sqrt(lambda / norm);
    }
    plan_->plan = plan;
    plan_->length = len;
    return;
  }
  std::ostringstream os;
  os << "circulant embedding of " << model_.describe() << " for n=" << n
     << " has negative eigenvalues up to size " << 16 * n;
  throw NonEmbeddableError(os.str());
}

CirculantEmbedding::~CirculantEmbedding() {
  if (plan_ && plan_->plan) destroy_plan(plan_->plan);
}

FieldSample CirculantEmbedding::sample(const RngSpec& rng) const {
  const int d = model_.dim;
  FieldSample out;
  out.dim = d;
  out.n = n_;
  out.provenance.model = model_.describe();
  out.provenance.seed = rng.master_seed;
  out.provenance.stream = rng.stream_id;
  out.provenance.gaussian = true;
  const std::size_t count = d == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
  out.values.resize(count);

  auto engine = make_engine(rng, StreamPurpose::gaussian_field);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (model_.family == CovFamily::white_noise) {
    for (auto& v : out.values) v = normal(engine);
    return out;
  }
  FftwBuffer buf(plan_->length);
  for (std::size_t i = 0; i < plan_->length; ++i) {
    const double re = normal(engine);
    const double im = normal(engine);
    buf.data[i][0] = scale_[i] * re;
    buf.data[i][1] = scale_[i] * im;
  }
  fftw_execute_dft(plan_->plan, buf.data, buf.data);
  if (d == 1) {
    for (int j = 0; j < n_; ++j) out.values[j] = buf.data[j][0];
  } else {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        out.values[static_cast<std::size_t>(i) * n_ + j] =
            buf.data[static_cast<std::size_t>(i) * m_ + j][0];
      }
    }
  }
  return out;
}

FieldSample simulate_gaussian_1d(int n, const CovarianceModel& model, const RngSpec& rng) {
  if (model.dim != 1) throw DomainError("simulate_gaussian_1d: model dimension must be 1");
  return CirculantEmbedding(model, n).sample(rng);
}

FieldSample simulate_gaussian_2d(int n, const CovarianceModel& model, const RngSpec& rng) {
  if (model.dim != 2) throw DomainError("simulate_gaussian_2d: model dimension must be 2");
  return CirculantEmbedding(model, n).sample(rng);
}

FieldSample subordinate(const FieldSample& y, const Transform& g) {
  if (!y.provenance.gaussian) throw DomainError("subordinate: input is not a Gaussian sample");
  FieldSample x = y;
  for (auto& v : x.values) v = g(v);
  x.provenance.gaussian = false;
  x.provenance.transforms.push_back(g.label());
  return x;
}

FieldSample volatility_field(const FieldSample& y, const Transform& g, const ZDistribution& z,
                             const RngSpec& rng) {
  if (!y.provenance.gaussian) throw DomainError("volatility_field: input is not a Gaussian sample");
  auto engine = make_engine(rng, StreamPurpose::white_noise);
  FieldSample x = y;
  for (auto& v : x.values) v = g(v) * z.sample(engine);
  x.provenance.gaussian = false;
  x.provenance.transforms.push_back(g.label());
  x.provenance.z = z.describe();
  return x;
}

double conditional_exceedance(const Transform& g, const ZDistribution& z, double u, double y) {
  const double s = g(y);
  if (s > 0.0) return z.tail(u / s);
  if (s < 0.0) return z.below(u / s);
  return u < 0.0 ? 1.0 : 0.0;
}

std::vector<double> conditional_exceedance_breaks(const Transform& g, const ZDistribution& z,
                                                  double u) {
  std::vector<double> out;
  for (double kink : z.kinks()) {
    if (kink == 0.0 || u == 0.0) continue;
    const double level = u / kink;
    if (!in_image_closure(g, level)) continue;
    const double x = generalized_inverse(g, level);
    if (!std::isfinite(x)) continue;
    out.push_back(x);
    if (g.kind() == TransformKind::even_composed && x != 0.0) out.push_back(-x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double marginal_tail(const Transform& g, const std::optional<ZDistribution>& z, double u) {
  if (!z) {
    if (u < g.image_lo()) return 1.0;
    if (u >= g.image_hi()) return 0.0;
    const double x = generalized_inverse(g, u);
    switch (g.kind()) {
      case TransformKind::monotone_increasing: return normal_tail(x);
      case TransformKind::monotone_decreasing: return normal_cdf(x);
      case TransformKind::even_composed: return 2.0 * normal_tail(x);
    }
    return 0.0;
  }
  const auto breaks = conditional_exceedance_breaks(g, *z, u);
  auto f = [&](long double y) -> long double {
    return conditional_exceedance(g, *z, u, static_cast<double>(y)) * normal_pdf(y);
  };
  const QuadResult q = adaptive_simpson(f, -12.0, 12.0, 200, 1e-12, 1e-13, breaks);
  if (!q.converged) throw QuadratureError("marginal_tail: quadrature did not converge");
  return q.value;
}

}  // namespace xmem
