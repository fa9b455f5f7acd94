#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "nestmc/errors.hpp"
#include "nestmc/linalg.hpp"
#include "nestmc/rng.hpp"

namespace nestmc {

// Inverse of the standard normal CDF, Wichura's algorithm AS 241 (PPND16).
// Relative accuracy about 1e-16 over (0,1). Used instead of rejection
// sampling so that every normal draw consumes exactly one uniform, keeping
// stream consumption deterministic.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidParameter("normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

// --- scalar distributions ------------------------------------------------

struct Constant {
  double value = 0.0;
  double sample(RngStream&) const { return value; }
};

struct Uniform01 {
  double sample(RngStream& rng) const { return rng.uniform(); }
};

struct Bernoulli {
  double p = 0.5;
  explicit Bernoulli(double prob) : p(prob) {
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidParameter("Bernoulli: p must lie in [0,1]");
  }
  double sample(RngStream& rng) const { return rng.uniform() < p ? 1.0 : 0.0; }
};

struct Normal {
  double mean = 0.0;
  double stddev = 1.0;
  Normal(double mu, double sigma) : mean(mu), stddev(sigma) {
    if (!(stddev > 0.0)) throw InvalidParameter("Normal: stddev must be > 0");
  }
  double sample(RngStream& rng) const {
    return mean + stddev * normal_quantile(rng.uniform());
  }
};

struct LogNormal {
  Normal underlying;
  LogNormal(double mu, double sigma) : underlying(mu, sigma) {}
  double sample(RngStream& rng) const { return std::exp(underlying.sample(rng)); }
};

using ScalarDist = std::variant<Constant, Uniform01, Bernoulli, Normal, LogNormal>;

inline double draw(const ScalarDist& dist, RngStream& rng) {
  return std::visit([&](const auto& d) { return d.sample(rng); }, dist);
}

// --- multivariate normal --------------------------------------------------

// Mean vector plus SPD covariance with a cached lower Cholesky factor.
struct MvnSpec {
  std::vector<double> mean;
  Matrix covariance;
  Matrix chol_lower;

  MvnSpec(std::vector<double> mu, Matrix cov)
      : mean(std::move(mu)), covariance(std::move(cov)) {
    if (covariance.rows != covariance.cols || covariance.rows != mean.size())
      throw DimensionMismatch("MvnSpec: covariance must be n x n with n = |mean|");
    chol_lower = cholesky(covariance);
  }

  std::size_t dim() const { return mean.size(); }

  std::vector<double> sample(RngStream& rng) const {
    const std::size_t n = dim();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = normal_quantile(rng.uniform());
    std::vector<double> out(mean);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += chol_lower(i, j) * z[j];
      out[i] += s;
    }
    return out;
  }
};

inline std::vector<double> draw(const MvnSpec& dist, RngStream& rng) {
  return dist.sample(rng);
}

// Componentwise exp of a multivariate normal draw; parameterized by the
// mean/covariance of the underlying normal.
struct LogNormalMvn {
  MvnSpec underlying;
  explicit LogNormalMvn(MvnSpec spec) : underlying(std::move(spec)) {}

  std::vector<double> sample(RngStream& rng) const {
    std::vector<double> v = underlying.sample(rng);
    for (double& x : v) x = std::exp(x);
    return v;
  }
};

inline std::vector<double> draw(const LogNormalMvn& dist, RngStream& rng) {
  return dist.sample(rng);
}

}  // namespace nestmc
