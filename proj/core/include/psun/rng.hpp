#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace psun {

// Mixes a 64-bit value into a well-separated stream seed (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded random stream with the scalar samplers the library needs.
//
// All transforms are implemented here (polar normals, Marsaglia-Tsang gamma,
// Michael-Schucany-Haas inverse Gaussian) so that a given seed produces the
// same draw sequence on every platform; only the mt19937_64 engine comes from
// the standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(mix_seed(seed)) {}

  // Independent child stream, e.g. one per chain or per simulation rep.
  static RngStream child(std::uint64_t seed, std::uint64_t stream) {
    return RngStream(mix_seed(seed) ^ mix_seed(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the open interval (0,1); never returns an exact 0 or 1.
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log(uniform()) / rate;
  }

  // Gamma(shape, rate); Marsaglia-Tsang for shape >= 1, boost for shape < 1.
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("gamma: shape and rate must be > 0");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  double inverse_gamma(double shape, double scale) {
    return scale / gamma(shape, 1.0);
  }

  double chi_squared(double df) { return gamma(0.5 * df, 0.5); }

  // Inverse Gaussian with mean mu and shape lambda.
  double inverse_gaussian(double mu, double lambda) {
    if (!(mu > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("inverse_gaussian: mu and lambda must be > 0");
    const double n = normal();
    const double y = n * n;
    const double x = mu + 0.5 * mu * mu * y / lambda -
                     0.5 * (mu / lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    if (uniform() <= mu / (mu + x)) return x;
    return mu * mu / x;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace psun
