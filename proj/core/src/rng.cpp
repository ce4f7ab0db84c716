#include "hawkesnet/rng.hpp"

#include <cmath>
#include <stdexcept>


namespace hawkesnet {

namespace {

std::int64_t poisson_inversion(CounterRng& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p < 1e-300 && k > mean) break;
  }
  return k;
}

// Hormann (1993), transformed rejection with squeeze.
std::int64_t poisson_ptrs(CounterRng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream)
    : key_(mix64(seed + 0x632be59bd9b4e019ULL)) {
  for (std::uint64_t s : stream) key_ = mix64(key_ ^ mix64(s + 0x8cb92ba72f3d8dd7ULL));
}

std::int64_t CounterRng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(*this, mean);
  return poisson_ptrs(*this, mean);
}

}  // namespace hawkesnet
