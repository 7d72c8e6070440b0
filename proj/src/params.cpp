#include "nehari/params.hpp"

#include <cmath>

namespace nehari {

bool ModelParams::critical() const {
  const double ps = p_star();
  return std::abs(ab() - ps) <= 1e-12 * std::abs(ps);
}

double ModelParams::sigma() const {
  const double e = p / (p - q);
  return std::pow(lambda, e) + std::pow(mu, e);
}

void ModelParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (n < 1) throw InputError("params.n must be a positive integer");
  if (!finite(p) || p <= 1.0) throw InputError("params.p must be > 1");
  if (!finite(s) || s <= 0.0 || s >= 1.0) throw InputError("params.s must lie in (0,1)");
  if (!(n > p * s)) throw InputError("params: n > p*s is required");
  if (!finite(alpha) || alpha <= 1.0) throw InputError("params.alpha must be > 1");
  if (!finite(beta) || beta <= 1.0) throw InputError("params.beta must be > 1");
  if (!finite(q) || !(q > 1.0 && q < p)) throw InputError("params: 1 < q < p is required");
  if (!(p < ab())) throw InputError("params: p < alpha+beta is required");
  if (!finite(lambda) || lambda < 0.0) throw InputError("params.lambda must be >= 0");
  if (!finite(mu) || mu < 0.0) throw InputError("params.mu must be >= 0");
}

double equal_split_parameter(const ModelParams& prm, double sigma) {
  return std::pow(sigma / 2.0, (prm.p - prm.q) / prm.p);
}

}  // namespace nehari
