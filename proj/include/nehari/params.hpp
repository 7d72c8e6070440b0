#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

/// Raised for invalid user-supplied input (bad parameters, bad config).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical procedure fails to deliver its contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar parameters of the coupled system.
struct ModelParams {
  int n = 2;
  double p = 2.0;
  double s = 0.4;
  double q = 1.8;
  double alpha = 5.0 / 3.0;
  double beta = 5.0 / 3.0;
  double lambda = 0.0;
  double mu = 0.0;

  /// Critical exponent np/(n-ps).
  [[nodiscard]] double p_star() const { return n * p / (n - p * s); }
  /// Sum of the coupling exponents.
  [[nodiscard]] double ab() const { return alpha + beta; }
  /// True when alpha+beta equals p_star to 1e-12 relative.
  [[nodiscard]] bool critical() const;
  /// lambda^{p/(p-q)} + mu^{p/(p-q)}.
  [[nodiscard]] double sigma() const;

  /// Throws InputError naming the first violated invariant.
  void validate() const;

  /// Copy with lambda, mu replaced.
  [[nodiscard]] ModelParams with_lambda_mu(double l, double m) const {
    ModelParams out = *this;
    out.lambda = l;
    out.mu = m;
    return out;
  }
};

/// Per-parameter value giving lambda^{p/(p-q)} + mu^{p/(p-q)} = sigma at lambda = mu.
[[nodiscard]] double equal_split_parameter(const ModelParams& prm, double sigma);

}  // namespace nehari
