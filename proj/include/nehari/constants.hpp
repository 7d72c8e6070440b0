#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"

namespace nehari {

/// Raised when a quotient descent does not converge; carries the last iterate.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last)
      : NumericalError(what), last_iterate(std::move(last)) {}
  std::vector<double> last_iterate;
};

/// Settings of the Rayleigh quotient descent.
struct QuotientOptions {
  double tol = 1e-6;         ///< relative flatness over the stall window
  int restarts = 10;
  int max_iterations = 20000;
  int stall_window = 20;
};

/// Outcome of one quotient minimization.
struct QuotientResult {
  double value = 0.0;
  std::vector<double> minimizer;  ///< nonnegative, unit denominator
  int iterations = 0;             ///< accepted iterations summed over restarts
  std::vector<double> restart_values;
};

/// 0-homogeneous quotient together with a map onto its unit-denominator set.
struct QuotientProblem {
  std::function<double(std::span<const double>, std::vector<double>*)> eval;
  std::function<void(std::vector<double>&)> normalize;
};

/// Single Barzilai-Borwein descent run with Armijo backtracking from x0.
[[nodiscard]] QuotientResult minimize_quotient(const QuotientProblem& f, std::vector<double> x0,
                                               const QuotientOptions& opts);

/// Flags for each clause of the main theorem's hypotheses.
struct HypothesesFlags {
  bool p2s_lt_n = false;           ///< p^2 s < n
  bool p_lt_2_bound = false;       ///< n < ps/(2-p) when p < 2 (true when p >= 2)
  bool q_range = false;            ///< n(p-1)/(n-ps) <= q < p
  bool critical = false;           ///< alpha+beta = p_star
  bool q_above_threshold = false;  ///< q > n(p-1)/(n-ps), the strict q-condition
  [[nodiscard]] bool all() const { return p2s_lt_n && p_lt_2_bound && q_range && critical; }
};

/// Bracket and value of the positive lower bound on N- energies.
struct D0Bound {
  double value = 0.0;
  double bracket = 0.0;
  double norm_lower_bound = 0.0;
  bool smallness_ok = false;  ///< sigma < (q/p)^{p/(p-q)} Lambda_1
};

struct ConstantsReport {
  double S_d = 0.0;
  double S_ab_d = 0.0;
  double ratio_predicted = 0.0;
  double ratio_error = 0.0;
  double volume = 0.0;
  double lambda1 = 0.0;
  double smallness_threshold = 0.0;  ///< (q/p)^{p/(p-q)} Lambda_1
  double C0 = 0.0;
  double C0_hat_route = 0.0;
  double c_infty = 0.0;
  double c_infty_zero = 0.0;  ///< c_infty at lambda = mu = 0
  D0Bound d0;
  double sigma = 0.0;
  bool lambda1_ok = false;  ///< sigma < Lambda_1
  bool critical = false;
  HypothesesFlags hypotheses;
  int iterations_S = 0;
  int iterations_S_ab = 0;
};

/// Rayleigh quotient [u]^p / (int |u|^{p*})^{p/p*}.
[[nodiscard]] double sobolev_quotient(const GridDomain& dom, const ModelParams& prm, std::span<const double> u);
/// Pair quotient ||(u,v)||^p / (int |u|^alpha |v|^beta)^{p/(alpha+beta)}.
[[nodiscard]] double pair_quotient(const GridDomain& dom, const ModelParams& prm, const FieldPair& pair);

[[nodiscard]] QuotientResult compute_S(const GridDomain& dom, const ModelParams& prm, std::uint64_t seed,
                                       const QuotientOptions& opts = {});
/// Pair quotient descent; the minimizer is stored as u followed by v. Optional
/// starting pairs are used before the random restarts.
[[nodiscard]] QuotientResult compute_S_alpha_beta(const GridDomain& dom, const ModelParams& prm, std::uint64_t seed,
                                                  const QuotientOptions& opts = {},
                                                  const std::vector<FieldPair>& starts = {});

[[nodiscard]] double ratio_predicted(const ModelParams& prm);
[[nodiscard]] double ratio_check(double S_d, double S_ab_d, const ModelParams& prm);

/// Minimizer x0 and minimum of g(x) = x^{p beta/(alpha+beta)} + x^{-p alpha/(alpha+beta)}.
[[nodiscard]] std::pair<double, double> g_min(const ModelParams& prm);
[[nodiscard]] double g_function(const ModelParams& prm, double x);

[[nodiscard]] double lambda1(const ModelParams& prm, double S_value, double volume);
[[nodiscard]] double c0(const ModelParams& prm, double S_value, double volume);
[[nodiscard]] double c0_hat_route(const ModelParams& prm, double S_value, double volume);
[[nodiscard]] double c_infty(const ModelParams& prm, double S_ab_value, double lambda, double mu, double C0);
[[nodiscard]] D0Bound d0_bound(const ModelParams& prm, double S_value, double volume, double lambda, double mu);

/// RHS - LHS of the Hoelder bound on int(lambda|u|^q + mu|v|^q).
[[nodiscard]] double holder_bound_check(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                                        double S_value);
/// RHS - LHS of 2 int |u|^alpha |v|^beta <= 2 S^{-(alpha+beta)/p} ||(u,v)||^{alpha+beta}.
[[nodiscard]] double young_bound_check(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                                       double S_value);

[[nodiscard]] HypothesesFlags hypotheses_check(const ModelParams& prm);

/// Full report: both quotient descents plus every closed form.
[[nodiscard]] ConstantsReport compute_constants(const GridDomain& dom, const ModelParams& prm, std::uint64_t seed,
                                                const QuotientOptions& opts = {});

/// Closed forms only, from given discrete constants.
[[nodiscard]] ConstantsReport closed_forms(const ModelParams& prm, double S_d, double S_ab_d, double volume);

/// Golden-section minimizer of f on [a, b].
[[nodiscard]] double golden_section_min(const std::function<double(double)>& f, double a, double b,
                                        double tol = 1e-12);

}  // namespace nehari
