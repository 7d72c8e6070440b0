#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"

namespace nehari {

/// Radial profile U(r) with U(0) = 1, either the closed model form or a table.
class RadialProfile {
 public:
  enum class Kind { Model, Tabulated };

  /// (1 + r^{p/(p-1)})^{-(n-ps)/p}; a proven minimizer only for p = 2.
  static RadialProfile model(const ModelParams& prm);
  /// Linear interpolation of (radii, values); power-law tail beyond the last radius.
  static RadialProfile tabulated(const ModelParams& prm, std::vector<double> radii, std::vector<double> values);
  /// Radial average of a nonnegative field about center, normalized to 1 at the smallest radius.
  static RadialProfile from_field(const ModelParams& prm, const GridDomain& dom, const Field& field,
                                  const std::vector<double>& center);

  [[nodiscard]] double operator()(double r) const;
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool proven_minimizer() const { return kind_ == Kind::Model && p_ == 2.0; }
  [[nodiscard]] std::string label() const;

 private:
  Kind kind_ = Kind::Model;
  int n_ = 2;
  double p_ = 2.0;
  double s_ = 0.5;
  std::vector<double> radii_;
  std::vector<double> values_;
};

[[nodiscard]] double model_profile(const ModelParams& prm, double r);

/// eps^{-(n-ps)/p} U(r/eps).
[[nodiscard]] double rescale(const RadialProfile& U, const ModelParams& prm, double epsilon, double r);

/// Data of the truncation maps g and G for one (eps, delta, theta).
struct Truncation {
  double epsilon = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  double U_delta = 0.0;        ///< U_eps(delta)
  double U_theta_delta = 0.0;  ///< U_eps(theta delta)
  double m = 0.0;              ///< U_eps(delta) / (U_eps(delta) - U_eps(theta delta))
};

[[nodiscard]] Truncation make_truncation(const RadialProfile& U, const ModelParams& prm, double epsilon,
                                         double delta, double theta);
/// (g(t), G(t)) for t >= 0.
[[nodiscard]] std::pair<double, double> truncation(const Truncation& tr, const ModelParams& prm, double t);

/// Box midpoint, the default bubble centre.
[[nodiscard]] std::vector<double> default_center(const GridDomain& dom);
/// Interior lattice node closest to the box midpoint.
[[nodiscard]] std::vector<double> node_center(const GridDomain& dom);
/// Distance from center to the complement of the open domain region.
[[nodiscard]] double room_inside(const GridDomain& dom, const std::vector<double>& center);

/// u_{eps,delta}(|x - center|) on interior nodes; throws when the support leaves the domain.
[[nodiscard]] Field bubble_field(const GridDomain& dom, const ModelParams& prm, const RadialProfile& U,
                                 double epsilon, double delta, double theta, const std::vector<double>& center);

struct DecayReport {
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  bool halving_ok = false;              ///< U(theta r)/U(r) <= 1/2 on the whole grid
  std::optional<double> theta_halving;  ///< smallest scanned theta achieving the halving
  double theta_asymptotic = 0.0;        ///< 2^{(p-1)/(n-ps)}
};

[[nodiscard]] DecayReport decay_check(const RadialProfile& U, const ModelParams& prm,
                                      const std::vector<double>& r_grid, double theta);
/// Geometric grid on (1, r_max].
[[nodiscard]] std::vector<double> default_decay_grid(double r_max = 1e3, int count = 200);

struct NormScanRow {
  double epsilon = 0.0;
  double ratio = 0.0;           ///< eps/delta
  double seminorm_p_pow = 0.0;  ///< [u_eps,delta]^p on the run domain
  double lpstar_pow = 0.0;      ///< int |u_eps,delta|^{p*}
  double excess = 0.0;          ///< [u_eps,delta]^p - [U_eps]^p on the reference lattice
  double deficit = 0.0;         ///< int U_eps^{p*} - int u_eps,delta^{p*} on the reference lattice
  double rayleigh = 0.0;        ///< Sobolev quotient of u_eps,delta
};

struct NormScan {
  std::vector<NormScanRow> rows;
  double excess_exponent = 0.0;   ///< (n-ps)/(p-1)
  double deficit_exponent = 0.0;  ///< n/(p-1)
  double excess_slope = 0.0;
  double deficit_slope = 0.0;
  double band = 0.3;
  bool excess_ok = false;
  bool deficit_ok = false;
  bool excess_nonnegative = false;
  bool monotone = false;  ///< excess and deficit shrink as eps decreases
};

[[nodiscard]] NormScan norm_estimate_scan(const GridDomain& dom, const ModelParams& prm, const RadialProfile& U,
                                          double delta, double theta, const std::vector<double>& eps_list,
                                          double band = 0.3);

struct SupScanRow {
  double epsilon = 0.0;
  double t_star = 0.0;        ///< closed-form maximizer of the coupling-only part
  double t_star_grid = 0.0;   ///< numerical argmax of that part
  double h_closed = 0.0;      ///< closed-form maximum
  double h_chain = 0.0;       ///< maximum via the quotient chain
  double sup_full = 0.0;      ///< sup_t J_{lambda,mu}(t u0, t v0)
  double t_sup_full = 0.0;
  double q_integral = 0.0;    ///< int_{B(center,delta)} |u_eps,delta|^q
  std::string q_regime;
  double c_infty = 0.0;
  bool below_c_infty = false;
};

struct SupScan {
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<SupScanRow> rows;
  double worst_t_star_error = 0.0;
  bool any_below = false;
};

/// Regime label of the q-integral scaling.
[[nodiscard]] std::string q_regime_label(const ModelParams& prm);

[[nodiscard]] SupScan sup_energy_scan(const GridDomain& dom, const ModelParams& prm, const RadialProfile& U,
                                      double delta, double theta, const std::vector<double>& eps_list,
                                      double lambda, double mu, double S_ab_value, double C0);

/// Maximizer of f on a log-spaced grid over [lo, hi] refined by golden section.
[[nodiscard]] double grid_golden_argmax(const std::function<double(double)>& f, double lo, double hi,
                                        int samples = 2001);

/// Least-squares slope of log|y| against log x, skipping rows with |y| <= floor.
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double floor = 0.0);

}  // namespace nehari
