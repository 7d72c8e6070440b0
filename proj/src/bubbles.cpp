#include "nehari/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "nehari/constants.hpp"
#include "nehari/energy.hpp"
#include "nehari/fibering.hpp"
#include "nehari/norms.hpp"
#include "nehari/summation.hpp"

namespace nehari {

namespace {

double radius_from(const GridDomain& dom, std::size_t i, const std::vector<double>& center) {
  double r2 = 0.0;
  for (int a = 0; a < dom.dim(); ++a) {
    const double d = dom.coord(i, a) - center[static_cast<std::size_t>(a)];
    r2 += d * d;
  }
  return std::sqrt(r2);
}

double decay_exponent(const ModelParams& prm) { return (prm.n - prm.p * prm.s) / (prm.p - 1.0); }

}  // namespace

double room_inside(const GridDomain& dom, const std::vector<double>& center) {
  const double L = dom.spec().box_length;
  if (dom.spec().shape == DomainShape::Ball) {
    double r2 = 0.0;
    for (double c : center) r2 += (c - 0.5 * L) * (c - 0.5 * L);
    return 0.5 * L - std::sqrt(r2);
  }
  double room = L;
  for (double c : center) room = std::min({room, c, L - c});
  return room;
}

double model_profile(const ModelParams& prm, double r) {
  if (r < 0.0) throw std::domain_error("profile radius must be >= 0");
  const double ps = prm.p * prm.s;
  return std::pow(1.0 + std::pow(r, prm.p / (prm.p - 1.0)), -(prm.n - ps) / prm.p);
}

RadialProfile RadialProfile::model(const ModelParams& prm) {
  RadialProfile out;
  out.kind_ = Kind::Model;
  out.n_ = prm.n;
  out.p_ = prm.p;
  out.s_ = prm.s;
  return out;
}

RadialProfile RadialProfile::tabulated(const ModelParams& prm, std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2) throw std::invalid_argument("profile table needs >= 2 samples");
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] > radii[k - 1])) throw std::invalid_argument("profile radii must increase");
  }
  RadialProfile out = model(prm);
  out.kind_ = Kind::Tabulated;
  out.radii_ = std::move(radii);
  out.values_ = std::move(values);
  return out;
}

RadialProfile RadialProfile::from_field(const ModelParams& prm, const GridDomain& dom, const Field& field,
                                        const std::vector<double>& center) {
  std::map<long long, std::pair<double, int>> shells;
  std::map<long long, double> shell_radius;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double r = radius_from(dom, i, center);
    const auto key = std::llround(r * 1e9);
    auto& [sum, count] = shells[key];
    sum += std::abs(field[i]);
    ++count;
    shell_radius[key] = r;
  }
  std::vector<double> radii;
  std::vector<double> values;
  for (const auto& [key, acc] : shells) {
    radii.push_back(shell_radius[key]);
    values.push_back(acc.first / acc.second);
  }
  const double top = values.front();
  if (!(top > 0.0)) throw std::invalid_argument("field vanishes at the profile centre");
  for (double& v : values) v /= top;
  if (radii.front() > 0.0) {
    radii.insert(radii.begin(), 0.0);
    values.insert(values.begin(), 1.0);
  }
  return tabulated(prm, std::move(radii), std::move(values));
}

double RadialProfile::operator()(double r) const {
  if (r < 0.0) throw std::domain_error("profile radius must be >= 0");
  if (kind_ == Kind::Model) {
    const double ps = p_ * s_;
    return std::pow(1.0 + std::pow(r, p_ / (p_ - 1.0)), -(n_ - ps) / p_);
  }
  if (r >= radii_.back()) {
    return values_.back() * std::pow(radii_.back() / r, (n_ - p_ * s_) / (p_ - 1.0));
  }
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const auto k = static_cast<std::size_t>(it - radii_.begin());
  if (k == 0) return values_.front();
  const double w = (r - radii_[k - 1]) / (radii_[k] - radii_[k - 1]);
  return (1.0 - w) * values_[k - 1] + w * values_[k];
}

std::string RadialProfile::label() const {
  if (kind_ == Kind::Tabulated) return "tabulated";
  return proven_minimizer() ? "model" : "model (conjectured profile, not a proven minimizer)";
}

double rescale(const RadialProfile& U, const ModelParams& prm, double epsilon, double r) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  return std::pow(epsilon, -(prm.n - prm.p * prm.s) / prm.p) * U(r / epsilon);
}

Truncation make_truncation(const RadialProfile& U, const ModelParams& prm, double epsilon, double delta,
                           double theta) {
  if (!(delta > 0.0)) throw std::domain_error("delta must be > 0");
  if (!(theta > 1.0)) throw std::domain_error("theta must be > 1");
  Truncation tr;
  tr.epsilon = epsilon;
  tr.delta = delta;
  tr.theta = theta;
  tr.U_delta = rescale(U, prm, epsilon, delta);
  tr.U_theta_delta = rescale(U, prm, epsilon, theta * delta);
  tr.m = tr.U_delta / (tr.U_delta - tr.U_theta_delta);
  return tr;
}

std::pair<double, double> truncation(const Truncation& tr, const ModelParams& prm, double t) {
  if (t < 0.0) throw std::domain_error("truncation argument must be >= 0");
  if (t <= tr.U_theta_delta) return {0.0, 0.0};
  if (t <= tr.U_delta) {
    const double d = t - tr.U_theta_delta;
    return {std::pow(tr.m, prm.p) * d, tr.m * d};
  }
  return {t + tr.U_delta * (std::pow(tr.m, prm.p - 1.0) - 1.0), t};
}

std::vector<double> default_center(const GridDomain& dom) {
  return std::vector<double>(static_cast<std::size_t>(dom.dim()), 0.5 * dom.spec().box_length);
}

std::vector<double> node_center(const GridDomain& dom) {
  const int k = (dom.nodes_per_axis() + 1) / 2;
  return std::vector<double>(static_cast<std::size_t>(dom.dim()), k * dom.spacing());
}

Field bubble_field(const GridDomain& dom, const ModelParams& prm, const RadialProfile& U, double epsilon,
                   double delta, double theta, const std::vector<double>& center) {
  if (center.size() != static_cast<std::size_t>(dom.dim())) throw std::invalid_argument("centre has the wrong dimension");
  if (theta * delta > room_inside(dom, center) * (1.0 + 1e-12)) {
    throw std::invalid_argument("bubble support of radius theta*delta leaves the domain");
  }
  const auto tr = make_truncation(U, prm, epsilon, delta, theta);
  Field out(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double r = radius_from(dom, i, center);
    if (r >= theta * delta) continue;
    out[i] = r <= delta ? rescale(U, prm, epsilon, r) : truncation(tr, prm, rescale(U, prm, epsilon, r)).second;
  }
  return out;
}

std::vector<double> default_decay_grid(double r_max, int count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double lo = std::log(1.01);
  const double hi = std::log(r_max);
  for (int k = 0; k < count; ++k) grid[static_cast<std::size_t>(k)] = std::exp(lo + (hi - lo) * k / (count - 1));
  return grid;
}

DecayReport decay_check(const RadialProfile& U, const ModelParams& prm, const std::vector<double>& r_grid,
                        double theta) {
  if (r_grid.empty()) throw std::invalid_argument("decay grid is empty");
  for (double r : r_grid)
    if (!(r > 1.0)) throw std::invalid_argument("decay grid must lie in (1, inf)");
  const double gamma = decay_exponent(prm);
  DecayReport rep;
  rep.c1_hat = std::numeric_limits<double>::infinity();
  rep.c2_hat = 0.0;
  for (double r : r_grid) {
    const double v = U(r) * std::pow(r, gamma);
    rep.c1_hat = std::min(rep.c1_hat, v);
    rep.c2_hat = std::max(rep.c2_hat, v);
  }
  auto halves = [&](double th) {
    for (double r : r_grid)
      if (U(th * r) > 0.5 * U(r)) return false;
    return true;
  };
  rep.halving_ok = halves(theta);
  for (int k = 1; k <= 15000; ++k) {
    const double th = 1.0 + 1e-3 * k;
    if (halves(th)) {
      rep.theta_halving = th;
      break;
    }
  }
  rep.theta_asymptotic = std::pow(2.0, (prm.p - 1.0) / (prm.n - prm.p * prm.s));
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double floor) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(std::abs(y[i]) > floor) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

NormScan norm_estimate_scan(const GridDomain& dom, const ModelParams& prm, const RadialProfile& U, double delta,
                            double theta, const std::vector<double>& eps_list, double band) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  for (double e : eps_list) {
    if (!(e > 0.0) || e > 0.5 * delta * (1.0 + 1e-12)) {
      throw std::invalid_argument("eps must satisfy 0 < eps <= delta/2");
    }
  }
  const auto center = default_center(dom);
  const GridDomain ref = dom.extended();
  const double ps = prm.p_star();
  NormScan scan;
  scan.band = band;
  scan.excess_exponent = (prm.n - prm.p * prm.s) / (prm.p - 1.0);
  scan.deficit_exponent = prm.n / (prm.p - 1.0);
  std::vector<double> xs, ex, de;
  double floor_ex = 0.0;
  double floor_de = 0.0;
  for (double eps : eps_list) {
    NormScanRow row;
    row.epsilon = eps;
    row.ratio = eps / delta;
    const Field u = bubble_field(dom, prm, U, eps, delta, theta, center);
    row.seminorm_p_pow = seminorm_p_pow(dom, u.span(), prm.p);
    row.lpstar_pow = lr_pow(dom, u.span(), ps);
    row.rayleigh = row.seminorm_p_pow / std::pow(row.lpstar_pow, prm.p / ps);

    const Field u_ref = bubble_field(ref, prm, U, eps, delta, theta, center);
    Field U_ref(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) U_ref[i] = rescale(U, prm, eps, radius_from(ref, i, center));
    const double full_semi = seminorm_p_pow(ref, U_ref.span(), prm.p);
    const double full_lp = lr_pow(ref, U_ref.span(), ps);
    row.excess = seminorm_p_pow(ref, u_ref.span(), prm.p) - full_semi;
    row.deficit = full_lp - lr_pow(ref, u_ref.span(), ps);
    floor_ex = std::max(floor_ex, 10.0 * 2.220446049250313e-16 * full_semi);
    floor_de = std::max(floor_de, 10.0 * 2.220446049250313e-16 * full_lp);
    xs.push_back(row.ratio);
    ex.push_back(row.excess);
    de.push_back(row.deficit);
    scan.rows.push_back(row);
  }
  scan.excess_slope = loglog_slope(xs, ex, floor_ex);
  scan.deficit_slope = loglog_slope(xs, de, floor_de);
  scan.excess_ok = std::abs(scan.excess_slope - scan.excess_exponent) <= band * scan.excess_exponent;
  scan.deficit_ok = std::abs(scan.deficit_slope - scan.deficit_exponent) <= band * scan.deficit_exponent;
  scan.excess_nonnegative = std::all_of(ex.begin(), ex.end(), [](double v) { return v >= 0.0; });
  std::vector<std::size_t> order(xs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  scan.monotone = true;
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!(std::abs(ex[order[k - 1]]) <= std::abs(ex[order[k]]) && std::abs(de[order[k - 1]]) <= std::abs(de[order[k]]))) {
      scan.monotone = false;
    }
  }
  return scan;
}

std::string q_regime_label(const ModelParams& prm) {
  const double threshold = prm.n * (prm.p - 1.0) / (prm.n - prm.p * prm.s);
  if (std::abs(prm.q - threshold) <= 1e-12 * threshold) return "critical-q branch eps^(n-q(n-ps)/p)|log eps|";
  if (prm.q > threshold) return "supercritical-q branch eps^(n-q(n-ps)/p)";
  return "subcritical-q branch eps^(q(n-ps)/(p(p-1)))";
}

double grid_golden_argmax(const std::function<double(double)>& f, double lo, double hi, int samples) {
  if (!(lo > 0.0 && hi > lo) || samples < 3) throw std::invalid_argument("bad argmax search range");
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  auto at = [&](int k) { return std::exp(llo + (lhi - llo) * k / (samples - 1)); };
  int best = 0;
  double fbest = f(at(0));
  for (int k = 1; k < samples; ++k) {
    const double v = f(at(k));
    if (v > fbest) {
      fbest = v;
      best = k;
    }
  }
  const double a = at(std::max(best - 1, 0));
  const double b = at(std::min(best + 1, samples - 1));
  return golden_section_min([&](double t) { return -f(t); }, a, b, 1e-15);
}

SupScan sup_energy_scan(const GridDomain& dom, const ModelParams& prm, const RadialProfile& U, double delta,
                        double theta, const std::vector<double>& eps_list, double lambda, double mu,
                        double S_ab_value, double C0) {
  if (lambda < 0.0 || mu < 0.0) throw std::invalid_argument("lambda, mu must be >= 0");
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  const ModelParams run = prm.with_lambda_mu(lambda, mu);
  const auto center = default_center(dom);
  const double p = prm.p;
  const double ab = prm.ab();
  const double ps = prm.p_star();
  const double nps = prm.n / (prm.p * prm.s);
  const double gfac = ratio_predicted(prm);
  const double cinf = c_infty(prm, S_ab_value, lambda, mu, C0);
  const std::string regime = q_regime_label(prm);

  SupScan scan;
  scan.lambda = lambda;
  scan.mu = mu;
  for (double eps : eps_list) {
    if (!(eps > 0.0) || eps > 0.5 * delta * (1.0 + 1e-12)) {
      throw std::invalid_argument("eps must satisfy 0 < eps <= delta/2");
    }
    SupScanRow row;
    row.epsilon = eps;
    const Field u = bubble_field(dom, prm, U, eps, delta, theta, center);
    const FieldPair pair(u.scaled(std::pow(prm.alpha, 1.0 / p)), u.scaled(std::pow(prm.beta, 1.0 / p)));
    const ReducedTriple tr = reduce(run, dom, pair);
    row.t_star = std::pow(tr.P / tr.D, 1.0 / (ab - p));
    row.h_closed = (1.0 / p - 1.0 / ab) * std::pow(tr.P, ab / (ab - p)) / std::pow(tr.D, p / (ab - p));
    const double rq = seminorm_p_pow(dom, u.span(), p) / std::pow(lr_pow(dom, u.span(), ps), p / ps);
    row.h_chain = prm.s / prm.n * std::pow(2.0, -(prm.n - p * prm.s) / (p * prm.s)) * std::pow(gfac, nps) *
                  std::pow(rq, nps);

    const ReducedTriple free{tr.P, 0.0, tr.D};
    auto h = [&](double t) { return phi(free, run, t); };
    row.t_star_grid = grid_golden_argmax(h, 1e-8, 1e8, 4001);
    scan.worst_t_star_error = std::max(scan.worst_t_star_error, std::abs(row.t_star_grid - row.t_star) / row.t_star);

    auto full = [&](double t) { return phi(tr, run, t); };
    row.t_sup_full = grid_golden_argmax(full, 1e-8, 1e8, 4001);
    row.sup_full = std::max(0.0, full(row.t_sup_full));

    row.q_integral = dom.cell_volume() * deterministic_sum(dom.size(), [&](std::size_t i) {
                       return radius_from(dom, i, center) <= delta ? pow_abs(u[i], prm.q) : 0.0;
                     });
    row.q_regime = regime;
    row.c_infty = cinf;
    row.below_c_infty = row.sup_full < cinf;
    scan.any_below = scan.any_below || row.below_c_infty;
    scan.rows.push_back(row);
  }
  return scan;
}

}  // namespace nehari
