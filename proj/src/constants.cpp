#include "nehari/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nehari/energy.hpp"
#include "nehari/norms.hpp"
#include "nehari/rng.hpp"
#include "nehari/summation.hpp"

namespace nehari {

namespace {

double vdot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

struct DescentOutcome {
  double value;
  std::vector<double> x;
  int iterations;
};

DescentOutcome descend(const QuotientProblem& f, std::vector<double> x, const QuotientOptions& opts) {
  f.normalize(x);
  std::vector<double> g(x.size());
  double R = f.eval(x, &g);
  std::vector<double> history{R};
  const double xnorm = std::sqrt(vdot(x, x));
  double step = 1e-2 * xnorm / std::max(std::sqrt(vdot(g, g)), 1e-300);
  std::vector<double> xn(x.size());
  std::vector<double> gn(x.size());
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double gg = vdot(g, g);
    if (gg == 0.0) return {R, x, it - 1};
    double t = step;
    bool accepted = false;
    double Rn = R;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t k = 0; k < x.size(); ++k) xn[k] = x[k] - t * g[k];
      f.normalize(xn);
      Rn = f.eval(xn, &gn);
      if (std::isfinite(Rn) && Rn <= R - 1e-4 * t * gg) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return {R, x, it - 1};
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double s = xn[k] - x[k];
      const double y = gn[k] - g[k];
      ss += s * s;
      sy += s * y;
    }
    step = sy > 0.0 ? ss / sy : 2.0 * t;
    std::swap(x, xn);
    std::swap(g, gn);
    R = Rn;
    history.push_back(R);
    const auto w = static_cast<std::size_t>(opts.stall_window);
    if (history.size() > w && history[history.size() - 1 - w] - R <= opts.tol * R) {
      return {R, x, it};
    }
  }
  throw ConvergenceError("quotient descent did not converge within max_iterations", x);
}

QuotientResult run_restarts(const QuotientProblem& f, std::size_t dim, std::uint64_t seed, Stream stream,
                            const QuotientOptions& opts, const std::vector<std::vector<double>>& starts,
                            const std::function<bool(const std::vector<double>&)>& admissible) {
  QuotientResult res;
  res.value = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<double> x0) {
    auto out = descend(f, std::move(x0), opts);
    res.iterations += out.iterations;
    res.restart_values.push_back(out.value);
    if (out.value < res.value) {
      res.value = out.value;
      res.minimizer = std::move(out.x);
    }
  };
  for (const auto& s : starts) consider(s);
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(seed, stream, static_cast<std::uint64_t>(r));
    std::vector<double> x0(dim);
    const bool perturb = r >= opts.restarts / 2 && !res.minimizer.empty();
    for (std::size_t k = 0; k < dim; ++k) {
      x0[k] = perturb ? res.minimizer[k] * (1.0 + 0.5 * (rng.uniform() - 0.5)) : rng.uniform(0.1, 1.1);
    }
    if (!admissible(x0)) throw std::invalid_argument("starting point has a vanishing denominator");
    consider(std::move(x0));
  }
  for (double& v : res.minimizer) v = std::abs(v);
  f.normalize(res.minimizer);
  res.value = std::min(res.value, f.eval(res.minimizer, nullptr));
  return res;
}

QuotientProblem sobolev_objective(const GridDomain& dom, const ModelParams& prm) {
  const double p = prm.p;
  const double ps = prm.p_star();
  const double hn = dom.cell_volume();
  QuotientProblem f;
  f.eval = [&dom, p, ps, hn](std::span<const double> u, std::vector<double>* grad) {
    const double num = seminorm_p_pow(dom, u, p);
    const double M = lr_pow(dom, u, ps);
    const double scale = std::pow(M, -p / ps);
    if (grad) {
      const auto a = a_gradient(dom, u, p);
      grad->resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        (*grad)[i] = scale * (p * a[i] - p * num / M * hn * signed_pow(u[i], ps));
      }
    }
    return num * scale;
  };
  f.normalize = [&dom, ps](std::vector<double>& u) {
    const double M = lr_pow(dom, u, ps);
    const double c = std::pow(M, -1.0 / ps);
    for (double& v : u) v *= c;
  };
  return f;
}

QuotientProblem pair_objective(const GridDomain& dom, const ModelParams& prm) {
  const double p = prm.p;
  const double a = prm.alpha;
  const double b = prm.beta;
  const double ab = prm.ab();
  const double hn = dom.cell_volume();
  const std::size_t N = dom.size();
  auto coupling = [&dom, a, b, N](std::span<const double> x) {
    return dom.cell_volume() *
           deterministic_sum(N, [&](std::size_t i) { return pow_abs(x[i], a) * pow_abs(x[N + i], b); });
  };
  QuotientProblem f;
  f.eval = [&dom, p, a, b, ab, hn, N, coupling](std::span<const double> x, std::vector<double>* grad) {
    const auto u = x.subspan(0, N);
    const auto v = x.subspan(N, N);
    const double num = seminorm_p_pow(dom, u, p) + seminorm_p_pow(dom, v, p);
    const double C = coupling(x);
    const double scale = std::pow(C, -p / ab);
    if (grad) {
      const auto gu = a_gradient(dom, u, p);
      const auto gv = a_gradient(dom, v, p);
      grad->resize(x.size());
      const double k = (p / ab) * num / C * hn;
      for (std::size_t i = 0; i < N; ++i) {
        (*grad)[i] = scale * (p * gu[i] - k * a * signed_pow(u[i], a) * pow_abs(v[i], b));
        (*grad)[N + i] = scale * (p * gv[i] - k * b * pow_abs(u[i], a) * signed_pow(v[i], b));
      }
    }
    return num * scale;
  };
  f.normalize = [ab, coupling](std::vector<double>& x) {
    const double c = std::pow(coupling(x), -1.0 / ab);
    for (double& v : x) v *= c;
  };
  return f;
}

}  // namespace

QuotientResult minimize_quotient(const QuotientProblem& f, std::vector<double> x0, const QuotientOptions& opts) {
  auto out = descend(f, std::move(x0), opts);
  QuotientResult res;
  res.value = out.value;
  res.minimizer = std::move(out.x);
  res.iterations = out.iterations;
  res.restart_values.push_back(out.value);
  return res;
}

double sobolev_quotient(const GridDomain& dom, const ModelParams& prm, std::span<const double> u) {
  return sobolev_objective(dom, prm).eval(u, nullptr);
}

double pair_quotient(const GridDomain& dom, const ModelParams& prm, const FieldPair& pair) {
  return pair_norm_pow(dom, pair, prm.p) / std::pow(coupling_integral(prm, dom, pair), prm.p / prm.ab());
}

QuotientResult compute_S(const GridDomain& dom, const ModelParams& prm, std::uint64_t seed,
                         const QuotientOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("quotient tolerance must be > 0");
  const auto f = sobolev_objective(dom, prm);
  return run_restarts(f, dom.size(), seed, Stream::Sobolev, opts, {},
                      [](const std::vector<double>& x) {
                        return std::any_of(x.begin(), x.end(), [](double v) { return v != 0.0; });
                      });
}

QuotientResult compute_S_alpha_beta(const GridDomain& dom, const ModelParams& prm, std::uint64_t seed,
                                    const QuotientOptions& opts, const std::vector<FieldPair>& starts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("quotient tolerance must be > 0");
  const std::size_t N = dom.size();
  auto admissible = [N](const std::vector<double>& x) {
    for (std::size_t i = 0; i < N; ++i)
      if (x[i] != 0.0 && x[N + i] != 0.0) return true;
    return false;
  };
  std::vector<std::vector<double>> flat;
  for (const auto& s : starts) {
    std::vector<double> x(s.u.values());
    x.insert(x.end(), s.v.values().begin(), s.v.values().end());
    if (!admissible(x)) throw std::invalid_argument("starting pair has a vanishing coupling integral");
    flat.push_back(std::move(x));
  }
  const auto f = pair_objective(dom, prm);
  return run_restarts(f, 2 * N, seed, Stream::SobolevPair, opts, flat, admissible);
}

double g_function(const ModelParams& prm, double x) {
  const double ab = prm.ab();
  return std::pow(x, prm.p * prm.beta / ab) + std::pow(x, -prm.p * prm.alpha / ab);
}

std::pair<double, double> g_min(const ModelParams& prm) {
  const double a = prm.alpha;
  const double b = prm.beta;
  const double ab = prm.ab();
  return {std::pow(a / b, 1.0 / prm.p), std::pow(a / b, b / ab) + std::pow(b / a, a / ab)};
}

double ratio_predicted(const ModelParams& prm) { return g_min(prm).second; }

double ratio_check(double S_d, double S_ab_d, const ModelParams& prm) {
  const double pred = ratio_predicted(prm) * S_d;
  return std::abs(S_ab_d - pred) / pred;
}

double lambda1(const ModelParams& prm, double S_value, double volume) {
  const double p = prm.p;
  const double q = prm.q;
  const double ab = prm.ab();
  if (!(ab > p)) throw std::invalid_argument("Lambda_1 needs alpha+beta > p");
  const double f1 = std::pow((p - q) / (2.0 * (ab - q)), p / (ab - p));
  const double f2 = std::pow((ab - q) / (ab - p) * std::pow(volume, (ab - q) / ab), -p / (p - q));
  const double f3 = std::pow(S_value, ab / (ab - p) + q / (p - q));
  return f1 * f2 * f3;
}

double c0(const ModelParams& prm, double S_value, double volume) {
  const double p = prm.p;
  const double q = prm.q;
  const double ps = prm.p_star();
  if (!(q < p)) throw std::invalid_argument("C0 needs q < p");
  return (p - q) / (p * q * ps) * std::pow(ps - q, p / (p - q)) / std::pow(ps - p, q / (p - q)) *
         std::pow(volume, p * (ps - q) / (ps * (p - q))) * std::pow(S_value, -q / (p - q));
}

double c0_hat_route(const ModelParams& prm, double S_value, double volume) {
  const double p = prm.p;
  const double q = prm.q;
  const double ps = prm.p_star();
  const double sn = prm.s / prm.n;
  const double k = 1.0 / q - 1.0 / ps;
  const double inner = std::pow((p / q) * sn / k, -q / p) * std::pow(volume, (ps - q) / ps) * std::pow(S_value, -q / p);
  const double c_hat = (p - q) / p * std::pow(inner, p / (p - q));
  return k * c_hat;
}

double c_infty(const ModelParams& prm, double S_ab_value, double lambda, double mu, double C0) {
  const double e = prm.p / (prm.p - prm.q);
  const double lead = 2.0 * prm.s / prm.n * std::pow(S_ab_value / 2.0, prm.n / (prm.p * prm.s));
  return lead - C0 * (std::pow(lambda, e) + std::pow(mu, e));
}

D0Bound d0_bound(const ModelParams& prm, double S_value, double volume, double lambda, double mu) {
  const double p = prm.p;
  const double q = prm.q;
  const double ab = prm.ab();
  const double sigma = prm.with_lambda_mu(lambda, mu).sigma();
  const double base = (p - q) / (2.0 * (ab - q));
  D0Bound out;
  out.bracket = (1.0 / p - 1.0 / ab) * std::pow(base, (p - q) / (ab - p)) *
                    std::pow(S_value, ab * (p - q) / (p * (ab - p))) -
                (1.0 / q - 1.0 / ab) * std::pow(S_value, -q / p) * std::pow(volume, (ab - q) / ab) *
                    std::pow(sigma, (p - q) / p);
  out.norm_lower_bound = std::pow(base, 1.0 / (ab - p)) * std::pow(S_value, ab / (p * (ab - p)));
  out.value = out.bracket * std::pow(out.norm_lower_bound, q);
  out.smallness_ok = sigma < std::pow(q / p, p / (p - q)) * lambda1(prm, S_value, volume);
  return out;
}

double holder_bound_check(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, double S_value) {
  const double p = prm.p;
  const double q = prm.q;
  const double ab = prm.ab();
  const double lhs = concave_integral(prm, dom, pair);
  const double rhs = std::pow(S_value, -q / p) * std::pow(dom.volume(), (ab - q) / ab) *
                     std::pow(prm.sigma(), (p - q) / p) * std::pow(pair_norm_pow(dom, pair, p), q / p);
  return rhs - lhs;
}

double young_bound_check(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, double S_value) {
  const double p = prm.p;
  const double ab = prm.ab();
  const double lhs = 2.0 * coupling_integral(prm, dom, pair);
  const double rhs = 2.0 * std::pow(S_value, -ab / p) * std::pow(pair_norm_pow(dom, pair, p), ab / p);
  return rhs - lhs;
}

HypothesesFlags hypotheses_check(const ModelParams& prm) {
  const double n = prm.n;
  const double p = prm.p;
  const double ps = p * prm.s;
  const double threshold = n * (p - 1.0) / (n - ps);
  HypothesesFlags f;
  f.p2s_lt_n = p * p * prm.s < n;
  f.p_lt_2_bound = p >= 2.0 || n < ps / (2.0 - p);
  f.q_range = threshold <= prm.q && prm.q < p;
  f.critical = prm.critical();
  f.q_above_threshold = prm.q > threshold;
  return f;
}

ConstantsReport closed_forms(const ModelParams& prm, double S_d, double S_ab_d, double volume) {
  ConstantsReport r;
  r.S_d = S_d;
  r.S_ab_d = S_ab_d;
  r.volume = volume;
  r.ratio_predicted = ratio_predicted(prm);
  r.ratio_error = ratio_check(S_d, S_ab_d, prm);
  r.lambda1 = lambda1(prm, S_d, volume);
  r.smallness_threshold = std::pow(prm.q / prm.p, prm.p / (prm.p - prm.q)) * r.lambda1;
  r.C0 = c0(prm, S_d, volume);
  r.C0_hat_route = c0_hat_route(prm, S_d, volume);
  r.c_infty = c_infty(prm, S_ab_d, prm.lambda, prm.mu, r.C0);
  r.c_infty_zero = c_infty(prm, S_ab_d, 0.0, 0.0, r.C0);
  r.d0 = d0_bound(prm, S_d, volume, prm.lambda, prm.mu);
  r.sigma = prm.sigma();
  r.lambda1_ok = r.sigma < r.lambda1;
  r.critical = prm.critical();
  r.hypotheses = hypotheses_check(prm);
  return r;
}

ConstantsReport compute_constants(const GridDomain& dom, const ModelParams& prm, std::uint64_t seed,
                                  const QuotientOptions& opts) {
  const auto S = compute_S(dom, prm, seed, opts);
  const double x0 = g_min(prm).first;
  Field w(S.minimizer);
  std::vector<FieldPair> starts{FieldPair(w.scaled(x0), w)};
  const auto Sab = compute_S_alpha_beta(dom, prm, seed, opts, starts);
  auto r = closed_forms(prm, S.value, Sab.value, dom.volume());
  r.iterations_S = S.iterations;
  r.iterations_S_ab = Sab.iterations;
  return r;
}

double golden_section_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 500 && (b - a) > tol * (std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace nehari
