#include "nehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nehari/bubbles.hpp"
#include "nehari/energy.hpp"
#include "nehari/io.hpp"
#include "nehari/norms.hpp"
#include "nehari/rng.hpp"
#include "nehari/summation.hpp"

namespace nehari {

namespace {

double lp_pair_norm(const GridDomain& dom, const FieldPair& a, double p) {
  return std::pow(lr_pow(dom, a.u.span(), p) + lr_pow(dom, a.v.span(), p), 1.0 / p);
}

bool is_semitrivial(const GridDomain& dom, const ModelParams& prm, const FieldPair& z, double tol) {
  const double qu = lr_norm(dom, z.u.span(), prm.q);
  const double qv = lr_norm(dom, z.v.span(), prm.q);
  const double total = std::pow(std::pow(qu, prm.q) + std::pow(qv, prm.q), 1.0 / prm.q);
  return !(qu > tol * total) || !(qv > tol * total);
}

std::optional<FieldPair> try_project(const ModelParams& prm, const GridDomain& dom, const FieldPair& z, Branch branch) {
  try {
    if (!z.all_finite() || z.is_zero()) return std::nullopt;
    return project_to(prm, dom, z, branch);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

}  // namespace

double normalized_distance(const GridDomain& dom, const ModelParams& prm, const FieldPair& a, const FieldPair& b) {
  const double na = lp_pair_norm(dom, a, prm.p);
  const double nb = lp_pair_norm(dom, b, prm.p);
  FieldPair d = a.scaled(1.0 / na);
  d.axpy(-1.0 / nb, b);
  return lp_pair_norm(dom, d, prm.p);
}

SolutionReport minimize_on_branch(const ModelParams& prm, const GridDomain& dom, Branch branch, const FieldPair& init,
                                  const SolverOptions& opts) {
  if (!(prm.lambda > 0.0) || !(prm.mu > 0.0)) throw InputError("parameters must be positive");
  if (branch != Branch::Nplus && branch != Branch::Nminus) throw std::invalid_argument("branch must be Nplus or Nminus");
  const double floor = prm.p < 2.0 ? opts.floor : 0.0;

  SolutionReport rep;
  rep.branch = branch;
  FieldPair z = project_to(prm, dom, init, branch);
  double J = energy(prm, dom, z).total;
  FieldPair g = gradient_vector(prm, dom, z, floor);
  double gnorm = euclidean_norm(g);
  double step = 1e-2 * euclidean_norm(z) / std::max(gnorm, 1e-300);
  rep.energy_trace.push_back(J);
  rep.max_iterate_norm = pair_norm(dom, z, prm.p);
  rep.min_iterate_energy = J;

  bool converged = false;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double P = pair_norm_pow(dom, z, prm.p);
    rep.relative_residual = gnorm * euclidean_norm(z) / P;
    if (rep.relative_residual <= opts.grad_tol) {
      converged = true;
      break;
    }
    const double gg = gnorm * gnorm;
    double t = step;
    std::optional<FieldPair> next;
    double Jn = J;
    for (int bt = 0; bt < 60; ++bt) {
      FieldPair trial = z;
      trial.axpy(-t, g);
      auto proj = try_project(prm, dom, trial, branch);
      if (proj) {
        Jn = energy(prm, dom, *proj).total;
        if (Jn <= J - 1e-4 * t * gg) {
          next = std::move(proj);
          break;
        }
      }
      t *= 0.5;
    }
    if (!next) {
      converged = rep.relative_residual <= 1e-5;
      break;
    }
    FieldPair gn = gradient_vector(prm, dom, *next, floor);
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double su = (*next).u[i] - z.u[i];
      const double sv = (*next).v[i] - z.v[i];
      ss += su * su + sv * sv;
      sy += su * (gn.u[i] - g.u[i]) + sv * (gn.v[i] - g.v[i]);
    }
    step = sy > 0.0 ? ss / sy : 2.0 * t;
    if (Jn > J) rep.energy_monotone = false;
    z = std::move(*next);
    g = std::move(gn);
    gnorm = euclidean_norm(g);
    J = Jn;
    rep.energy_trace.push_back(J);
    rep.max_iterate_norm = std::max(rep.max_iterate_norm, pair_norm(dom, z, prm.p));
    rep.min_iterate_energy = std::min(rep.min_iterate_energy, J);
    const auto w = static_cast<std::size_t>(opts.stall_window);
    if (rep.energy_trace.size() > w) {
      const double before = rep.energy_trace[rep.energy_trace.size() - 1 - w];
      if (before - J <= opts.energy_tol * std::abs(J)) {
        rep.relative_residual = gnorm * euclidean_norm(z) / pair_norm_pow(dom, z, prm.p);
        converged = true;
        ++it;
        break;
      }
    }
  }
  if (!converged) {
    throw NumericalError("projected descent on " + to_string(branch) + " did not converge (relative residual " +
                         std::to_string(rep.relative_residual) + ")");
  }
  rep.iterations = it;
  rep.pair = std::move(z);
  rep.energy = J;
  rep.residual = gnorm;
  rep.classification = classify(prm, dom, rep.pair);
  rep.semitrivial = is_semitrivial(dom, prm, rep.pair, opts.semitrivial_tol);
  rep.checks.push_back({"classification_matches", rep.classification == branch ? 1.0 : 0.0, rep.classification == branch});
  rep.checks.push_back({"energy_sign", rep.energy, branch == Branch::Nplus ? rep.energy < 0.0 : rep.energy > 0.0});
  rep.checks.push_back({"energy_monotone", rep.energy_monotone ? 1.0 : 0.0, rep.energy_monotone});
  rep.checks.push_back({"iterate_norm_bound", rep.max_iterate_norm, std::isfinite(rep.max_iterate_norm)});
  rep.checks.push_back({"energy_bounded_below", rep.min_iterate_energy, std::isfinite(rep.min_iterate_energy)});
  return rep;
}

bool TwoSolutions::all_pass() const {
  auto ok = [](const std::vector<Check>& cs) {
    return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.pass; });
  };
  return ok(checks) && ok(plus.checks) && ok(minus.checks);
}

TwoSolutions solve_two(const ModelParams& prm, const GridDomain& dom, const SolverOptions& opts,
                       std::optional<ConstantsReport> constants) {
  if (!(prm.lambda > 0.0) || !(prm.mu > 0.0)) throw InputError("parameters must be positive");
  TwoSolutions out;
  out.constants = constants ? *constants : compute_constants(dom, prm, opts.seed);
  const auto& cr = out.constants;
  const std::size_t N = dom.size();

  auto run_best = [&](Branch branch, const std::vector<std::pair<std::string, FieldPair>>& starts) {
    std::optional<SolutionReport> best;
    std::string last_error;
    for (const auto& [label, init] : starts) {
      try {
        auto rep = minimize_on_branch(prm, dom, branch, init, opts);
        rep.start = label;
        if (!best || rep.energy < best->energy) best = std::move(rep);
      } catch (const NumericalError& e) {
        last_error = e.what();
      }
    }
    if (!best) throw NumericalError("every start failed on " + to_string(branch) + ": " + last_error);
    return std::move(*best);
  };

  std::vector<std::pair<std::string, FieldPair>> plus_starts;
  for (int k = 0; k < opts.starts_plus; ++k) {
    Rng rng(opts.seed, Stream::SolverPlus, static_cast<std::uint64_t>(k));
    FieldPair init = FieldPair::zeros(N);
    for (std::size_t i = 0; i < N; ++i) init.u[i] = opts.init_amplitude * rng.uniform(0.5, 1.5);
    for (std::size_t i = 0; i < N; ++i) init.v[i] = opts.init_amplitude * rng.uniform(0.5, 1.5);
    plus_starts.emplace_back("random:" + std::to_string(k), std::move(init));
  }
  std::vector<std::pair<std::string, FieldPair>> minus_starts;
  const auto profile = RadialProfile::model(prm);
  const auto center = node_center(dom);
  const double delta = std::min(opts.delta_fraction * dom.spec().box_length, room_inside(dom, center) / opts.theta);
  for (int k = 0; k < opts.starts_minus; ++k) {
    const double eps = delta / std::pow(2.0, k + 1);
    const Field u = bubble_field(dom, prm, profile, eps, delta, opts.theta, center);
    minus_starts.emplace_back("bubble:eps=" + std::to_string(eps),
                              FieldPair(u.scaled(std::pow(prm.alpha, 1.0 / prm.p)), u.scaled(std::pow(prm.beta, 1.0 / prm.p))));
  }
  out.plus = run_best(Branch::Nplus, plus_starts);
  out.minus = run_best(Branch::Nminus, minus_starts);

  const double floor = -cr.C0 * prm.sigma();
  out.distance = normalized_distance(dom, prm, out.plus.pair, out.minus.pair);
  const std::string hash_plus = sha256_hex(field_bytes(out.plus.pair));
  const std::string hash_minus = sha256_hex(field_bytes(out.minus.pair));
  auto& c = out.checks;
  c.push_back({"distinct", out.distance, out.distance > opts.distinct_tol && hash_plus != hash_minus});
  c.push_back({"plus_not_semitrivial", out.plus.semitrivial ? 1.0 : 0.0, !out.plus.semitrivial});
  c.push_back({"minus_not_semitrivial", out.minus.semitrivial ? 1.0 : 0.0, !out.minus.semitrivial});
  c.push_back({"plus_energy_negative", out.plus.energy, out.plus.energy < 0.0});
  c.push_back({"minus_energy_positive", out.minus.energy, out.minus.energy > 0.0});
  c.push_back({"d0_below_minus_energy", out.minus.energy - cr.d0.value,
               !cr.d0.smallness_ok || (cr.d0.value > 0.0 && cr.d0.value <= out.minus.energy)});
  c.push_back({"minus_energy_below_c_infty", cr.c_infty - out.minus.energy,
               !cr.d0.smallness_ok || out.minus.energy < cr.c_infty});
  c.push_back({"plus_above_lower_floor", out.plus.energy - floor, out.plus.energy >= floor});
  c.push_back({"minus_above_lower_floor", out.minus.energy - floor, out.minus.energy >= floor});
  out.plus.checks.push_back({"field_hash:" + hash_plus.substr(0, 16), 0.0, true});
  out.minus.checks.push_back({"field_hash:" + hash_minus.substr(0, 16), 0.0, true});
  return out;
}

ScalarSolution solve_scalar_sublinear(const ModelParams& prm, const GridDomain& dom, double lambda,
                                      const SolverOptions& opts) {
  if (!(lambda > 0.0)) throw InputError("parameters must be positive");
  if (!(prm.q < prm.p)) throw InputError("scalar sublinear problem needs q < p");
  const double p = prm.p;
  const double q = prm.q;
  const double hn = dom.cell_volume();
  const double floor = p < 2.0 ? opts.floor : 0.0;
  QuotientProblem f;
  f.eval = [&](std::span<const double> w, std::vector<double>* grad) {
    const double num = seminorm_p_pow(dom, w, p);
    const double Q = lr_pow(dom, w, q);
    const double scale = std::pow(Q, -p / q);
    if (grad) {
      const auto a = a_gradient(dom, w, p, floor);
      grad->resize(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) (*grad)[i] = scale * (p * a[i] - p * num / Q * hn * signed_pow(w[i], q));
    }
    return num * scale;
  };
  f.normalize = [&](std::vector<double>& w) {
    const double c = std::pow(lr_pow(dom, w, q), -1.0 / q);
    for (double& v : w) v *= c;
  };
  Rng rng(opts.seed, Stream::Scalar);
  std::vector<double> w0(dom.size());
  for (double& v : w0) v = rng.uniform(0.5, 1.5);
  QuotientOptions qo;
  qo.tol = 1e-15;
  qo.max_iterations = opts.max_iterations;
  qo.stall_window = opts.stall_window;
  auto res = minimize_quotient(f, std::move(w0), qo);
  for (double& v : res.minimizer) v = std::abs(v);

  Field w(std::move(res.minimizer));
  const double A = seminorm_p_pow(dom, w.span(), p);
  const double Q = lr_pow(dom, w.span(), q);
  const double t = std::pow(lambda * Q / A, 1.0 / (p - q));
  ScalarSolution out;
  out.u = w.scaled(t);
  out.iterations = res.iterations;
  out.seminorm_pow = seminorm_p_pow(dom, out.u.span(), p);
  out.q_integral = lambda * lr_pow(dom, out.u.span(), q);
  out.energy = out.seminorm_pow / p - out.q_integral / q;
  out.identity_residual = std::abs(out.energy + (p - q) / (p * q) * out.seminorm_pow) / out.seminorm_pow;
  const auto a = a_gradient(dom, out.u.span(), p, floor);
  double r2 = 0.0;
  double u2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - lambda * hn * signed_pow(out.u[i], q);
    r2 += r * r;
    u2 += out.u[i] * out.u[i];
  }
  out.stationarity = std::sqrt(r2 * u2) / out.seminorm_pow;
  return out;
}

double semitrivial_tmax_predicted(const ModelParams& prm) {
  const double ab = prm.ab();
  return std::pow((ab - prm.q) / (ab - prm.p), 1.0 / (prm.p - prm.q));
}

double semitrivial_tmax_check(const ModelParams& prm, const GridDomain& dom, const Field& u1, const Field& w,
                              double stationarity_tol) {
  auto identity_gap = [&](const Field& f, double coef) {
    const double A = seminorm_p_pow(dom, f.span(), prm.p);
    return std::abs(A - coef * lr_pow(dom, f.span(), prm.q)) / A;
  };
  if (identity_gap(u1, prm.lambda) > stationarity_tol || identity_gap(w, prm.mu) > stationarity_tol) {
    throw std::invalid_argument("semitrivial t_max check needs scalar solutions for lambda and mu");
  }
  const double predicted = semitrivial_tmax_predicted(prm);
  if (!(predicted > 1.0)) throw NumericalError("predicted semitrivial t_max must exceed 1");
  const double tm = t_max(reduce(prm, dom, FieldPair(u1, w)), prm);
  return std::abs(tm - predicted) / predicted;
}

}  // namespace nehari
