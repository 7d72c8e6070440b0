#include "nehari/fibering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nehari/energy.hpp"
#include "nehari/norms.hpp"
#include "nehari/summation.hpp"

namespace nehari {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRootTol = 1e-12;

void require_positive(double t) {
  if (!(t > 0.0)) throw std::domain_error("fibering maps need t > 0");
}

/// Sign-equivalent form of phi': phi'(t) = t^{ab-1} (Psi(t) - D).
double gap(const ReducedTriple& tr, const ModelParams& prm, double t) { return psi(tr, prm, t) - tr.D; }

/// Bisection on a bracket with gap(lo) < 0 < gap(hi) (or reversed), then safeguarded Newton.
double refine_root(const ReducedTriple& tr, const ModelParams& prm, double lo, double hi) {
  double glo = gap(tr, prm, lo);
  for (int it = 0; it < kMaxIterations && (hi - lo) > kRootTol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = gap(tr, prm, mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  double gt = std::abs(gap(tr, prm, t));
  for (int it = 0; it < 4; ++it) {
    const double d = psi_prime(tr, prm, t);
    if (d == 0.0) break;
    const double next = t - gap(tr, prm, t) / d;
    if (!(next > lo && next < hi)) break;
    const double gn = std::abs(gap(tr, prm, next));
    if (!(gn < gt)) break;
    t = next;
    gt = gn;
  }
  return t;
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::Nplus: return "Nplus";
    case Branch::Nminus: return "Nminus";
    case Branch::Nzero: return "Nzero";
    case Branch::OffManifold: return "off_manifold";
  }
  return "unknown";
}

std::string to_string(ProjectionOutcome o) {
  switch (o) {
    case ProjectionOutcome::TwoRoots: return "two_roots";
    case ProjectionOutcome::ConcaveOnly: return "concave_only";
    case ProjectionOutcome::ConvexOnly: return "convex_only";
    case ProjectionOutcome::AboveThreshold: return "no_roots_above_threshold";
    case ProjectionOutcome::NoRoots: return "no_roots";
  }
  return "unknown";
}

ReducedTriple ReducedTriple::scaled(const ModelParams& prm, double c) const {
  return {std::pow(c, prm.p) * P, std::pow(c, prm.q) * B, std::pow(c, prm.ab()) * D};
}

ReducedTriple reduce(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair) {
  if (pair.is_zero()) throw std::invalid_argument("zero pair has no fibering");
  return {pair_norm_pow(dom, pair, prm.p), concave_integral(prm, dom, pair), 2.0 * coupling_integral(prm, dom, pair)};
}

double phi(const ReducedTriple& tr, const ModelParams& prm, double t) {
  require_positive(t);
  const double ab = prm.ab();
  return std::pow(t, prm.p) / prm.p * tr.P - std::pow(t, prm.q) / prm.q * tr.B - std::pow(t, ab) / ab * tr.D;
}

double phi_prime(const ReducedTriple& tr, const ModelParams& prm, double t) {
  require_positive(t);
  return std::pow(t, prm.p - 1.0) * tr.P - std::pow(t, prm.q - 1.0) * tr.B - std::pow(t, prm.ab() - 1.0) * tr.D;
}

double phi_second(const ReducedTriple& tr, const ModelParams& prm, double t) {
  require_positive(t);
  const double ab = prm.ab();
  return (prm.p - 1.0) * std::pow(t, prm.p - 2.0) * tr.P - (prm.q - 1.0) * std::pow(t, prm.q - 2.0) * tr.B -
         (ab - 1.0) * std::pow(t, ab - 2.0) * tr.D;
}

double psi(const ReducedTriple& tr, const ModelParams& prm, double t) {
  require_positive(t);
  const double ab = prm.ab();
  return std::pow(t, prm.p - ab) * tr.P - std::pow(t, prm.q - ab) * tr.B;
}

double psi_prime(const ReducedTriple& tr, const ModelParams& prm, double t) {
  require_positive(t);
  const double ab = prm.ab();
  return (prm.p - ab) * std::pow(t, prm.p - ab - 1.0) * tr.P - (prm.q - ab) * std::pow(t, prm.q - ab - 1.0) * tr.B;
}

double t_max(const ReducedTriple& tr, const ModelParams& prm) {
  if (!(tr.B > 0.0)) throw std::domain_error("Psi has no interior maximum");
  if (!(tr.P > 0.0)) throw std::domain_error("t_max needs P > 0");
  const double ab = prm.ab();
  return std::pow((ab - prm.q) * tr.B / ((ab - prm.p) * tr.P), 1.0 / (prm.p - prm.q));
}

FiberingReport project(const ReducedTriple& tr, const ModelParams& prm) {
  if (!(tr.P > 0.0)) throw std::invalid_argument("zero pair has no fibering");
  FiberingReport rep;
  rep.triple = tr;
  rep.sigma = prm.sigma();
  rep.classification_at_1 = classify(tr, prm);
  const double ab = prm.ab();

  if (tr.B > 0.0) {
    rep.t_max = t_max(tr, prm);
    rep.psi_at_t_max = psi(tr, prm, *rep.t_max);
  }

  if (tr.B > 0.0 && tr.D > 0.0) {
    const double tm = *rep.t_max;
    if (tr.D >= *rep.psi_at_t_max) {
      rep.outcome = ProjectionOutcome::AboveThreshold;
      return rep;
    }
    // phi' < 0 at the concave-only and convex-only roots, which bracket t1 and t2;
    // the loops only absorb rounding at those endpoints.
    double lo = std::min(std::pow(tr.B / tr.P, 1.0 / (prm.p - prm.q)), tm);
    double hi = std::max(std::pow(tr.P / tr.D, 1.0 / (ab - prm.p)), tm);
    for (int guard = 0; !(gap(tr, prm, lo) < 0.0); ++guard) {
      if (guard > kMaxIterations || !(lo > 0.0)) throw NumericalError("could not bracket the N+ root");
      lo *= 0.5;
    }
    for (int guard = 0; !(phi_prime(tr, prm, hi) < 0.0); ++guard) {
      if (guard > kMaxIterations || !std::isfinite(hi)) throw NumericalError("could not bracket the N- root");
      hi *= 2.0;
    }
    rep.t1 = refine_root(tr, prm, lo, tm);

    rep.t2 = refine_root(tr, prm, tm, hi);
    rep.outcome = ProjectionOutcome::TwoRoots;
  } else if (tr.B > 0.0) {
    rep.t1 = std::pow(tr.B / tr.P, 1.0 / (prm.p - prm.q));
    rep.outcome = ProjectionOutcome::ConcaveOnly;
  } else if (tr.D > 0.0) {
    rep.t2 = std::pow(tr.P / tr.D, 1.0 / (ab - prm.p));
    rep.outcome = ProjectionOutcome::ConvexOnly;
  } else {
    rep.outcome = ProjectionOutcome::NoRoots;
  }
  if (rep.t1) rep.branch_energy_plus = phi(tr, prm, *rep.t1);
  if (rep.t2) rep.branch_energy_minus = phi(tr, prm, *rep.t2);
  return rep;
}

FiberingReport project(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair) {
  return project(reduce(prm, dom, pair), prm);
}

FieldPair project_to(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, Branch branch) {
  const auto rep = project(prm, dom, pair);
  const auto& root = branch == Branch::Nplus ? rep.t1 : rep.t2;
  if (branch != Branch::Nplus && branch != Branch::Nminus) throw std::invalid_argument("project_to needs Nplus or Nminus");
  if (!root) {
    throw NumericalError("left the two-root regime (" + to_string(rep.outcome) + "); try smaller lambda, mu");
  }
  return pair.scaled(*root);
}

Branch classify(const ReducedTriple& tr, const ModelParams& prm, double tol) {
  if (!(tr.P > 0.0)) return Branch::OffManifold;
  if (std::abs(tr.P - tr.B - tr.D) > tol * tr.P) return Branch::OffManifold;
  const double curv = phi_second(tr, prm, 1.0);
  if (std::abs(curv) <= tol * tr.P) return Branch::Nzero;
  return curv > 0.0 ? Branch::Nplus : Branch::Nminus;
}

Branch classify(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, double tol) {
  if (pair.is_zero()) return Branch::OffManifold;
  return classify(reduce(prm, dom, pair), prm, tol);
}

std::array<double, 4> phi_second_forms(const ReducedTriple& tr, const ModelParams& prm) {
  const double p = prm.p;
  const double q = prm.q;
  const double ab = prm.ab();
  const double C = 0.5 * tr.D;
  return {(p - 1.0) * tr.P - (q - 1.0) * tr.B - 2.0 * (ab - 1.0) * C,
          2.0 * (p - ab) * C + (p - q) * tr.B,
          (p - q) * tr.P - 2.0 * (ab - q) * C,
          (p - ab) * tr.P + (ab - q) * tr.B};
}

double phi_second_consistency(const ReducedTriple& tr, const ModelParams& prm, double tol) {
  if (!(tr.P > 0.0) || std::abs(tr.P - tr.B - tr.D) > tol * tr.P) {
    throw std::invalid_argument("phi'' identities need a pair on the manifold");
  }
  const auto e = phi_second_forms(tr, prm);
  double worst = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const double scale = std::max(std::abs(e[i]), std::abs(e[j]));
      if (scale > 0.0) worst = std::max(worst, std::abs(e[i] - e[j]) / scale);
    }
  }
  return worst;
}

double phi_second_consistency(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, double tol) {
  return phi_second_consistency(reduce(prm, dom, pair), prm, tol);
}

double xi_prime(const ModelParams& prm, const GridDomain& dom, const FieldPair& z, const FieldPair& omega,
                double tol) {
  const auto tr = reduce(prm, dom, z);
  if (std::abs(tr.P - tr.B - tr.D) > tol * tr.P) {
    throw std::invalid_argument("xi_prime needs z on the manifold");
  }
  const double p = prm.p;
  const double q = prm.q;
  const double ab = prm.ab();
  const double den = (p - q) * tr.P - (ab - q) * tr.D;
  if (std::abs(den) <= 1e-10 * tr.P) throw NumericalError("N0-degenerate direction");

  const double a = a_form(dom, z.u.span(), omega.u.span(), p) + a_form(dom, z.v.span(), omega.v.span(), p);
  const auto& u = z.u;
  const auto& v = z.v;
  const double k_term = q * dom.cell_volume() * deterministic_sum(z.size(), [&](std::size_t i) {
    return prm.lambda * signed_pow(u[i], q) * omega.u[i] + prm.mu * signed_pow(v[i], q) * omega.v[i];
  });
  const double d_term = 2.0 * dom.cell_volume() * deterministic_sum(z.size(), [&](std::size_t i) {
    return prm.alpha * signed_pow(u[i], prm.alpha) * pow_abs(v[i], prm.beta) * omega.u[i] +
           prm.beta * pow_abs(u[i], prm.alpha) * signed_pow(v[i], prm.beta) * omega.v[i];
  });
  return (p * a - k_term - d_term) / den;
}

}  // namespace nehari
