#include "nehari/energy.hpp"

#include "nehari/norms.hpp"
#include "nehari/summation.hpp"

namespace nehari {

double concave_integral(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair) {
  const auto& u = pair.u;
  const auto& v = pair.v;
  return dom.cell_volume() * deterministic_sum(pair.size(), [&](std::size_t i) {
           return prm.lambda * pow_abs(u[i], prm.q) + prm.mu * pow_abs(v[i], prm.q);
         });
}

double coupling_integral(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair) {
  const auto& u = pair.u;
  const auto& v = pair.v;
  return dom.cell_volume() * deterministic_sum(pair.size(), [&](std::size_t i) {
           return pow_abs(u[i], prm.alpha) * pow_abs(v[i], prm.beta);
         });
}

EnergyBreakdown energy(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair) {
  EnergyBreakdown out;
  out.gradient_term = pair_norm_pow(dom, pair, prm.p) / prm.p;
  out.concave_term = concave_integral(prm, dom, pair) / prm.q;
  out.coupling_term = 2.0 * coupling_integral(prm, dom, pair) / prm.ab();
  out.total = out.gradient_term - out.concave_term - out.coupling_term;
  return out;
}

double first_variation(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, const FieldPair& test) {
  pair.u.check_same(test.u);
  const double a = a_form(dom, pair.u.span(), test.u.span(), prm.p) + a_form(dom, pair.v.span(), test.v.span(), prm.p);
  const auto& u = pair.u;
  const auto& v = pair.v;
  const double ca = 2.0 * prm.alpha / prm.ab();
  const double cb = 2.0 * prm.beta / prm.ab();
  const double rest = deterministic_sum(pair.size(), [&](std::size_t i) {
    const double ua = pow_abs(u[i], prm.alpha);
    const double vb = pow_abs(v[i], prm.beta);
    const double conc = prm.lambda * signed_pow(u[i], prm.q) * test.u[i] + prm.mu * signed_pow(v[i], prm.q) * test.v[i];
    const double coup = ca * signed_pow(u[i], prm.alpha) * vb * test.u[i] + cb * ua * signed_pow(v[i], prm.beta) * test.v[i];
    return conc + coup;
  });
  return a - dom.cell_volume() * rest;
}

FieldPair gradient_vector(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair, double floor) {
  const auto gu = a_gradient(dom, pair.u.span(), prm.p, floor);
  const auto gv = a_gradient(dom, pair.v.span(), prm.p, floor);
  const std::size_t N = pair.size();
  const double hn = dom.cell_volume();
  const double ca = 2.0 * prm.alpha / prm.ab();
  const double cb = 2.0 * prm.beta / prm.ab();
  FieldPair out = FieldPair::zeros(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double u = pair.u[i];
    const double v = pair.v[i];
    const double du = prm.lambda * signed_pow(u, prm.q) + ca * signed_pow(u, prm.alpha) * pow_abs(v, prm.beta);
    const double dv = prm.mu * signed_pow(v, prm.q) + cb * pow_abs(u, prm.alpha) * signed_pow(v, prm.beta);
    out.u[i] = gu[i] - hn * du;
    out.v[i] = gv[i] - hn * dv;
  }
  return out;
}

double nehari_constraint(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair) {
  return pair_norm_pow(dom, pair, prm.p) - concave_integral(prm, dom, pair) - 2.0 * coupling_integral(prm, dom, pair);
}

}  // namespace nehari
