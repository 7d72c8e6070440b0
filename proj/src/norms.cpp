#include "nehari/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "nehari/summation.hpp"

namespace nehari {

namespace {

void require_size(const GridDomain& dom, std::span<const double> u) {
  if (u.size() != dom.size()) throw std::invalid_argument("field size does not match the domain");
}

double flux(double d, double p, double floor) {
  if (floor > 0.0) {
    if (d == 0.0) return 0.0;
    return std::pow(d * d + floor * floor, 0.5 * (p - 2.0)) * d;
  }
  return signed_pow(d, p);
}

}  // namespace

double seminorm_p_pow(const GridDomain& dom, std::span<const double> u, double p) {
  require_size(dom, u);
  const auto& pairs = dom.pairs();
  const auto kappa = dom.kappa();
  const std::size_t np = pairs.size();
  return deterministic_sum(np + u.size(), [&](std::size_t k) {
    if (k < np) {
      const auto& pr = pairs[k];
      return pr.w * pow_abs(u[pr.i] - u[pr.j], p);
    }
    const std::size_t i = k - np;
    return kappa[i] * pow_abs(u[i], p);
  });
}

double seminorm_p(const GridDomain& dom, std::span<const double> u, double p) {
  return std::pow(seminorm_p_pow(dom, u, p), 1.0 / p);
}

double lr_pow(const GridDomain& dom, std::span<const double> u, double r) {
  require_size(dom, u);
  if (r < 1.0) throw std::invalid_argument("lr_norm needs r >= 1");
  return dom.cell_volume() * deterministic_sum(u.size(), [&](std::size_t i) { return pow_abs(u[i], r); });
}

double lr_norm(const GridDomain& dom, std::span<const double> u, double r) {
  return std::pow(lr_pow(dom, u, r), 1.0 / r);
}

double a_form(const GridDomain& dom, std::span<const double> u, std::span<const double> phi, double p) {
  require_size(dom, u);
  require_size(dom, phi);
  const auto& pairs = dom.pairs();
  const auto kappa = dom.kappa();
  const std::size_t np = pairs.size();
  return deterministic_sum(np + u.size(), [&](std::size_t k) {
    if (k < np) {
      const auto& pr = pairs[k];
      return pr.w * signed_pow(u[pr.i] - u[pr.j], p) * (phi[pr.i] - phi[pr.j]);
    }
    const std::size_t i = k - np;
    return kappa[i] * signed_pow(u[i], p) * phi[i];
  });
}

std::vector<double> a_gradient(const GridDomain& dom, std::span<const double> u, double p, double floor) {
  require_size(dom, u);
  const auto& pairs = dom.pairs();
  const auto kappa = dom.kappa();
  const std::size_t N = u.size();
  std::vector<std::vector<double>> partial(kReductionChunks);
  for_each_chunk(pairs.size(), [&](std::size_t c, std::size_t b, std::size_t e) {
    if (b == e) return;
    auto& buf = partial[c];
    buf.assign(N, 0.0);
    for (std::size_t k = b; k < e; ++k) {
      const auto& pr = pairs[k];
      const double f = pr.w * flux(u[pr.i] - u[pr.j], p, floor);
      buf[pr.i] += f;
      buf[pr.j] -= f;
    }
  });
  std::vector<double> grad(N);
  for (std::size_t i = 0; i < N; ++i) {
    CompensatedSum acc;
    for (const auto& buf : partial)
      if (!buf.empty()) acc.add(buf[i]);
    acc.add(kappa[i] * flux(u[i], p, floor));
    grad[i] = acc.value();
  }
  return grad;
}

double pair_norm_pow(const GridDomain& dom, const FieldPair& pair, double p) {
  return seminorm_p_pow(dom, pair.u.span(), p) + seminorm_p_pow(dom, pair.v.span(), p);
}

double pair_norm(const GridDomain& dom, const FieldPair& pair, double p) {
  return std::pow(pair_norm_pow(dom, pair, p), 1.0 / p);
}

}  // namespace nehari
