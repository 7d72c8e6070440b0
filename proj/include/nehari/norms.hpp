#pragma once

#include <span>
#include <vector>

#include "nehari/field.hpp"
#include "nehari/grid.hpp"

namespace nehari {

/// Sum over stored pairs of w_ij |u_i-u_j|^p plus the collar terms kappa_i |u_i|^p.
[[nodiscard]] double seminorm_p_pow(const GridDomain& dom, std::span<const double> u, double p);
/// p-th root of seminorm_p_pow.
[[nodiscard]] double seminorm_p(const GridDomain& dom, std::span<const double> u, double p);

/// h^n sum_i |u_i|^r.
[[nodiscard]] double lr_pow(const GridDomain& dom, std::span<const double> u, double r);
/// (h^n sum_i |u_i|^r)^{1/r}.
[[nodiscard]] double lr_norm(const GridDomain& dom, std::span<const double> u, double r);

/// Nonlocal form A(u, phi) = sum w |u_i-u_j|^{p-2}(u_i-u_j)(phi_i-phi_j), collar included.
[[nodiscard]] double a_form(const GridDomain& dom, std::span<const double> u, std::span<const double> phi,
                            double p);

/// Vector with entries A(u, e_k) for the canonical basis e_k. When floor > 0 the
/// factor |d|^{p-2} is replaced by (d^2 + floor^2)^{(p-2)/2}.
[[nodiscard]] std::vector<double> a_gradient(const GridDomain& dom, std::span<const double> u, double p,
                                             double floor = 0.0);

/// (seminorm_p(u)^p + seminorm_p(v)^p)^{1/p}.
[[nodiscard]] double pair_norm(const GridDomain& dom, const FieldPair& pair, double p);
/// seminorm_p(u)^p + seminorm_p(v)^p.
[[nodiscard]] double pair_norm_pow(const GridDomain& dom, const FieldPair& pair, double p);

}  // namespace nehari
