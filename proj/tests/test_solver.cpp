#include <doctest.h>

#include <cmath>

#include "nehari/constants.hpp"
#include "nehari/energy.hpp"
#include "nehari/norms.hpp"
#include "nehari/solver.hpp"
#include "support.hpp"

using namespace nehari;
using namespace nehari::testing;

TEST_SUITE("solver") {
  const auto base = reference_params();
  const GridDomain dom(grid_spec(2, 8), base);
  const auto constants = compute_constants(dom, base, 3);
  const double l_small = equal_split_parameter(base, 1e-3 * constants.lambda1);
  const auto prm = base.with_lambda_mu(l_small, l_small);

  TEST_CASE("N+ descent from a small random start ends with negative energy") {
    FieldPair init = random_pair(dom.size(), 1).scaled(1e-2);
    const auto rep = minimize_on_branch(prm, dom, Branch::Nplus, init);
    CHECK(rep.energy < 0.0);
    CHECK(rep.classification == Branch::Nplus);
    CHECK(rep.relative_residual <= 1e-5);
    CHECK(rep.energy_monotone);
    for (std::size_t k = 1; k < rep.energy_trace.size(); ++k) {
      CHECK(rep.energy_trace[k] <= rep.energy_trace[k - 1] + 1e-12 * std::abs(rep.energy_trace[k - 1]));
    }
  }

  TEST_CASE("N- descent stays above the d0 bound") {
    const auto c = closed_forms(prm, constants.S_d, constants.S_ab_d, constants.volume);
    const auto rep = minimize_on_branch(prm, dom, Branch::Nminus, random_pair(dom.size(), 2));
    CHECK(rep.classification == Branch::Nminus);
    CHECK(rep.energy >= c.d0.value);
    CHECK(rep.energy_monotone);
  }

  TEST_CASE("two solutions with all checks") {
    auto c = closed_forms(prm, constants.S_d, constants.S_ab_d, constants.volume);
    const auto two = solve_two(prm, dom, {}, c);
    CHECK(two.plus.energy < 0.0);
    CHECK(two.minus.energy > 0.0);
    CHECK(two.distance > 1e-6);
    for (const auto& check : two.checks) {
      INFO(check.name, " = ", check.value);
      CHECK(check.pass);
    }
    CHECK(two.all_pass());
    const auto g = gradient_vector(prm, dom, two.minus.pair);
    CHECK(euclidean_norm(g) == doctest::Approx(two.minus.residual).epsilon(1e-12));
  }

  TEST_CASE("zero parameters are rejected") {
    CHECK_THROWS_WITH_AS((void)solve_two(base, dom, {}, constants), doctest::Contains("parameters must be positive"),
                         InputError);
  }

  TEST_CASE("swapping lambda and mu swaps the components") {
    const double a = 0.7 * l_small;
    const double b = 1.3 * l_small;
    const auto p1 = base.with_lambda_mu(a, b);
    const auto p2 = base.with_lambda_mu(b, a);
    const auto z = random_pair(dom.size(), 5).scaled(1e-2);
    const auto r1 = minimize_on_branch(p1, dom, Branch::Nplus, z);
    const auto r2 = minimize_on_branch(p2, dom, Branch::Nplus, z.swapped());
    CHECK(rel_err(r1.energy, r2.energy) <= 1e-6);
    CHECK(normalized_distance(dom, p1, r1.pair, r2.pair.swapped()) <= 1e-4);
  }

  TEST_CASE("scalar sublinear solve identities") {
    const auto s = solve_scalar_sublinear(prm, dom, 0.8);
    CHECK(s.energy < 0.0);
    CHECK(s.identity_residual <= 1e-8);
    const auto s3 = solve_scalar_sublinear(prm, dom, 2.4);
    const double c = std::pow(3.0, 1.0 / (prm.p - prm.q));
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      worst = std::max(worst, std::abs(s3.u[i] - c * s.u[i]));
      scale = std::max(scale, std::abs(s3.u[i]));
    }
    CHECK(worst <= 1e-4 * scale);
  }

  TEST_CASE("semitrivial t_max") {
    CHECK(semitrivial_tmax_predicted(prm) == doctest::Approx(2.0113571875).epsilon(1e-12));
    CHECK(semitrivial_tmax_predicted(prm) > 1.0);
    const auto p2 = base.with_lambda_mu(0.8, 1.5);
    const auto u1 = solve_scalar_sublinear(p2, dom, p2.lambda);
    const auto w = solve_scalar_sublinear(p2, dom, p2.mu);
    CHECK(semitrivial_tmax_check(p2, dom, u1.u, w.u) <= 1e-8);
    CHECK_THROWS_AS((void)semitrivial_tmax_check(p2, dom, u1.u, u1.u.scaled(2.0)), std::invalid_argument);
  }
}
