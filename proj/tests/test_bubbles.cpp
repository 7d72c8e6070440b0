#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nehari/bubbles.hpp"
#include "nehari/norms.hpp"
#include "support.hpp"

using namespace nehari;
using namespace nehari::testing;

TEST_SUITE("bubbles") {
  const auto prm = reference_params();

  TEST_CASE("model profile values") {
    CHECK(model_profile(prm, 0.0) == 1.0);
    const auto half = ModelParams{2, 2.0, 0.5, 1.5, 2.0, 2.0, 0.0, 0.0};
    CHECK(model_profile(half, 1.0) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
    double prev = 1.0;
    for (int k = 1; k <= 200; ++k) {
      const double cur = model_profile(prm, 0.05 * k);
      CHECK(cur < prev);
      prev = cur;
    }
    CHECK_THROWS_AS((void)model_profile(prm, -1.0), std::domain_error);
  }

  TEST_CASE("rescaling") {
    const auto U = RadialProfile::model(prm);
    CHECK(U.proven_minimizer());
    for (double r : {0.0, 0.3, 2.0}) CHECK(rescale(U, prm, 1.0, r) == U(r));
    CHECK(rescale(U, prm, 0.1, 0.0) == doctest::Approx(std::pow(0.1, -0.6)).epsilon(1e-14));
  }

  TEST_CASE("tabulated profile interpolates the model") {
    std::vector<double> r, v;
    for (int k = 0; k <= 400; ++k) {
      r.push_back(0.025 * k);
      v.push_back(model_profile(prm, 0.025 * k));
    }
    const auto T = RadialProfile::tabulated(prm, r, v);
    CHECK_FALSE(T.proven_minimizer());
    CHECK(T(0.5) == doctest::Approx(model_profile(prm, 0.5)).epsilon(1e-3));
    CHECK(T(20.0) > 0.0);
  }

  TEST_CASE("truncation pieces") {
    const auto U = RadialProfile::model(prm);
    const auto tr = make_truncation(U, prm, 0.05, 0.25, 2.0);
    CHECK(tr.m == doctest::Approx(tr.U_delta / (tr.U_delta - tr.U_theta_delta)).epsilon(1e-15));
    const auto [g_top, G_top] = truncation(tr, prm, tr.U_delta);
    CHECK(G_top == doctest::Approx(tr.U_delta).epsilon(1e-14));
    const auto above = truncation(tr, prm, tr.U_delta * (1.0 + 1e-12));
    CHECK(above.second == doctest::Approx(G_top).epsilon(1e-10));
    CHECK(above.first == doctest::Approx(g_top).epsilon(1e-10));
    CHECK(truncation(tr, prm, tr.U_theta_delta).second == 0.0);
    const double mid = 0.5 * (tr.U_delta + tr.U_theta_delta);
    CHECK(truncation(tr, prm, mid).second == doctest::Approx(tr.m * (mid - tr.U_theta_delta)).epsilon(1e-14));
    CHECK(truncation(tr, prm, mid).first == doctest::Approx(tr.m * tr.m * (mid - tr.U_theta_delta)).epsilon(1e-14));
  }

  TEST_CASE("bubble field support and monotonicity") {
    const GridDomain dom(grid_spec(2, 20), prm);
    const auto U = RadialProfile::model(prm);
    const double eps = 0.05, delta = 0.2, theta = 2.0;
    const auto c = default_center(dom);
    const auto f = bubble_field(dom, prm, U, eps, delta, theta, c);
    std::vector<std::pair<double, double>> shells;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      const double r = std::hypot(dom.coord(i, 0) - c[0], dom.coord(i, 1) - c[1]);
      if (r >= theta * delta) CHECK(f[i] == 0.0);
      if (r <= delta) CHECK(f[i] == doctest::Approx(rescale(U, prm, eps, r)).epsilon(1e-14));
      shells.emplace_back(r, f[i]);
    }
    std::sort(shells.begin(), shells.end());
    for (std::size_t k = 1; k < shells.size(); ++k) CHECK(shells[k].second <= shells[k - 1].second + 1e-15);
    CHECK_THROWS_AS((void)bubble_field(dom, prm, U, eps, 0.3, theta, c), std::invalid_argument);
  }

  TEST_CASE("node centre lies on the lattice") {
    const GridDomain dom(grid_spec(2, 12), prm);
    const auto c = node_center(dom);
    CHECK(c[0] == doctest::Approx(6.0 / 13.0).epsilon(1e-15));
    CHECK(room_inside(dom, c) == doctest::Approx(6.0 / 13.0).epsilon(1e-15));
  }

  TEST_CASE("decay of the model profile") {
    const auto U = RadialProfile::model(prm);
    const double e = (2.0 - 0.8) / 1.0;
    CHECK(U(1e6) * std::pow(1e6, e) == doctest::Approx(1.0).epsilon(1e-9));
    const double theta_inf = std::pow(2.0, 1.0 / e);
    CHECK(U(theta_inf * 1e6) / U(1e6) == doctest::Approx(0.5).epsilon(1e-9));
    const auto rep = decay_check(U, prm, default_decay_grid(), 2.0);
    CHECK(rep.c1_hat <= rep.c2_hat);
    CHECK(rep.theta_asymptotic == doctest::Approx(theta_inf).epsilon(1e-14));
    REQUIRE(rep.theta_halving);
    CHECK(*rep.theta_halving >= theta_inf);
    const auto wide = decay_check(U, prm, default_decay_grid(), *rep.theta_halving);
    CHECK(wide.halving_ok);
  }

  TEST_CASE("q-regime labels") {
    CHECK(q_regime_label(prm) == "supercritical-q branch eps^(n-q(n-ps)/p)");
    auto crit = prm;
    crit.q = 5.0 / 3.0;
    CHECK(q_regime_label(crit) == "critical-q branch eps^(n-q(n-ps)/p)|log eps|");
    auto sub = prm;
    sub.q = 1.5;
    CHECK(q_regime_label(sub) == "subcritical-q branch eps^(q(n-ps)/(p(p-1)))");
  }

  TEST_CASE("norm scan on a small lattice") {
    const GridDomain dom(grid_spec(2, 10), prm);
    const auto U = RadialProfile::model(prm);
    const double delta = 0.25;
    const std::vector<double> eps{delta / 2, delta / 4, delta / 8};
    const auto scan = norm_estimate_scan(dom, prm, U, delta, 2.0, eps);
    CHECK(scan.excess_exponent == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(scan.deficit_exponent == doctest::Approx(2.0).epsilon(1e-15));
    REQUIRE(scan.rows.size() == 3);
    CHECK(std::isfinite(scan.rows[0].excess));
    CHECK(std::isfinite(scan.rows[0].deficit));
    CHECK(scan.rows[0].ratio == doctest::Approx(0.5));
    CHECK(scan.excess_nonnegative);
    CHECK(scan.monotone);
    CHECK_THROWS_AS((void)norm_estimate_scan(dom, prm, U, delta, 2.0, {0.6 * delta}), std::invalid_argument);
  }

  TEST_CASE("sup scan without parameters equals h(t*)") {
    const GridDomain dom(grid_spec(2, 10), prm);
    const auto U = RadialProfile::model(prm);
    const auto scan = sup_energy_scan(dom, prm, U, 0.25, 2.0, {0.0625, 0.03125}, 0.0, 0.0, 17.0, 0.1);
    for (const auto& row : scan.rows) {
      CHECK(rel_err(row.sup_full, row.h_closed) <= 1e-9);
      CHECK(rel_err(row.h_chain, row.h_closed) <= 1e-10);
      CHECK(rel_err(row.t_star_grid, row.t_star) <= 1e-6);
    }
    CHECK(scan.worst_t_star_error <= 1e-6);
  }

  TEST_CASE("loglog slope of a power law") {
    std::vector<double> x, y;
    for (int k = 1; k <= 5; ++k) {
      x.push_back(std::pow(2.0, -k));
      y.push_back(3.0 * std::pow(x.back(), 1.7));
    }
    CHECK(loglog_slope(x, y) == doctest::Approx(1.7).epsilon(1e-12));
  }

  TEST_CASE("grid_golden_argmax finds an interior maximum") {
    const double t = grid_golden_argmax([](double x) { return -std::pow(std::log(x / 3.0), 2.0); }, 1e-3, 1e3);
    CHECK(t == doctest::Approx(3.0).epsilon(1e-7));
  }
}
