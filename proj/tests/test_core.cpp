#include <doctest.h>

#include <cmath>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/norms.hpp"
#include "nehari/params.hpp"
#include "nehari/rng.hpp"
#include "nehari/summation.hpp"
#include "support.hpp"

using namespace nehari;
using namespace nehari::testing;

TEST_SUITE("params") {
  TEST_CASE("reference parameters validate and derived exponents") {
    const auto prm = reference_params();
    CHECK_NOTHROW(prm.validate());
    CHECK(prm.p_star() == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
    CHECK(prm.critical());
    CHECK(prm.with_lambda_mu(1.0, 2.0).sigma() ==
          doctest::Approx(1.0 + std::pow(2.0, 10.0)).epsilon(1e-12));
  }

  TEST_CASE("invalid parameters are rejected") {
    auto prm = reference_params();
    prm.s = 1.0;
    CHECK_THROWS_AS(prm.validate(), InputError);
    prm = reference_params();
    prm.q = 2.5;
    CHECK_THROWS_AS(prm.validate(), InputError);
    prm = reference_params();
    prm.alpha = 0.5;
    CHECK_THROWS_AS(prm.validate(), InputError);
    prm = reference_params(-1.0, 0.0);
    CHECK_THROWS_AS(prm.validate(), InputError);
  }

  TEST_CASE("equal split reproduces sigma") {
    const auto prm = reference_params();
    const double l = equal_split_parameter(prm, 7.5);
    CHECK(prm.with_lambda_mu(l, l).sigma() == doctest::Approx(7.5).epsilon(1e-13));
  }
}

TEST_SUITE("grid") {
  TEST_CASE("one-dimensional pair weight equals h^{1-ps}") {
    const auto prm = ModelParams{1, 2.0, 0.4, 1.5, 2.0, 2.0, 0.0, 0.0};
    const GridDomain dom(grid_spec(1, 2), prm);
    const double h = 1.0 / 3.0;
    CHECK(dom.size() == 2);
    CHECK(dom.collar_layers() == 3);
    CHECK(dom.collar_size() == 6);
    CHECK(dom.interior_weight(0, 1) == doctest::Approx(std::pow(h, 1.0 - 0.8)).epsilon(1e-14));
  }

  TEST_CASE("adjacent weight for m=3, s=0.4, p=2 is h^0.2") {
    const auto prm = ModelParams{1, 2.0, 0.4, 1.5, 2.0, 2.0, 0.0, 0.0};
    const GridDomain dom(grid_spec(1, 3), prm);
    CHECK(dom.interior_weight(0, 1) == doctest::Approx(std::pow(0.25, 0.2)).epsilon(1e-14));
    CHECK(dom.interior_weight(1, 2) == dom.interior_weight(0, 1));
  }

  TEST_CASE("counting nodes and volume in 2D") {
    const GridDomain dom(grid_spec(2, 4), reference_params());
    const double h = 0.2;
    CHECK(dom.size() == 16);
    CHECK(dom.volume() == doctest::Approx(16 * h * h).epsilon(1e-14));
    CHECK(dom.pairs().size() == 16 * 15 / 2);
  }

  TEST_CASE("weights are symmetric and kappa sums collar weights") {
    const GridDomain dom(grid_spec(2, 5), reference_params());
    for (std::size_t i = 0; i < dom.size(); ++i) {
      for (std::size_t j = i + 1; j < dom.size(); ++j) CHECK(dom.interior_weight(i, j) == dom.interior_weight(j, i));
      long double sum = 0.0L;
      for (std::size_t c = 0; c < dom.collar_size(); ++c) sum += dom.collar_weight(i, c);
      CHECK(static_cast<double>(sum) == doctest::Approx(dom.kappa()[i]).epsilon(1e-13));
    }
  }

  TEST_CASE("memory cap produces a grid-too-large error") {
    auto spec = grid_spec(2, 30);
    spec.memory_cap_bytes = 1024;
    CHECK_THROWS_WITH_AS(GridDomain(spec, reference_params()), doctest::Contains("grid too large"), InputError);
  }

  TEST_CASE("ball shape keeps only the inscribed nodes") {
    auto spec = grid_spec(2, 8);
    spec.shape = DomainShape::Ball;
    const GridDomain ball(spec, reference_params());
    const GridDomain box(grid_spec(2, 8), reference_params());
    CHECK(ball.size() < box.size());
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const double dx = ball.coord(i, 0) - 0.5;
      const double dy = ball.coord(i, 1) - 0.5;
      CHECK(dx * dx + dy * dy < 0.25);
    }
  }

  TEST_CASE("extended lattice contains the computational cube") {
    const GridDomain dom(grid_spec(1, 4), ModelParams{1, 2.0, 0.4, 1.5, 2.0, 2.0, 0.0, 0.0});
    const auto ext = dom.extended();
    CHECK(ext.size() == dom.size() + dom.collar_size());
    CHECK(ext.spacing() == dom.spacing());
  }
}

TEST_SUITE("norms") {
  const auto prm = reference_params();

  TEST_CASE("zero field has zero seminorm and norm") {
    const GridDomain dom(grid_spec(2, 5), prm);
    const Field z(dom.size());
    CHECK(seminorm_p(dom, z.span(), 2.0) == 0.0);
    CHECK(lr_norm(dom, z.span(), 3.0) == 0.0);
  }

  TEST_CASE("seminorm is absolutely homogeneous") {
    const GridDomain dom(grid_spec(2, 6), prm);
    const auto u = random_field(dom.size(), 3);
    for (double p : {2.0, 1.5, 3.0}) {
      CHECK(seminorm_p(dom, u.scaled(-3.7).span(), p) ==
            doctest::Approx(3.7 * seminorm_p(dom, u.span(), p)).epsilon(1e-13));
    }
  }

  TEST_CASE("indicator of one node gives the hand-enumerated pair sum") {
    const auto p1 = ModelParams{1, 2.0, 0.4, 1.5, 2.0, 2.0, 0.0, 0.0};
    const GridDomain dom(grid_spec(1, 2), p1);
    const double h = 1.0 / 3.0;
    auto w = [&](double d) { return std::pow(h, 1.0 - 0.8) * std::pow(d, -1.8); };
    // node 1 against interior node 2 and collar nodes -2..0, 3..5
    const double expected = w(1) + w(3) + w(2) + w(1) + w(2) + w(3) + w(4);
    const Field u(std::vector<double>{1.0, 0.0});
    CHECK(seminorm_p(dom, u.span(), 2.0) == doctest::Approx(std::sqrt(expected)).epsilon(1e-14));
  }

  TEST_CASE("Lebesgue norms") {
    const GridDomain dom(grid_spec(2, 4), prm);
    const Field one(dom.size(), 1.0);
    CHECK(lr_norm(dom, one.span(), 3.0) == doctest::Approx(std::cbrt(16 * 0.04)).epsilon(1e-14));
    const GridDomain unit(grid_spec(1, 2, 3.0), ModelParams{1, 2.0, 0.4, 1.5, 2.0, 2.0, 0.0, 0.0});
    CHECK(unit.spacing() == 1.0);
    const Field u(std::vector<double>{3.0, 4.0});
    CHECK(lr_norm(unit, u.span(), 2.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)lr_norm(unit, u.span(), 0.5), std::invalid_argument);
  }

  TEST_CASE("a_form identities") {
    const GridDomain dom(grid_spec(2, 6), prm);
    const auto u = random_field(dom.size(), 5);
    const auto phi = random_field(dom.size(), 6);
    for (double p : {2.0, 2.5, 1.7}) {
      CHECK(a_form(dom, u.span(), u.span(), p) == doctest::Approx(seminorm_p_pow(dom, u.span(), p)).epsilon(1e-13));
      const double t = -1.9;
      CHECK(a_form(dom, u.scaled(t).span(), phi.span(), p) ==
            doctest::Approx(-std::pow(1.9, p - 1.0) * a_form(dom, u.span(), phi.span(), p)).epsilon(1e-12));
    }
  }

  TEST_CASE("a_form on two nodes by hand") {
    const auto p1 = ModelParams{1, 3.0, 0.2, 1.5, 2.0, 2.0, 0.0, 0.0};
    const GridDomain dom(grid_spec(1, 2), p1);
    const Field u(std::vector<double>{2.0, -1.0});
    const Field phi(std::vector<double>{0.5, 1.5});
    const double w12 = dom.interior_weight(0, 1);
    const auto kappa = dom.kappa();
    const double expected = w12 * 9.0 * (-1.0) + kappa[0] * 4.0 * 0.5 + kappa[1] * (-1.0) * 1.5;
    CHECK(a_form(dom, u.span(), phi.span(), 3.0) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("a_gradient matches a_form against basis vectors") {
    const GridDomain dom(grid_spec(2, 5), prm);
    const auto u = random_field(dom.size(), 8);
    const auto g = a_gradient(dom, u.span(), 2.5, 0.0);
    for (std::size_t i = 0; i < dom.size(); i += 3) {
      Field e(dom.size());
      e[i] = 1.0;
      CHECK(g[i] == doctest::Approx(a_form(dom, u.span(), e.span(), 2.5)).epsilon(1e-12));
    }
  }

  TEST_CASE("pair norm identities") {
    const GridDomain dom(grid_spec(2, 5), prm);
    const auto u = random_field(dom.size(), 9);
    const auto v = random_field(dom.size(), 10);
    const Field zero(dom.size());
    CHECK(pair_norm(dom, {u, zero}, 2.0) == doctest::Approx(seminorm_p(dom, u.span(), 2.0)).epsilon(1e-14));
    CHECK(pair_norm(dom, {u, u}, 2.0) ==
          doctest::Approx(std::pow(2.0, 0.5) * seminorm_p(dom, u.span(), 2.0)).epsilon(1e-14));
    CHECK(pair_norm(dom, FieldPair(u, v).scaled(-2.5), 2.0) ==
          doctest::Approx(2.5 * pair_norm(dom, {u, v}, 2.0)).epsilon(1e-13));
  }
}

TEST_SUITE("summation") {
  TEST_CASE("compensated sum recovers cancellation") {
    CompensatedSum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1.0);
  }

  TEST_CASE("deterministic_sum is independent of the thread cap") {
    auto term = [](std::size_t k) { return std::sin(0.001 * static_cast<double>(k)) / (1.0 + k); };
    const double a = deterministic_sum(200000, term);
    const double b = deterministic_sum(200000, term);
    CHECK(a == b);
    long double ref = 0.0L;
    for (std::size_t k = 0; k < 200000; ++k) ref += term(k);
    CHECK(a == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  }

  TEST_CASE("pow helpers") {
    CHECK(pow_abs(-3.0, 2.0) == 9.0);
    CHECK(pow_abs(-2.0, 3.0) == 8.0);
    CHECK(signed_pow(-2.0, 3.0) == -4.0);
    CHECK(signed_pow(0.0, 1.5) == 0.0);
  }
}

TEST_SUITE("rng") {
  TEST_CASE("streams are reproducible and distinct") {
    Rng a(42, Stream::Probe, 3);
    Rng b(42, Stream::Probe, 3);
    Rng c(42, Stream::Probe, 4);
    Rng d(42, Stream::Sobolev, 3);
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x != d.uniform());
  }

  TEST_CASE("uniform stays in range") {
    Rng r(7);
    for (int k = 0; k < 10000; ++k) {
      const double x = r.uniform(0.1, 1.1);
      CHECK((x >= 0.1 && x < 1.1));
    }
  }
}
