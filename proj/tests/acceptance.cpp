// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/bubbles.hpp"
#include "nehari/cli.hpp"
#include "nehari/constants.hpp"
#include "nehari/energy.hpp"
#include "nehari/fibering.hpp"
#include "nehari/io.hpp"
#include "nehari/norms.hpp"
#include "nehari/rng.hpp"
#include "nehari/solver.hpp"

using namespace nehari;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ModelParams reference(double lambda = 0.0, double mu = 0.0) {
  return ModelParams{2, 2.0, 0.4, 1.8, 5.0 / 3.0, 5.0 / 3.0, lambda, mu};
}

GridSpec reference_grid() {
  GridSpec g;
  g.n = 2;
  g.m = 12;
  return g;
}

FieldPair random_pair(std::size_t size, Rng& rng, double lo, double hi) {
  FieldPair z = FieldPair::zeros(size);
  for (std::size_t i = 0; i < size; ++i) z.u[i] = rng.uniform(lo, hi);
  for (std::size_t i = 0; i < size; ++i) z.v[i] = rng.uniform(lo, hi);
  return z;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

/// Shared state: reference lattice, discrete constants and the two-solution run.
struct Context {
  ModelParams base = reference();
  GridDomain dom{reference_grid(), base};
  ConstantsReport constants;
  ModelParams prm;  // lambda = mu at 1e-3 of Lambda_1
  std::optional<TwoSolutions> two;
  std::string two_error;
  fs::path tmp = NEHARI_TEST_TMP;
};

Outcome gradient_consistency(Context& ctx) {
  Rng rng(kSeed, Stream::Probe, 1);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto z = random_pair(ctx.dom.size(), rng, 0.1, 1.1);
    const auto w = random_pair(ctx.dom.size(), rng, -1.0, 1.0);
    const double eps = 1e-5;
    const double fd = (energy(ctx.prm, ctx.dom, FieldPair(z).axpy(eps, w)).total -
                       energy(ctx.prm, ctx.dom, FieldPair(z).axpy(-eps, w)).total) /
                      (2.0 * eps);
    worst = std::max(worst, rel(fd, first_variation(ctx.prm, ctx.dom, z, w)));
  }
  return {worst <= 1e-6, "max relative error " + fmt(worst) + " over 20 pairs (tol 1e-6)"};
}

Outcome fibering_suite(Context& ctx) {
  Rng rng(kSeed, Stream::Probe, 2);
  int failures = 0;
  double worst_root = 0.0, worst_identity = 0.0, worst_forms = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double amp = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const auto z = random_pair(ctx.dom.size(), rng, 0.1, 1.1).scaled(amp);
    const double frac = std::pow(10.0, rng.uniform(-4.0, -0.5));
    const double split = rng.uniform(0.1, 0.9);
    const double e = (ctx.base.p - ctx.base.q) / ctx.base.p;
    const double sigma = frac * ctx.constants.lambda1;
    const auto prm = ctx.base.with_lambda_mu(std::pow(split * sigma, e), std::pow((1.0 - split) * sigma, e));
    const auto tr = reduce(prm, ctx.dom, z);
    const auto rep = project(tr, prm);
    if (rep.outcome != ProjectionOutcome::TwoRoots) {
      ++failures;
      continue;
    }
    const double t1 = *rep.t1, t2 = *rep.t2, tm = *rep.t_max;
    bool ok = t1 < tm && tm < t2;
    for (double t : {t1, t2}) {
      const double scale = std::pow(t, prm.p - 1.0) * tr.P;
      const double r = std::abs(phi_prime(tr, prm, t)) / scale;
      worst_root = std::max(worst_root, r);
      const double lhs = std::pow(t, prm.ab() - 1.0) * psi_prime(tr, prm, t);
      const double rhs = phi_second(tr, prm, t);
      worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / std::abs(rhs));
      worst_forms = std::max(worst_forms, phi_second_consistency(tr.scaled(prm, t), prm));
    }
    ok = ok && phi_second(tr, prm, t1) > 0.0 && phi_second(tr, prm, t2) < 0.0;
    if (!ok) ++failures;
  }
  const bool pass = failures == 0 && worst_root <= 1e-10 && worst_identity <= 1e-10 && worst_forms <= 1e-10;
  return {pass, std::to_string(200 - failures) + "/200 pairs ordered two-root; max |phi'|/scale " + fmt(worst_root) +
                    ", identity " + fmt(worst_identity) + ", phi'' forms " + fmt(worst_forms)};
}

Outcome ratio_identity(Context& ctx) {
  std::string detail;
  bool pass = true;
  for (auto [a, b] : {std::pair{5.0 / 3.0, 5.0 / 3.0}, std::pair{2.0, 4.0 / 3.0}}) {
    auto prm = ctx.base;
    prm.alpha = a;
    prm.beta = b;
    const GridDomain dom(reference_grid(), prm);
    // independent random-restart descents, no warm start from the S-minimizer
    const auto S = compute_S(dom, prm, kSeed);
    const auto Sab = compute_S_alpha_beta(dom, prm, kSeed);
    const double err = ratio_check(S.value, Sab.value, prm);
    pass = pass && err <= 1e-3;
    detail += "(" + fmt(a) + "," + fmt(b) + "): S_ab/S = " + fmt(Sab.value / S.value) + " vs " +
              fmt(ratio_predicted(prm)) + ", rel err " + fmt(err) + "; ";
  }
  detail += "tol 1e-3";
  return {pass, detail};
}

Outcome two_solutions(Context& ctx) {
  if (!ctx.two) return {false, "solve_two failed: " + ctx.two_error};
  const auto& t = *ctx.two;
  const auto& c = t.constants;
  const bool order = t.plus.energy < 0.0 && 0.0 < c.d0.value && c.d0.value <= t.minus.energy &&
                     t.minus.energy < c.c_infty;
  const bool branches = t.plus.classification == Branch::Nplus && t.minus.classification == Branch::Nminus;
  const bool distinct = t.distance > 1e-6 && !t.plus.semitrivial && !t.minus.semitrivial;
  return {order && branches && distinct && t.all_pass(),
          "lambda=mu=" + fmt(ctx.prm.lambda) + ": J+=" + fmt(t.plus.energy) + " < 0 < d0=" + fmt(c.d0.value) +
              " <= J-=" + fmt(t.minus.energy) + " < c_infty=" + fmt(c.c_infty) + "; distance " + fmt(t.distance) +
              "; classes " + to_string(t.plus.classification) + "/" + to_string(t.minus.classification)};
}

Outcome lower_floor(Context& ctx) {
  if (!ctx.two) return {false, "no solutions from criterion 4"};
  const double floor = -ctx.two->constants.C0 * ctx.prm.sigma();
  const double m1 = ctx.two->plus.energy - floor;
  const double m2 = ctx.two->minus.energy - floor;
  return {m1 >= 0.0 && m2 >= 0.0,
          "floor " + fmt(floor) + "; margins J+ " + fmt(m1) + ", J- " + fmt(m2)};
}

Outcome xi_oracle(Context& ctx) {
  Rng rng(kSeed, Stream::Probe, 6);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Branch b = k % 2 == 0 ? Branch::Nplus : Branch::Nminus;
    const auto z = project_to(ctx.prm, ctx.dom, random_pair(ctx.dom.size(), rng, 0.1, 1.1), b);
    double zmax = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) zmax = std::max({zmax, std::abs(z.u[i]), std::abs(z.v[i])});
    const auto w = random_pair(ctx.dom.size(), rng, -1.0, 1.0).scaled(zmax);
    const double eps = 1e-4;
    auto scale = [&](double e) {
      const auto r = project(ctx.prm, ctx.dom, FieldPair(z).axpy(-e, w));
      return b == Branch::Nplus ? *r.t1 : *r.t2;
    };
    const double fd = (scale(eps) - scale(-eps)) / (2.0 * eps);
    worst = std::max(worst, rel(xi_prime(ctx.prm, ctx.dom, z, w), fd));
  }
  return {worst <= 1e-4, "max relative error " + fmt(worst) + " over 10 pairs (tol 1e-4)"};
}

Outcome bubble_scans(Context& ctx) {
  const auto U = RadialProfile::model(ctx.base);
  const double delta = 0.25 * ctx.dom.spec().box_length;
  std::vector<double> eps;
  for (double r : {0.25, 0.125, 0.0625, 0.03125}) eps.push_back(r * delta);
  const auto decay = decay_check(U, ctx.base, default_decay_grid(), 2.0);
  const auto norms = norm_estimate_scan(ctx.dom, ctx.base, U, delta, 2.0, eps, 0.3);
  const double lambda_fraction = 0.5;
  const double l = equal_split_parameter(ctx.base, lambda_fraction * ctx.constants.smallness_threshold);
  const auto sup = sup_energy_scan(ctx.dom, ctx.base.with_lambda_mu(l, l), U, delta, 2.0, eps, l, l,
                                   ctx.constants.S_ab_d, ctx.constants.C0);
  const bool a = decay.theta_halving.has_value();
  const bool b = norms.excess_ok && norms.deficit_ok;
  const bool c = sup.worst_t_star_error <= 1e-6;
  const bool d = sup.any_below;
  int below = 0;
  for (const auto& row : sup.rows) below += row.below_c_infty ? 1 : 0;
  return {a && b && c && d,
          std::string("(a) halving theta ") + (a ? fmt(*decay.theta_halving) : "none") + "; (b) excess slope " +
              fmt(norms.excess_slope) + " vs 1.2, deficit slope " + fmt(norms.deficit_slope) + " vs 2 (+-30%); (c) t* err " +
              fmt(sup.worst_t_star_error) + "; (d) lambda=mu=" + fmt(l) + ": " + std::to_string(below) + "/" +
              std::to_string(sup.rows.size()) + " rows with sup < c_infty=" + fmt(sup.rows.front().c_infty)};
}

Outcome scalar_identities(Context& ctx) {
  const auto prm = ctx.base.with_lambda_mu(0.8, 1.5);
  SolverOptions opts;
  opts.seed = kSeed;
  const auto u1 = solve_scalar_sublinear(prm, ctx.dom, prm.lambda, opts);
  const auto w = solve_scalar_sublinear(prm, ctx.dom, prm.mu, opts);
  const double dev = semitrivial_tmax_check(prm, ctx.dom, u1.u, w.u);
  const double worst = std::max(u1.identity_residual, w.identity_residual);
  return {worst <= 1e-8 && dev <= 1e-8, "identity residual " + fmt(worst) + ", t_max deviation " + fmt(dev) +
                                            " from " + fmt(semitrivial_tmax_predicted(prm)) + " (tol 1e-8)"};
}

RunConfig curve_config(const Context& ctx) {
  RunConfig cfg;
  cfg.params = ctx.prm;
  cfg.grid = reference_grid();
  cfg.seeds = {kSeed};
  cfg.raw = Json{{"params", to_json(ctx.prm)}, {"grid", to_json(cfg.grid)}};
  return cfg;
}

Outcome curve_shapes(Context& ctx) {
  const auto out = ctx.tmp / "curves";
  fs::create_directories(out);
  const auto res = cli::cmd_curves(curve_config(ctx), out);
  const auto& c = res.summary.at("curve");
  const bool argmax = c.at("argmax_within_step").get<bool>();
  const bool unimodal = c.at("psi_unimodal").get<bool>();
  const int changes = c.at("phi_prime_sign_changes").get<int>();
  return {argmax && unimodal && changes == 2,
          "Psi argmax error " + fmt(c.at("argmax_error").get<double>()) + " vs step " +
              fmt(c.at("sample_step_at_argmax").get<double>()) + ", unimodal " + (unimodal ? "yes" : "no") +
              ", phi' sign changes " + std::to_string(changes)};
}

std::string slurp_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + "\n" + read_text(f);
  return all;
}

Outcome determinism(Context& ctx) {
  const auto dir = ctx.tmp / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string params =
      R"("params": {"n": 2, "p": 2, "s": 0.4, "q": 1.8, "alpha": 1.6666666666666667, "beta": 1.6666666666666667, "lambda": )" +
      format_double(ctx.prm.lambda) + ", \"mu\": " + format_double(ctx.prm.mu) + "}";
  write_text(dir / "config.json", "{\n  " + params +
                                      ",\n  \"grid\": {\"n\": 2, \"m\": 12},\n  \"seeds\": [" + std::to_string(kSeed) +
                                      "],\n  \"bubble_scan\": {\"lambda_fractions\": [0.5]},\n"
                                      "  \"project\": {\"u\": \"run_a_solve/minus_u.json\", \"v\": \"run_a_solve/minus_v.json\"}\n}\n");
  const std::string cli = NEHARI_TEST_CLI;
  int identical = 0, total = 0;
  std::string failed;
  for (const std::string cmd : {"constants", "solve", "project", "bubble-scan", "curves"}) {
    std::string dirs[2];
    for (int r = 0; r < 2; ++r) {
      const std::string tag = std::string(r == 0 ? "run_a_" : "run_b_") + (cmd == "bubble-scan" ? "bubble" : cmd);
      dirs[r] = (dir / tag).string();
      const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + (dir / "config.json").string() +
                               "\" --out \"" + dirs[r] + "\" --quiet";
      const int code = std::system(line.c_str());
      if (code != 0) failed += cmd + "(exit " + std::to_string(code) + ") ";
    }
    ++total;
    if (fs::exists(dirs[0]) && slurp_dir(dirs[0]) == slurp_dir(dirs[1])) ++identical;
    else failed += cmd + "(differs) ";
  }
  return {identical == total && failed.empty(),
          std::to_string(identical) + "/" + std::to_string(total) + " commands byte-identical on rerun" +
              (failed.empty() ? "" : "; problems: " + failed)};
}

}  // namespace

int main() {
  Context ctx;
  fs::remove_all(ctx.tmp);
  fs::create_directories(ctx.tmp);
  try {
    ctx.constants = compute_constants(ctx.dom, ctx.base, kSeed);
    const double l = equal_split_parameter(ctx.base, 1e-3 * ctx.constants.lambda1);
    ctx.prm = ctx.base.with_lambda_mu(l, l);
  } catch (const std::exception& e) {
    std::cout << "FAIL setup: " << e.what() << "\n";
    return 1;
  }
  try {
    auto c = closed_forms(ctx.prm, ctx.constants.S_d, ctx.constants.S_ab_d, ctx.constants.volume);
    SolverOptions opts;
    opts.seed = kSeed;
    ctx.two = solve_two(ctx.prm, ctx.dom, opts, c);
  } catch (const std::exception& e) {
    ctx.two_error = e.what();
  }

  const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> criteria = {
      {"1 gradient consistency", gradient_consistency},
      {"2 fibering suite", fibering_suite},
      {"3 ratio identity", ratio_identity},
      {"4 two solutions", two_solutions},
      {"5 lower energy floor", lower_floor},
      {"6 xi' oracle", xi_oracle},
      {"7 bubble scans", bubble_scans},
      {"8 scalar identities", scalar_identities},
      {"9 fibering curve shapes", curve_shapes},
      {"10 CLI determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(secs) << " s]\n";
  }
  std::cout << (failures == 0 ? "all 10 criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
