#include "nehari/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nehari/bubbles.hpp"
#include "nehari/constants.hpp"
#include "nehari/fibering.hpp"
#include "nehari/rng.hpp"
#include "nehari/solver.hpp"

namespace nehari::cli {

namespace fs = std::filesystem;

namespace {

QuotientOptions quotient_options(const RunConfig& cfg) {
  QuotientOptions q;
  q.tol = cfg.tolerances.quotient;
  q.restarts = cfg.tolerances.quotient_restarts;
  q.max_iterations = cfg.tolerances.quotient_max_iterations;
  return q;
}

Json header(const RunConfig& cfg, const std::string& command, const GridDomain& dom) {
  return Json{{"command", command},
              {"config_hash", cfg.hash()},
              {"seed", cfg.seed()},
              {"params", to_json(cfg.params)},
              {"domain", domain_json(dom, cfg.params)},
              {"domain_hash", domain_hash(dom, cfg.params)}};
}

void write_json(const fs::path& out, const std::string& name, const Json& j, std::vector<std::string>& files) {
  write_text(out / name, j.dump(2) + "\n");
  files.push_back(name);
}

std::string csv_number(double x) { return format_double(x); }

/// Log-spaced samples on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
  t.front() = lo;
  t.back() = hi;
  return t;
}

struct CurveTable {
  std::string csv;
  Json summary;
};

/// Samples of phi, phi', phi'' and Psi covering t_max and both roots.
CurveTable fibering_curves(const ReducedTriple& tr, const ModelParams& prm, const FiberingReport& rep, double lo_factor,
                           double hi_factor, int points) {
  const double tm = t_max(tr, prm);
  double lo = lo_factor * tm;
  double hi = hi_factor * tm;
  if (rep.t1) lo = std::min(lo, 0.5 * *rep.t1);
  if (rep.t2) hi = std::max(hi, 2.0 * *rep.t2);
  const auto t = log_grid(lo, hi, points);

  CsvWriter csv({"t", "phi", "phi_prime", "phi_second", "psi"});
  std::vector<double> dphi(t.size());
  std::vector<double> ps(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    dphi[k] = phi_prime(tr, prm, t[k]);
    ps[k] = psi(tr, prm, t[k]);
    csv.row({csv_number(t[k]), csv_number(phi(tr, prm, t[k])), csv_number(dphi[k]), csv_number(phi_second(tr, prm, t[k])),
             csv_number(ps[k])});
  }
  const auto arg = static_cast<std::size_t>(std::distance(ps.begin(), std::max_element(ps.begin(), ps.end())));
  int sign_changes = 0;
  for (std::size_t k = 1; k < dphi.size(); ++k)
    if ((dphi[k - 1] > 0.0) != (dphi[k] > 0.0)) ++sign_changes;
  bool unimodal = true;
  for (std::size_t k = 1; k < ps.size(); ++k) {
    if (k <= arg && ps[k] < ps[k - 1]) unimodal = false;
    if (k > arg && ps[k] > ps[k - 1]) unimodal = false;
  }
  const double step = arg + 1 < t.size() ? t[arg + 1] - t[arg] : t[arg] - t[arg - 1];
  Json s{{"points", points},
         {"t_lo", lo},
         {"t_hi", hi},
         {"t_max", tm},
         {"psi_argmax_sample", t[arg]},
         {"argmax_error", std::abs(t[arg] - tm)},
         {"sample_step_at_argmax", step},
         {"argmax_within_step", std::abs(t[arg] - tm) <= step},
         {"psi_unimodal", unimodal},
         {"phi_prime_sign_changes", sign_changes}};
  return {csv.str(), s};
}

FieldPair random_pair(const GridDomain& dom, std::uint64_t seed) {
  Rng rng(seed, Stream::Probe, 0);
  FieldPair z = FieldPair::zeros(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    z.u[i] = rng.uniform(0.1, 1.1);
    z.v[i] = rng.uniform(0.1, 1.1);
  }
  return z;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void write_manifest(const fs::path& out, const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& files) {
  nlohmann::json manifest;
  if (fs::exists(out / "manifest.json")) {
    try {
      manifest = nlohmann::json::parse(read_text(out / "manifest.json"));
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object();
    }
  }
  nlohmann::json entry{{"config_hash", cfg.hash()}, {"seed", cfg.seed()}};
  for (const auto& f : files) entry["files"][f] = sha256_hex(read_text(out / f));
  manifest["commands"][command] = entry;
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

CommandResult cmd_constants(const RunConfig& cfg, const fs::path& out) {
  const GridDomain dom(cfg.grid, cfg.params);
  const auto report = compute_constants(dom, cfg.params, cfg.seed(), quotient_options(cfg));
  CommandResult res;
  Json j = header(cfg, "constants", dom);
  j["report"] = to_json(report);
  write_json(out, "constants.json", j, res.files);
  res.summary = j;
  return res;
}

CommandResult cmd_project(const RunConfig& cfg, const fs::path& config_dir, const fs::path& out) {
  if (cfg.project.u_path.empty() || cfg.project.v_path.empty()) {
    throw InputError("project needs a 'project' block with field paths 'u' and 'v'");
  }
  const GridDomain dom(cfg.grid, cfg.params);
  const FieldPair pair(read_field(resolve(config_dir, cfg.project.u_path), dom, cfg.params),
                       read_field(resolve(config_dir, cfg.project.v_path), dom, cfg.params));
  const auto rep = project(cfg.params, dom, pair);
  CommandResult res;
  Json j = header(cfg, "project", dom);
  j["report"] = to_json(rep);
  if (cfg.project.emit_curve && rep.t_max) {
    const auto curve = fibering_curves(rep.triple, cfg.params, rep, 1e-2, 1e2, cfg.project.curve_points);
    write_text(out / "project_curve.csv", curve.csv);
    res.files.push_back("project_curve.csv");
    j["curve"] = curve.summary;
  }
  write_json(out, "project.json", j, res.files);
  res.summary = j;
  return res;
}

CommandResult cmd_solve(const RunConfig& cfg, const fs::path& out) {
  const GridDomain dom(cfg.grid, cfg.params);
  ModelParams prm = cfg.params;
  std::optional<ConstantsReport> constants;
  if (cfg.solve.lambda_mode == "fraction_of_lambda1") {
    const auto base = compute_constants(dom, prm, cfg.seed(), quotient_options(cfg));
    const double l = equal_split_parameter(prm, cfg.solve.lambda_fraction * base.lambda1);
    prm = prm.with_lambda_mu(l, l);
    auto c = closed_forms(prm, base.S_d, base.S_ab_d, base.volume);
    c.iterations_S = base.iterations_S;
    c.iterations_S_ab = base.iterations_S_ab;
    constants = c;
  } else if (!(prm.lambda > 0.0) || !(prm.mu > 0.0)) {
    throw InputError("parameters must be positive (lambda = " + format_double(prm.lambda) +
                     ", mu = " + format_double(prm.mu) + ")");
  }

  SolverOptions opts;
  opts.seed = cfg.seed();
  opts.grad_tol = cfg.tolerances.solver_grad;
  opts.max_iterations = cfg.tolerances.solver_max_iterations;
  opts.starts_plus = cfg.solve.starts_plus;
  opts.starts_minus = cfg.solve.starts_minus;
  if (!constants) constants = compute_constants(dom, prm, cfg.seed(), quotient_options(cfg));
  const auto two = solve_two(prm, dom, opts, constants);

  CommandResult res;
  Json j = header(cfg, "solve", dom);
  j["params"] = to_json(prm);
  j["lambda_mode"] = cfg.solve.lambda_mode;
  j["report"] = to_json(two);
  j["all_pass"] = two.all_pass();
  if (cfg.solve.save_fields) {
    const std::pair<const char*, const Field*> fields[] = {{"plus_u", &two.plus.pair.u},
                                                           {"plus_v", &two.plus.pair.v},
                                                           {"minus_u", &two.minus.pair.u},
                                                           {"minus_v", &two.minus.pair.v}};
    for (const auto& [name, f] : fields) {
      write_field(out / name, dom, prm, *f);
      res.files.push_back(std::string(name) + ".json");
      res.files.push_back(std::string(name) + ".f64");
    }
  }
  write_json(out, "solve.json", j, res.files);
  res.summary = j;
  res.pass = two.all_pass();
  return res;
}

CommandResult cmd_bubble_scan(const RunConfig& cfg, const fs::path& out) {
  const auto& bs = cfg.bubble_scan;
  const GridDomain dom(cfg.grid, cfg.params);
  const auto U = RadialProfile::model(cfg.params);
  const double delta = bs.delta_fraction * cfg.grid.box_length;
  std::vector<double> eps;
  for (double r : bs.eps_over_delta) eps.push_back(r * delta);

  const auto decay = decay_check(U, cfg.params, default_decay_grid(bs.decay_r_max), bs.theta);
  const auto norms = norm_estimate_scan(dom, cfg.params, U, delta, bs.theta, eps, bs.band);
  const auto constants = compute_constants(dom, cfg.params, cfg.seed(), quotient_options(cfg));

  CommandResult res;
  Json j = header(cfg, "bubble-scan", dom);
  j["profile"] = U.label();
  j["proven_minimizer"] = U.proven_minimizer();
  j["delta"] = delta;
  j["theta"] = bs.theta;
  j["decay"] = to_json(decay);
  j["norm_scan"] = to_json(norms);
  j["constants"] = to_json(constants);
  Json scans = Json::array();
  for (std::size_t k = 0; k < bs.lambda_fractions.size(); ++k) {
    const double sigma = bs.lambda_fractions[k] * constants.smallness_threshold;
    const double l = equal_split_parameter(cfg.params, sigma);
    const auto prm = cfg.params.with_lambda_mu(l, l);
    const auto sup = sup_energy_scan(dom, prm, U, delta, bs.theta, eps, l, l, constants.S_ab_d, constants.C0);

    CsvWriter csv({"eps", "seminorm_p_pow", "lpstar_pow", "excess", "deficit", "t_star", "sup_full", "q_regime",
                   "c_infty", "below_c_infty"});
    for (std::size_t r = 0; r < eps.size(); ++r) {
      const auto& nr = norms.rows[r];
      const auto& sr = sup.rows[r];
      csv.row({csv_number(nr.epsilon), csv_number(nr.seminorm_p_pow), csv_number(nr.lpstar_pow), csv_number(nr.excess),
               csv_number(nr.deficit), csv_number(sr.t_star), csv_number(sr.sup_full), sr.q_regime,
               csv_number(sr.c_infty), sr.below_c_infty ? "true" : "false"});
    }
    const std::string name = "bubble_scan_" + std::to_string(k) + ".csv";
    write_text(out / name, csv.str());
    res.files.push_back(name);
    Json s = to_json(sup);
    s["lambda_fraction"] = bs.lambda_fractions[k];
    s["sigma"] = sigma;
    s["csv"] = name;
    scans.push_back(s);
  }
  j["sup_scans"] = scans;
  write_json(out, "bubble_scan.json", j, res.files);
  res.summary = j;
  return res;
}

CommandResult cmd_curves(const RunConfig& cfg, const fs::path& out) {
  const auto& prm = cfg.params;
  if (!(prm.lambda > 0.0) && !(prm.mu > 0.0)) throw InputError("curves need lambda or mu positive so that Psi has a maximum");
  const GridDomain dom(cfg.grid, prm);
  FieldPair pair;
  if (cfg.curves.source == "bubble") {
    const double delta = cfg.bubble_scan.delta_fraction * cfg.grid.box_length;
    const auto b = bubble_field(dom, prm, RadialProfile::model(prm), 0.25 * delta, delta, cfg.bubble_scan.theta,
                                default_center(dom));
    pair = FieldPair(b, b);
  } else {
    pair = random_pair(dom, cfg.seed());
  }
  const auto rep = project(prm, dom, pair);
  const auto curve = fibering_curves(rep.triple, prm, rep, cfg.curves.t_lo_factor, cfg.curves.t_hi_factor,
                                     cfg.curves.points);
  CommandResult res;
  write_text(out / "curves.csv", curve.csv);
  res.files.push_back("curves.csv");
  Json j = header(cfg, "curves", dom);
  j["source"] = cfg.curves.source;
  j["report"] = to_json(rep);
  j["curve"] = curve.summary;
  write_json(out, "curves.json", j, res.files);
  res.summary = j;
  return res;
}

std::vector<std::string> verify_manifest(const fs::path& out, const std::optional<std::string>& config_hash) {
  std::vector<std::string> problems;
  const auto manifest = nlohmann::json::parse(read_text(out / "manifest.json"));
  if (!manifest.contains("commands")) return {"manifest has no commands"};
  for (const auto& [command, entry] : manifest.at("commands").items()) {
    if (config_hash && entry.value("config_hash", "") != *config_hash) {
      problems.push_back(command + ": config hash differs from the given config");
    }
    if (!entry.contains("files")) continue;
    for (const auto& [name, digest] : entry.at("files").items()) {
      if (!fs::exists(out / name)) {
        problems.push_back(command + ": missing " + name);
      } else if (sha256_hex(read_text(out / name)) != digest.get<std::string>()) {
        problems.push_back(command + ": hash mismatch for " + name);
      }
    }
  }
  return problems;
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.command == "verify") {
      std::optional<std::string> hash;
      if (!inv.config_path.empty()) {
        auto cfg = load_config(inv.config_path.string());
        if (inv.seed) cfg.seeds.front() = *inv.seed;
        hash = cfg.hash();
      }
      const auto problems = verify_manifest(inv.out_dir, hash);
      for (const auto& p : problems) err << "verify: " << p << "\n";
      if (!inv.quiet && problems.empty()) out << "verify: all hashes match\n";
      return problems.empty() ? kSuccess : kNumericalFailure;
    }

    auto cfg = load_config(inv.config_path.string());
    if (inv.seed) cfg.seeds.front() = *inv.seed;
    fs::create_directories(inv.out_dir);
    const fs::path config_dir = inv.config_path.has_parent_path() ? inv.config_path.parent_path() : fs::path(".");

    CommandResult res;
    if (inv.command == "constants") res = cmd_constants(cfg, inv.out_dir);
    else if (inv.command == "project") res = cmd_project(cfg, config_dir, inv.out_dir);
    else if (inv.command == "solve") res = cmd_solve(cfg, inv.out_dir);
    else if (inv.command == "bubble-scan") res = cmd_bubble_scan(cfg, inv.out_dir);
    else if (inv.command == "curves") res = cmd_curves(cfg, inv.out_dir);
    else throw InputError("unknown command '" + inv.command + "'");
    write_manifest(inv.out_dir, cfg, inv.command, res.files);

    if (!inv.quiet) {
      if (inv.command == "constants") out << res.summary.dump(2) << "\n";
      for (const auto& f : res.files) out << "wrote " << (inv.out_dir / f).string() << "\n";
    }
    if (!res.pass) {
      err << inv.command << ": one or more checks failed (see " << (inv.out_dir / "solve.json").string() << ")\n";
      return kNumericalFailure;
    }
    return kSuccess;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete experiments for a fractional p-Laplacian system with concave-convex nonlinearities"};
  app.require_subcommand(1);
  Invocation inv;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"constants", "Discrete Sobolev constants and every closed-form threshold"},
      {"project", "Fibering projection of a stored pair"},
      {"solve", "Two solutions on the N+ and N- branches"},
      {"bubble-scan", "Truncated-bubble norm and energy scans"},
      {"curves", "Fibering curves phi, phi', phi'' and Psi along one ray"},
      {"verify", "Re-check the hashes recorded in an output manifest"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto* cfg = sub->add_option("--config", inv.config_path, "JSON config file")->check(CLI::ExistingFile);
    if (std::string(name) != "verify") cfg->required();
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "master seed (overrides seeds[0])");
    sub->add_flag("--quiet", inv.quiet, "suppress stdout");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUserError;
  }
  for (auto* sub : app.get_subcommands()) {
    inv.command = sub->get_name();
    if (sub->count("--seed") > 0) inv.seed = seed;
  }
  return execute(inv, out, err);
}

}  // namespace nehari::cli
