#include "nehari/config.hpp"

#include <cmath>
#include <functional>
#include <set>

namespace nehari {

namespace {

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out.push_back(c);
  }
  return out;
}

class Validator {
 public:
  Validator(const std::string& text, std::string source) : lines_(key_lines(text)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    std::string where = source_;
    std::string p = pointer;
    while (true) {
      auto it = lines_.find(p);
      if (it != lines_.end()) {
        where += ":" + std::to_string(it->second);
        break;
      }
      const auto cut = p.find_last_of('/');
      if (cut == std::string::npos || p.empty()) {
        where += ":1";
        break;
      }
      p = p.substr(0, cut);
    }
    throw InputError(where + ": " + message);
  }

  void only_keys(const Json& obj, const std::string& pointer, const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(pointer, label(pointer) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) fail(pointer + "/" + escape_pointer(key), "unknown key '" + key + "' in " + label(pointer));
    }
  }

  const Json& require(const Json& obj, const std::string& pointer, const std::string& key) const {
    if (!obj.contains(key)) fail(pointer, "missing required field '" + dotted(pointer, key) + "'");
    return obj.at(key);
  }

  double number(const Json& obj, const std::string& pointer, const std::string& key, std::optional<double> def) const {
    if (!obj.contains(key)) {
      if (!def) fail(pointer, "missing required field '" + dotted(pointer, key) + "'");
      return *def;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(pointer + "/" + key, "field '" + dotted(pointer, key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(pointer + "/" + key, "field '" + dotted(pointer, key) + "' must be finite");
    return x;
  }

  long long integer(const Json& obj, const std::string& pointer, const std::string& key, std::optional<long long> def) const {
    if (!obj.contains(key)) {
      if (!def) fail(pointer, "missing required field '" + dotted(pointer, key) + "'");
      return *def;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(pointer + "/" + key, "field '" + dotted(pointer, key) + "' must be an integer");
    return v.get<long long>();
  }

  std::string string(const Json& obj, const std::string& pointer, const std::string& key, std::optional<std::string> def) const {
    if (!obj.contains(key)) {
      if (!def) fail(pointer, "missing required field '" + dotted(pointer, key) + "'");
      return *def;
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(pointer + "/" + key, "field '" + dotted(pointer, key) + "' must be a string");
    return v.get<std::string>();
  }

  bool boolean(const Json& obj, const std::string& pointer, const std::string& key, bool def) const {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(pointer + "/" + key, "field '" + dotted(pointer, key) + "' must be true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const Json& obj, const std::string& pointer, const std::string& key,
                              std::vector<double> def) const {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) fail(pointer + "/" + key, "field '" + dotted(pointer, key) + "' must be a non-empty array");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number() || !std::isfinite(v[k].get<double>())) {
        fail(pointer + "/" + key, "entry " + dotted(pointer, key) + "[" + std::to_string(k) + "] must be a finite number");
      }
      out.push_back(v[k].get<double>());
    }
    return out;
  }

  static std::string label(const std::string& pointer) { return pointer.empty() ? "config" : "block '" + pointer.substr(1) + "'"; }
  static std::string dotted(const std::string& pointer, const std::string& key) {
    std::string out = pointer.empty() ? "" : pointer.substr(1);
    for (char& c : out)
      if (c == '/') c = '.';
    return out.empty() ? key : out + "." + key;
  }

 private:
  std::map<std::string, int> lines_;
  std::string source_;
};

}  // namespace

std::map<std::string, int> key_lines(const std::string& text) {
  struct Frame {
    bool object;
    std::string pointer;
    std::string key;
    std::size_t index;
  };
  std::map<std::string, int> out;
  std::vector<Frame> stack;
  int line = 1;
  std::string last_string;
  int last_string_line = 0;
  bool have_string = false;
  auto child_pointer = [&]() -> std::string {
    if (stack.empty()) return "";
    const auto& f = stack.back();
    return f.pointer + "/" + (f.object ? escape_pointer(f.key) : std::to_string(f.index));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      continue;
    }
    if (c == '"') {
      std::string s;
      const int start_line = line;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          ++i;
          s.push_back(text[i]);
        } else {
          if (text[i] == '\n') ++line;
          s.push_back(text[i]);
        }
      }
      last_string = s;
      last_string_line = start_line;
      have_string = true;
      continue;
    }
    if (c == ':' && have_string && !stack.empty() && stack.back().object) {
      stack.back().key = last_string;
      out[stack.back().pointer + "/" + escape_pointer(last_string)] = last_string_line;
      have_string = false;
      continue;
    }
    if (c == '{' || c == '[') {
      const std::string ptr = child_pointer();
      stack.push_back({c == '{', ptr, "", 0});
      have_string = false;
      continue;
    }
    if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      have_string = false;
      continue;
    }
    if (c == ',') {
      if (!stack.empty() && !stack.back().object) ++stack.back().index;
      have_string = false;
    }
  }
  return out;
}

std::string RunConfig::hash() const {
  nlohmann::json canon = nlohmann::json::parse(raw.dump());
  canon["seeds"] = seeds;
  return sha256_hex(canon.dump());
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1;
    const auto limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i)
      if (text[i] == '\n') ++line;
    throw InputError(source + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
  }
  Validator v(text, source);
  v.only_keys(doc, "", {"params", "grid", "seeds", "tolerances", "constants", "project", "solve", "bubble_scan", "curves"});

  RunConfig cfg;
  cfg.raw = doc;

  const auto& p = v.require(doc, "", "params");
  v.only_keys(p, "/params", {"n", "p", "s", "q", "alpha", "beta", "lambda", "mu"});
  cfg.params.n = static_cast<int>(v.integer(p, "/params", "n", std::nullopt));
  cfg.params.p = v.number(p, "/params", "p", std::nullopt);
  cfg.params.s = v.number(p, "/params", "s", std::nullopt);
  cfg.params.q = v.number(p, "/params", "q", std::nullopt);
  cfg.params.alpha = v.number(p, "/params", "alpha", std::nullopt);
  cfg.params.beta = v.number(p, "/params", "beta", std::nullopt);
  cfg.params.lambda = v.number(p, "/params", "lambda", 0.0);
  cfg.params.mu = v.number(p, "/params", "mu", 0.0);
  try {
    cfg.params.validate();
  } catch (const InputError& e) {
    v.fail("/params", e.what());
  }

  const auto& g = v.require(doc, "", "grid");
  v.only_keys(g, "/grid", {"n", "m", "box_length", "collar_factor", "shape", "memory_cap_mb"});
  cfg.grid.n = static_cast<int>(v.integer(g, "/grid", "n", cfg.params.n));
  if (cfg.grid.n != cfg.params.n) v.fail("/grid/n", "grid.n must equal params.n");
  cfg.grid.m = static_cast<int>(v.integer(g, "/grid", "m", std::nullopt));
  if (cfg.grid.m < 2) v.fail("/grid/m", "grid.m must be >= 2");
  cfg.grid.box_length = v.number(g, "/grid", "box_length", 1.0);
  if (!(cfg.grid.box_length > 0.0)) v.fail("/grid/box_length", "grid.box_length must be > 0");
  cfg.grid.collar_factor = v.number(g, "/grid", "collar_factor", 1.0);
  if (!(cfg.grid.collar_factor >= 1.0)) v.fail("/grid/collar_factor", "grid.collar_factor must be >= 1");
  const auto shape = v.string(g, "/grid", "shape", std::string("box"));
  if (shape == "box") cfg.grid.shape = DomainShape::Box;
  else if (shape == "ball") cfg.grid.shape = DomainShape::Ball;
  else v.fail("/grid/shape", "grid.shape must be \"box\" or \"ball\"");
  const auto cap = v.integer(g, "/grid", "memory_cap_mb", 4096);
  if (cap < 1) v.fail("/grid/memory_cap_mb", "grid.memory_cap_mb must be >= 1");
  cfg.grid.memory_cap_bytes = static_cast<std::size_t>(cap) << 20;

  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    if (!s.is_array() || s.empty()) v.fail("/seeds", "seeds must be a non-empty array of integers");
    cfg.seeds.clear();
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s[k].is_number_unsigned()) v.fail("/seeds", "seeds[" + std::to_string(k) + "] must be a nonnegative integer");
      cfg.seeds.push_back(s[k].get<std::uint64_t>());
    }
  }

  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    v.only_keys(t, "/tolerances", {"quotient", "quotient_restarts", "quotient_max_iterations", "solver_grad",
                                   "solver_max_iterations", "manifold"});
    auto& tol = cfg.tolerances;
    tol.quotient = v.number(t, "/tolerances", "quotient", tol.quotient);
    tol.quotient_restarts = static_cast<int>(v.integer(t, "/tolerances", "quotient_restarts", tol.quotient_restarts));
    tol.quotient_max_iterations = static_cast<int>(v.integer(t, "/tolerances", "quotient_max_iterations", tol.quotient_max_iterations));
    tol.solver_grad = v.number(t, "/tolerances", "solver_grad", tol.solver_grad);
    tol.solver_max_iterations = static_cast<int>(v.integer(t, "/tolerances", "solver_max_iterations", tol.solver_max_iterations));
    tol.manifold = v.number(t, "/tolerances", "manifold", tol.manifold);
    if (!(tol.quotient > 0.0) || !(tol.solver_grad > 0.0) || !(tol.manifold > 0.0)) v.fail("/tolerances", "tolerances must be > 0");
    if (tol.quotient_restarts < 1 || tol.quotient_max_iterations < 1 || tol.solver_max_iterations < 1) {
      v.fail("/tolerances", "iteration counts must be >= 1");
    }
  }

  if (doc.contains("constants")) v.only_keys(doc.at("constants"), "/constants", {});

  if (doc.contains("project")) {
    const auto& b = doc.at("project");
    v.only_keys(b, "/project", {"u", "v", "curve_points", "emit_curve"});
    cfg.project.u_path = v.string(b, "/project", "u", std::nullopt);
    cfg.project.v_path = v.string(b, "/project", "v", std::nullopt);
    cfg.project.curve_points = static_cast<int>(v.integer(b, "/project", "curve_points", cfg.project.curve_points));
    if (cfg.project.curve_points < 3) v.fail("/project/curve_points", "project.curve_points must be >= 3");
    cfg.project.emit_curve = v.boolean(b, "/project", "emit_curve", true);
  }

  if (doc.contains("solve")) {
    const auto& b = doc.at("solve");
    v.only_keys(b, "/solve", {"lambda_mode", "lambda_fraction", "starts_plus", "starts_minus", "save_fields"});
    auto& s = cfg.solve;
    s.lambda_mode = v.string(b, "/solve", "lambda_mode", s.lambda_mode);
    if (s.lambda_mode != "absolute" && s.lambda_mode != "fraction_of_lambda1") {
      v.fail("/solve/lambda_mode", "solve.lambda_mode must be \"absolute\" or \"fraction_of_lambda1\"");
    }
    s.lambda_fraction = v.number(b, "/solve", "lambda_fraction", s.lambda_fraction);
    if (!(s.lambda_fraction > 0.0)) v.fail("/solve/lambda_fraction", "solve.lambda_fraction must be > 0");
    s.starts_plus = static_cast<int>(v.integer(b, "/solve", "starts_plus", s.starts_plus));
    s.starts_minus = static_cast<int>(v.integer(b, "/solve", "starts_minus", s.starts_minus));
    if (s.starts_plus < 1 || s.starts_minus < 1) v.fail("/solve", "solve start counts must be >= 1");
    s.save_fields = v.boolean(b, "/solve", "save_fields", true);
  }

  if (doc.contains("bubble_scan")) {
    const auto& b = doc.at("bubble_scan");
    v.only_keys(b, "/bubble_scan", {"delta_fraction", "theta", "eps_over_delta", "lambda_fractions", "band", "decay_r_max"});
    auto& s = cfg.bubble_scan;
    s.delta_fraction = v.number(b, "/bubble_scan", "delta_fraction", s.delta_fraction);
    s.theta = v.number(b, "/bubble_scan", "theta", s.theta);
    if (!(s.delta_fraction > 0.0)) v.fail("/bubble_scan/delta_fraction", "bubble_scan.delta_fraction must be > 0");
    if (!(s.theta > 1.0)) v.fail("/bubble_scan/theta", "bubble_scan.theta must be > 1");
    if (s.theta * s.delta_fraction > 0.5) {
      v.fail("/bubble_scan", "bubble support theta*delta must fit inside the box (theta*delta_fraction <= 1/2)");
    }
    s.eps_over_delta = v.numbers(b, "/bubble_scan", "eps_over_delta", s.eps_over_delta);
    for (std::size_t k = 0; k < s.eps_over_delta.size(); ++k) {
      const double r = s.eps_over_delta[k];
      if (!(r > 0.0) || r > 0.5) {
        v.fail("/bubble_scan/eps_over_delta", "bubble_scan.eps_over_delta[" + std::to_string(k) + "] = " + format_double(r) +
                                                  " violates 0 < eps <= delta/2");
      }
    }
    s.lambda_fractions = v.numbers(b, "/bubble_scan", "lambda_fractions", s.lambda_fractions);
    for (std::size_t k = 0; k < s.lambda_fractions.size(); ++k) {
      if (s.lambda_fractions[k] < 0.0) {
        v.fail("/bubble_scan/lambda_fractions", "bubble_scan.lambda_fractions[" + std::to_string(k) + "] must be >= 0");
      }
    }
    s.band = v.number(b, "/bubble_scan", "band", s.band);
    if (!(s.band > 0.0)) v.fail("/bubble_scan/band", "bubble_scan.band must be > 0");
    s.decay_r_max = v.number(b, "/bubble_scan", "decay_r_max", s.decay_r_max);
    if (!(s.decay_r_max > 1.0)) v.fail("/bubble_scan/decay_r_max", "bubble_scan.decay_r_max must be > 1");
  }

  if (doc.contains("curves")) {
    const auto& b = doc.at("curves");
    v.only_keys(b, "/curves", {"source", "points", "t_lo_factor", "t_hi_factor"});
    auto& c = cfg.curves;
    c.source = v.string(b, "/curves", "source", c.source);
    if (c.source != "random" && c.source != "bubble") v.fail("/curves/source", "curves.source must be \"random\" or \"bubble\"");
    c.points = static_cast<int>(v.integer(b, "/curves", "points", c.points));
    if (c.points < 3) v.fail("/curves/points", "curves.points must be >= 3");
    c.t_lo_factor = v.number(b, "/curves", "t_lo_factor", c.t_lo_factor);
    c.t_hi_factor = v.number(b, "/curves", "t_hi_factor", c.t_hi_factor);
    if (!(c.t_lo_factor > 0.0 && c.t_lo_factor < 1.0 && c.t_hi_factor > 1.0)) {
      v.fail("/curves", "curves needs 0 < t_lo_factor < 1 < t_hi_factor");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path), path); }

}  // namespace nehari
