#include "nehari/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace nehari {

namespace {

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

template <class T>
Json optional_number(const std::optional<T>& x) {
  if (!x) return nullptr;
  return number(*x);
}

void append_le(std::string& out, double x) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

double from_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

std::string field_bytes(const Field& f) {
  std::string out;
  out.reserve(8 * f.size());
  for (double v : f.values()) append_le(out, v);
  return out;
}

std::string field_bytes(const FieldPair& pair) { return field_bytes(pair.u) + field_bytes(pair.v); }

Json to_json(const ModelParams& prm) {
  return Json{{"n", prm.n},         {"p", prm.p},         {"s", prm.s},           {"q", prm.q},
              {"alpha", prm.alpha}, {"beta", prm.beta},   {"lambda", prm.lambda}, {"mu", prm.mu},
              {"p_star", prm.p_star()}, {"critical", prm.critical()}};
}

Json to_json(const GridSpec& spec) {
  return Json{{"n", spec.n},
              {"m", spec.m},
              {"box_length", spec.box_length},
              {"collar_factor", spec.collar_factor},
              {"shape", spec.shape == DomainShape::Box ? "box" : "ball"}};
}

Json domain_json(const GridDomain& dom, const ModelParams& prm) {
  Json j = to_json(dom.spec());
  j["kernel_exponent"] = prm.n + prm.p * prm.s;
  j["spacing"] = dom.spacing();
  j["collar_layers"] = dom.collar_layers();
  j["interior_nodes"] = dom.size();
  j["collar_nodes"] = dom.collar_size();
  j["volume"] = dom.volume();
  return j;
}

std::string domain_hash(const GridDomain& dom, const ModelParams& prm) {
  return sha256_hex(domain_json(dom, prm).dump());
}

Json to_json(const EnergyBreakdown& e) {
  return Json{{"gradient_term", number(e.gradient_term)},
              {"concave_term", number(e.concave_term)},
              {"coupling_term", number(e.coupling_term)},
              {"total", number(e.total)}};
}

Json to_json(const ReducedTriple& t) { return Json{{"P", number(t.P)}, {"B", number(t.B)}, {"D", number(t.D)}}; }

Json to_json(const FiberingReport& r) {
  return Json{{"triple", to_json(r.triple)},
              {"outcome", to_string(r.outcome)},
              {"t_max", optional_number(r.t_max)},
              {"psi_at_t_max", optional_number(r.psi_at_t_max)},
              {"t1", optional_number(r.t1)},
              {"t2", optional_number(r.t2)},
              {"branch_energy_plus", optional_number(r.branch_energy_plus)},
              {"branch_energy_minus", optional_number(r.branch_energy_minus)},
              {"classification_at_1", to_string(r.classification_at_1)},
              {"sigma", number(r.sigma)}};
}

Json to_json(const HypothesesFlags& f) {
  return Json{{"p2s_lt_n", f.p2s_lt_n},
              {"p_lt_2_bound", f.p_lt_2_bound},
              {"q_range", f.q_range},
              {"critical", f.critical},
              {"q_above_threshold", f.q_above_threshold},
              {"all", f.all()}};
}

Json to_json(const ConstantsReport& r) {
  return Json{{"scope", "grid"},
              {"S_d", number(r.S_d)},
              {"S_ab_d", number(r.S_ab_d)},
              {"ratio_predicted", number(r.ratio_predicted)},
              {"ratio_error", number(r.ratio_error)},
              {"volume", number(r.volume)},
              {"lambda1", number(r.lambda1)},
              {"smallness_threshold", number(r.smallness_threshold)},
              {"C0", number(r.C0)},
              {"C0_hat_route", number(r.C0_hat_route)},
              {"c_infty", number(r.c_infty)},
              {"c_infty_zero", number(r.c_infty_zero)},
              {"d0_bound", number(r.d0.value)},
              {"d0_bracket", number(r.d0.bracket)},
              {"d0_norm_lower_bound", number(r.d0.norm_lower_bound)},
              {"d0_smallness_ok", r.d0.smallness_ok},
              {"sigma", number(r.sigma)},
              {"lambda1_ok", r.lambda1_ok},
              {"critical", r.critical},
              {"hypotheses_ok", to_json(r.hypotheses)},
              {"iterations_S", r.iterations_S},
              {"iterations_S_ab", r.iterations_S_ab}};
}

Json to_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(Json{{"name", c.name}, {"value", number(c.value)}, {"pass", c.pass}});
  return arr;
}

Json to_json(const SolutionReport& r) {
  return Json{{"branch", to_string(r.branch)},
              {"energy_best_found", number(r.energy)},
              {"residual", number(r.residual)},
              {"relative_residual", number(r.relative_residual)},
              {"iterations", r.iterations},
              {"semitrivial", r.semitrivial},
              {"classification", to_string(r.classification)},
              {"energy_monotone", r.energy_monotone},
              {"max_iterate_norm", number(r.max_iterate_norm)},
              {"min_iterate_energy", number(r.min_iterate_energy)},
              {"start", r.start},
              {"checks", to_json(r.checks)}};
}

Json to_json(const TwoSolutions& r) {
  return Json{{"plus", to_json(r.plus)},
              {"minus", to_json(r.minus)},
              {"distance", number(r.distance)},
              {"checks", to_json(r.checks)},
              {"all_pass", r.all_pass()},
              {"constants", to_json(r.constants)}};
}

Json to_json(const DecayReport& r) {
  return Json{{"c1_hat", number(r.c1_hat)},
              {"c2_hat", number(r.c2_hat)},
              {"halving_ok", r.halving_ok},
              {"theta_halving", optional_number(r.theta_halving)},
              {"theta_asymptotic", number(r.theta_asymptotic)}};
}

Json to_json(const NormScan& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"eps", number(row.epsilon)},
                        {"eps_over_delta", number(row.ratio)},
                        {"seminorm_p_pow", number(row.seminorm_p_pow)},
                        {"lpstar_pow", number(row.lpstar_pow)},
                        {"excess", number(row.excess)},
                        {"deficit", number(row.deficit)},
                        {"rayleigh", number(row.rayleigh)}});
  }
  return Json{{"rows", rows},
              {"excess_exponent", number(r.excess_exponent)},
              {"excess_slope", number(r.excess_slope)},
              {"excess_ok", r.excess_ok},
              {"deficit_exponent", number(r.deficit_exponent)},
              {"deficit_slope", number(r.deficit_slope)},
              {"deficit_ok", r.deficit_ok},
              {"band", number(r.band)},
              {"excess_nonnegative", r.excess_nonnegative},
              {"monotone", r.monotone}};
}

Json to_json(const SupScan& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"eps", number(row.epsilon)},
                        {"t_star", number(row.t_star)},
                        {"t_star_grid", number(row.t_star_grid)},
                        {"h_closed", number(row.h_closed)},
                        {"h_chain", number(row.h_chain)},
                        {"sup_full", number(row.sup_full)},
                        {"t_sup_full", number(row.t_sup_full)},
                        {"q_integral", number(row.q_integral)},
                        {"q_regime", row.q_regime},
                        {"c_infty", number(row.c_infty)},
                        {"below_c_infty", row.below_c_infty}});
  }
  return Json{{"lambda", number(r.lambda)},
              {"mu", number(r.mu)},
              {"rows", rows},
              {"worst_t_star_error", number(r.worst_t_star_error)},
              {"any_below", r.any_below}};
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field(const std::filesystem::path& base, const GridDomain& dom, const ModelParams& prm, const Field& f) {
  if (f.size() != dom.size()) throw std::invalid_argument("field size does not match the domain");
  const auto raw_path = std::filesystem::path(base.string() + ".f64");
  const std::string bytes = field_bytes(f);
  write_text(raw_path, bytes);
  Json side{{"domain_hash", domain_hash(dom, prm)},
            {"node_count", f.size()},
            {"dtype", "f64le"},
            {"data", raw_path.filename().string()},
            {"data_sha256", sha256_hex(bytes)},
            {"domain", domain_json(dom, prm)}};
  write_text(std::filesystem::path(base.string() + ".json"), side.dump(2) + "\n");
}

Field read_field(const std::filesystem::path& sidecar, const GridDomain& dom, const ModelParams& prm) {
  Json side;
  try {
    side = Json::parse(read_text(sidecar));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(sidecar.string() + ": " + e.what());
  }
  try {
    if (side.at("dtype").get<std::string>() != "f64le") throw InputError(sidecar.string() + ": dtype must be f64le");
    if (side.at("domain_hash").get<std::string>() != domain_hash(dom, prm)) {
      throw InputError(sidecar.string() + ": domain hash does not match the configured grid");
    }
    const auto count = side.at("node_count").get<std::size_t>();
    if (count != dom.size()) throw InputError(sidecar.string() + ": node count does not match the grid");
    const auto data = sidecar.parent_path() / side.at("data").get<std::string>();
    const std::string bytes = read_text(data);
    if (bytes.size() != 8 * count) throw InputError(data.string() + ": expected " + std::to_string(8 * count) + " bytes");
    Field f(count);
    for (std::size_t i = 0; i < count; ++i) f[i] = from_le(bytes.data() + 8 * i);
    if (!f.all_finite()) throw InputError(data.string() + ": non-finite values");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(sidecar.string() + ": " + e.what());
  }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("csv row has the wrong number of cells");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) text_.push_back(',');
    const bool quote = cells[k].find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      text_.push_back('"');
      for (char ch : cells[k]) {
        if (ch == '"') text_.push_back('"');
        text_.push_back(ch);
      }
      text_.push_back('"');
    } else {
      text_ += cells[k];
    }
  }
  text_.push_back('\n');
  return *this;
}

}  // namespace nehari
