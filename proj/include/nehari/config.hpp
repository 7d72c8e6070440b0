#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/io.hpp"
#include "nehari/params.hpp"

namespace nehari {

struct Tolerances {
  double quotient = 1e-6;
  int quotient_restarts = 10;
  int quotient_max_iterations = 20000;
  double solver_grad = 1e-8;
  int solver_max_iterations = 20000;
  double manifold = 1e-8;
};

struct ProjectBlock {
  std::string u_path;
  std::string v_path;
  int curve_points = 400;
  bool emit_curve = true;
};

struct SolveBlock {
  std::string lambda_mode = "absolute";  ///< "absolute" or "fraction_of_lambda1"
  double lambda_fraction = 1e-3;
  int starts_plus = 4;
  int starts_minus = 3;
  bool save_fields = true;
};

struct BubbleScanBlock {
  double delta_fraction = 0.25;
  double theta = 2.0;
  std::vector<double> eps_over_delta{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> lambda_fractions{0.5, 0.75, 0.95};
  double band = 0.3;
  double decay_r_max = 1e3;
};

struct CurvesBlock {
  std::string source = "random";  ///< "random" or "bubble"
  int points = 400;
  double t_lo_factor = 1e-2;      ///< relative to t_max
  double t_hi_factor = 1e2;
};

/// Parsed, validated configuration.
struct RunConfig {
  ModelParams params;
  GridSpec grid;
  std::vector<std::uint64_t> seeds{1};
  Tolerances tolerances;
  ProjectBlock project;
  SolveBlock solve;
  BubbleScanBlock bubble_scan;
  CurvesBlock curves;
  Json raw;  ///< input document as parsed

  [[nodiscard]] std::uint64_t seed() const { return seeds.front(); }
  /// SHA-256 of the sorted-key compact document with the effective seed list.
  [[nodiscard]] std::string hash() const;
};

/// Parses and validates config text; errors are InputError prefixed with "source:line:".
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& source = "config");
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Line number (1-based) of every object key, keyed by JSON pointer.
[[nodiscard]] std::map<std::string, int> key_lines(const std::string& text);

}  // namespace nehari
