#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nehari/constants.hpp"
#include "nehari/fibering.hpp"
#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"

namespace nehari {

/// Named scalar diagnostic with its verdict.
struct Check {
  std::string name;
  double value = 0.0;
  bool pass = true;
};

struct SolverOptions {
  int max_iterations = 20000;
  double grad_tol = 1e-8;        ///< on ||g|| ||z|| / ||z||_E^p
  double energy_tol = 1e-14;     ///< relative energy decrease over the stall window
  int stall_window = 50;
  double floor = 1e-12;          ///< smoothing inside |d|^{p-2} when p < 2
  int starts_plus = 4;
  int starts_minus = 3;
  double init_amplitude = 1e-2;  ///< amplitude of random N+ starts
  double delta_fraction = 0.25;  ///< bubble radius as a fraction of the box
  double theta = 2.0;
  std::uint64_t seed = 0;
  double distinct_tol = 1e-6;
  double semitrivial_tol = 1e-8;
};

struct SolutionReport {
  FieldPair pair;
  Branch branch = Branch::Nplus;
  double energy = 0.0;
  double residual = 0.0;           ///< Euclidean norm of the gradient vector
  double relative_residual = 0.0;  ///< residual * ||z|| / ||z||_E^p
  int iterations = 0;
  bool semitrivial = false;
  bool energy_monotone = true;
  double max_iterate_norm = 0.0;
  double min_iterate_energy = 0.0;
  Branch classification = Branch::OffManifold;
  std::string start;  ///< label of the winning start
  std::vector<double> energy_trace;
  std::vector<Check> checks;
};

/// Projected descent on the requested branch starting from init.
[[nodiscard]] SolutionReport minimize_on_branch(const ModelParams& prm, const GridDomain& dom, Branch branch,
                                                const FieldPair& init, const SolverOptions& opts = {});

struct TwoSolutions {
  SolutionReport plus;
  SolutionReport minus;
  ConstantsReport constants;
  double distance = 0.0;  ///< relative L^p distance of the normalized pairs
  std::vector<Check> checks;
  [[nodiscard]] bool all_pass() const;
};

/// Both branch minimizations from multiple starts, with cross checks.
/// When constants is absent it is computed with the quotient descents.
[[nodiscard]] TwoSolutions solve_two(const ModelParams& prm, const GridDomain& dom, const SolverOptions& opts = {},
                                     std::optional<ConstantsReport> constants = std::nullopt);

struct ScalarSolution {
  Field u;
  double energy = 0.0;
  double seminorm_pow = 0.0;    ///< [u]^p
  double q_integral = 0.0;      ///< lambda int |u|^q
  double identity_residual = 0.0;  ///< |J(u,0) + ((p-q)/(pq))[u]^p| / [u]^p
  double stationarity = 0.0;    ///< relative Euclidean residual of the Euler equation
  int iterations = 0;
};

/// Minimizer of (1/p)[u]^p - (lambda/q) int |u|^q.
[[nodiscard]] ScalarSolution solve_scalar_sublinear(const ModelParams& prm, const GridDomain& dom, double lambda,
                                                    const SolverOptions& opts = {});

/// Relative deviation of t_max(u1, w) from ((alpha+beta-q)/(alpha+beta-p))^{1/(p-q)}.
[[nodiscard]] double semitrivial_tmax_check(const ModelParams& prm, const GridDomain& dom, const Field& u1,
                                            const Field& w, double stationarity_tol = 1e-8);
[[nodiscard]] double semitrivial_tmax_predicted(const ModelParams& prm);

/// Relative L^p lattice distance between two pairs normalized to unit L^p norm.
[[nodiscard]] double normalized_distance(const GridDomain& dom, const ModelParams& prm, const FieldPair& a,
                                         const FieldPair& b);

}  // namespace nehari
