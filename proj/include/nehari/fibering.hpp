#pragma once

#include <array>
#include <optional>
#include <string>

#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"

namespace nehari {

/// Coefficients of the fibering map along the ray t(u,v).
struct ReducedTriple {
  double P = 0.0;  ///< ||(u,v)||^p
  double B = 0.0;  ///< int (lambda|u|^q + mu|v|^q)
  double D = 0.0;  ///< 2 int |u|^alpha |v|^beta

  /// Triple of the scaled pair (c u, c v), c > 0.
  [[nodiscard]] ReducedTriple scaled(const ModelParams& prm, double c) const;
};

enum class Branch { Nplus, Nminus, Nzero, OffManifold };

enum class ProjectionOutcome {
  TwoRoots,        ///< both t1 and t2 exist
  ConcaveOnly,     ///< D = 0: only t1
  ConvexOnly,      ///< B = 0: only t2
  AboveThreshold,  ///< D >= Psi(t_max): no roots
  NoRoots,         ///< B = D = 0: phi is increasing
};

[[nodiscard]] std::string to_string(Branch b);
[[nodiscard]] std::string to_string(ProjectionOutcome o);

struct FiberingReport {
  ReducedTriple triple;
  ProjectionOutcome outcome = ProjectionOutcome::NoRoots;
  std::optional<double> t_max;
  std::optional<double> psi_at_t_max;
  std::optional<double> t1;
  std::optional<double> t2;
  std::optional<double> branch_energy_plus;   ///< phi(t1)
  std::optional<double> branch_energy_minus;  ///< phi(t2)
  Branch classification_at_1 = Branch::OffManifold;
  double sigma = 0.0;  ///< lambda^{p/(p-q)} + mu^{p/(p-q)}
};

/// Default relative tolerances for manifold membership and the phi'' dead-band.
inline constexpr double kManifoldTol = 1e-8;

[[nodiscard]] ReducedTriple reduce(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair);

[[nodiscard]] double phi(const ReducedTriple& tr, const ModelParams& prm, double t);
[[nodiscard]] double phi_prime(const ReducedTriple& tr, const ModelParams& prm, double t);
[[nodiscard]] double phi_second(const ReducedTriple& tr, const ModelParams& prm, double t);
[[nodiscard]] double psi(const ReducedTriple& tr, const ModelParams& prm, double t);
[[nodiscard]] double psi_prime(const ReducedTriple& tr, const ModelParams& prm, double t);

/// Unique critical point of Psi; requires B > 0.
[[nodiscard]] double t_max(const ReducedTriple& tr, const ModelParams& prm);

/// Roots of phi' on a ray given by its triple.
[[nodiscard]] FiberingReport project(const ReducedTriple& tr, const ModelParams& prm);
[[nodiscard]] FiberingReport project(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair);

/// Scales pair to the requested root; throws NumericalError when that root is absent.
[[nodiscard]] FieldPair project_to(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                                   Branch branch);

[[nodiscard]] Branch classify(const ReducedTriple& tr, const ModelParams& prm, double tol = kManifoldTol);
[[nodiscard]] Branch classify(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                              double tol = kManifoldTol);

/// The four equivalent expressions for phi''(1) on the manifold.
[[nodiscard]] std::array<double, 4> phi_second_forms(const ReducedTriple& tr, const ModelParams& prm);
/// Maximum pairwise relative discrepancy of the four forms; throws when off the manifold.
[[nodiscard]] double phi_second_consistency(const ReducedTriple& tr, const ModelParams& prm,
                                            double tol = kManifoldTol);
[[nodiscard]] double phi_second_consistency(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                                            double tol = kManifoldTol);

/// Derivative at 0 of the scale xi(w) with xi(w)(z - w) on the manifold, along omega.
[[nodiscard]] double xi_prime(const ModelParams& prm, const GridDomain& dom, const FieldPair& z,
                              const FieldPair& omega, double tol = kManifoldTol);

}  // namespace nehari
