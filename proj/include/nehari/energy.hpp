#pragma once

#include "nehari/field.hpp"
#include "nehari/grid.hpp"
#include "nehari/params.hpp"

namespace nehari {

/// The three terms of the energy functional and their combination.
struct EnergyBreakdown {
  double gradient_term = 0.0;  ///< (1/p)||(u,v)||^p
  double concave_term = 0.0;   ///< (1/q) int (lambda|u|^q + mu|v|^q)
  double coupling_term = 0.0;  ///< (2/(alpha+beta)) int |u|^alpha |v|^beta
  double total = 0.0;
};

/// int (lambda|u|^q + mu|v|^q) as a lattice sum.
[[nodiscard]] double concave_integral(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair);
/// int |u|^alpha |v|^beta as a lattice sum.
[[nodiscard]] double coupling_integral(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair);

[[nodiscard]] EnergyBreakdown energy(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair);

/// Directional derivative <J'(u,v), test>.
[[nodiscard]] double first_variation(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                                     const FieldPair& test);

/// First variation against every canonical basis pair. floor > 0 smooths |d|^{p-2} for p < 2.
[[nodiscard]] FieldPair gradient_vector(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair,
                                        double floor = 0.0);

/// ||(u,v)||^p - int(lambda|u|^q + mu|v|^q) - 2 int |u|^alpha |v|^beta.
[[nodiscard]] double nehari_constraint(const ModelParams& prm, const GridDomain& dom, const FieldPair& pair);

}  // namespace nehari
