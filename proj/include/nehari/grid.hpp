#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nehari/params.hpp"

namespace nehari {

enum class DomainShape { Box, Ball };

/// Lattice description as read from configuration.
struct GridSpec {
  int n = 2;
  int m = 12;
  double box_length = 1.0;
  double collar_factor = 1.0;
  DomainShape shape = DomainShape::Box;
  /// Cap on the estimated memory of the materialized pair list.
  std::size_t memory_cap_bytes = std::size_t{4} << 30;
};

/// One stored unordered interior pair with its kernel weight.
struct PairWeight {
  std::uint32_t i;
  std::uint32_t j;
  double w;
};

/// Uniform lattice discretization of the domain and its exterior collar.
///
/// Interior node values are the unknowns; collar values are pinned to zero and
/// never stored. Interior pairs are kept explicitly, while every interaction of
/// an interior node with the collar is folded into a single per-node weight
/// kappa_i = sum_c w_ic.
class GridDomain {
 public:
  /// Builds the lattice for spec; the kernel exponent n+ps comes from params.
  GridDomain(const GridSpec& spec, const ModelParams& params);

  [[nodiscard]] int dim() const { return n_; }
  [[nodiscard]] int nodes_per_axis() const { return m_; }
  [[nodiscard]] double spacing() const { return h_; }
  [[nodiscard]] double cell_volume() const { return cell_; }
  [[nodiscard]] double volume() const { return cell_ * static_cast<double>(size()); }
  [[nodiscard]] int collar_layers() const { return layers_; }
  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] double kernel_exponent() const { return kexp_; }

  [[nodiscard]] std::size_t size() const { return interior_.size() / static_cast<std::size_t>(n_); }
  [[nodiscard]] std::size_t collar_size() const { return collar_.size() / static_cast<std::size_t>(n_); }

  /// Lattice index vector of interior node i.
  [[nodiscard]] std::span<const int> interior_index(std::size_t i) const {
    return {interior_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  /// Lattice index vector of collar node c.
  [[nodiscard]] std::span<const int> collar_index(std::size_t c) const {
    return {collar_.data() + c * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  /// Physical coordinate of interior node i along axis a.
  [[nodiscard]] double coord(std::size_t i, int a) const { return h_ * interior_index(i)[static_cast<std::size_t>(a)]; }

  /// Kernel weight h^{2n}/|x-y|^{n+ps} for an integer offset vector (nonzero).
  [[nodiscard]] double weight(std::span<const int> offset) const;
  /// Weight between interior nodes i and j (i != j).
  [[nodiscard]] double interior_weight(std::size_t i, std::size_t j) const;
  /// Weight between interior node i and collar node c.
  [[nodiscard]] double collar_weight(std::size_t i, std::size_t c) const;

  [[nodiscard]] const std::vector<PairWeight>& pairs() const { return pairs_; }
  [[nodiscard]] std::span<const double> kappa() const { return kappa_; }

  /// Lowest and highest interior lattice index per axis of the enclosing box.
  [[nodiscard]] int index_lo() const { return lo_; }
  [[nodiscard]] int index_hi() const { return hi_; }

  /// Box lattice whose interior is this domain's whole computational cube
  /// (interior plus collar), surrounded by a fresh collar of equal width.
  [[nodiscard]] GridDomain extended() const;

  /// Estimated bytes for the pair list of a lattice with the given interior size.
  static std::size_t estimate_bytes(std::size_t interior_nodes);

 private:
  GridDomain(const GridSpec& spec, const ModelParams& params, int lo, int hi, int collar);
  void build(double ps);

  GridSpec spec_;
  ModelParams params_;
  int n_ = 0;
  int m_ = 0;
  int lo_ = 1;
  int hi_ = 0;
  int layers_ = 0;
  double h_ = 0.0;
  double cell_ = 0.0;
  double kexp_ = 0.0;
  std::vector<int> interior_;
  std::vector<int> collar_;
  std::vector<double> table_;  // weight by squared integer distance
  std::vector<PairWeight> pairs_;
  std::vector<double> kappa_;
};

}  // namespace nehari
