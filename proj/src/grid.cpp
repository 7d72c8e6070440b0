#include "nehari/grid.hpp"

#include <cmath>
#include <limits>

#include "nehari/summation.hpp"

namespace nehari {

namespace {

long squared_norm(std::span<const int> a, std::span<const int> b) {
  long d2 = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const long d = static_cast<long>(a[k]) - b[k];
    d2 += d * d;
  }
  return d2;
}

}  // namespace

GridDomain::GridDomain(const GridSpec& spec, const ModelParams& params)
    : GridDomain(spec, params, 1, spec.m,
                 static_cast<int>(std::lround(spec.collar_factor * (spec.m + 1)))) {}

GridDomain::GridDomain(const GridSpec& spec, const ModelParams& params, int lo, int hi, int collar)
    : spec_(spec), params_(params), n_(spec.n), m_(spec.m), lo_(lo), hi_(hi), layers_(collar) {
  if (spec.n < 1) throw InputError("grid.n must be a positive integer");
  if (spec.n != params.n) throw InputError("grid.n must equal params.n");
  if (spec.m < 2) throw InputError("grid.m must be >= 2");
  if (!(spec.box_length > 0.0) || !std::isfinite(spec.box_length)) throw InputError("grid.box_length must be > 0");
  if (!(spec.collar_factor >= 1.0) || !std::isfinite(spec.collar_factor)) throw InputError("grid.collar_factor must be >= 1");
  if (layers_ < 1) layers_ = 1;
  h_ = spec.box_length / (spec.m + 1);
  cell_ = std::pow(h_, n_);
  build(params.p * params.s);
}

std::size_t GridDomain::estimate_bytes(std::size_t interior_nodes) {
  const double pairs = 0.5 * static_cast<double>(interior_nodes) * static_cast<double>(interior_nodes - 1);
  const double bytes = pairs * static_cast<double>(sizeof(PairWeight));
  if (bytes > static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max() / 2;
  }
  return static_cast<std::size_t>(bytes);
}

void GridDomain::build(double ps) {
  const int width = hi_ - lo_ + 1 + 2 * layers_;
  const double centre = 0.5 * spec_.box_length;
  const double radius = 0.5 * spec_.box_length;

  // Enumerate the computational cube [lo-K, hi+K]^n in row-major order.
  double total_cube = 1.0;
  for (int a = 0; a < n_; ++a) total_cube *= width;
  if (total_cube > 1e9) throw InputError("grid too large: lattice node count exceeds 1e9");
  std::vector<int> idx(static_cast<std::size_t>(n_), lo_ - layers_);
  const auto cube = static_cast<std::size_t>(total_cube);
  for (std::size_t node = 0; node < cube; ++node) {
    bool in_box = true;
    double r2 = 0.0;
    for (int a = 0; a < n_; ++a) {
      const int k = idx[static_cast<std::size_t>(a)];
      if (k < lo_ || k > hi_) in_box = false;
      const double x = h_ * k - centre;
      r2 += x * x;
    }
    const bool interior = in_box && (spec_.shape == DomainShape::Box || std::sqrt(r2) < radius);
    auto& target = interior ? interior_ : collar_;
    target.insert(target.end(), idx.begin(), idx.end());
    for (int a = n_ - 1; a >= 0; --a) {
      auto& k = idx[static_cast<std::size_t>(a)];
      if (++k <= hi_ + layers_) break;
      k = lo_ - layers_;
    }
  }
  if (size() == 0) throw InputError("grid has no interior nodes");
  if (estimate_bytes(size()) > spec_.memory_cap_bytes) {
    throw InputError("grid too large: pair list needs about " + std::to_string(estimate_bytes(size()) >> 20) +
                     " MiB, cap is " + std::to_string(spec_.memory_cap_bytes >> 20) + " MiB");
  }

  kexp_ = n_ + ps;
  const long span = width - 1;
  const auto max_d2 = static_cast<std::size_t>(n_) * static_cast<std::size_t>(span * span);
  table_.assign(max_d2 + 1, 0.0);
  const double h2n = std::pow(h_, 2 * n_);
  for (std::size_t d2 = 1; d2 <= max_d2; ++d2) {
    const double dist = h_ * std::sqrt(static_cast<double>(d2));
    table_[d2] = h2n / std::pow(dist, kexp_);
  }

  const std::size_t N = size();
  pairs_.reserve(N * (N - 1) / 2);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      pairs_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), interior_weight(i, j)});
    }
  }
  kappa_.assign(N, 0.0);
  const std::size_t C = collar_size();
  for (std::size_t i = 0; i < N; ++i) {
    CompensatedSum acc;
    for (std::size_t c = 0; c < C; ++c) acc.add(collar_weight(i, c));
    kappa_[i] = acc.value();
  }
}

double GridDomain::weight(std::span<const int> offset) const {
  long d2 = 0;
  for (int v : offset) d2 += static_cast<long>(v) * v;
  if (d2 == 0) throw std::invalid_argument("self-pair has no weight");
  if (static_cast<std::size_t>(d2) < table_.size()) return table_[static_cast<std::size_t>(d2)];
  return std::pow(h_, 2 * n_) / std::pow(h_ * std::sqrt(static_cast<double>(d2)), kexp_);
}

double GridDomain::interior_weight(std::size_t i, std::size_t j) const {
  if (i == j) throw std::invalid_argument("self-pair has no weight");
  return table_[static_cast<std::size_t>(squared_norm(interior_index(i), interior_index(j)))];
}

double GridDomain::collar_weight(std::size_t i, std::size_t c) const {
  return table_[static_cast<std::size_t>(squared_norm(interior_index(i), collar_index(c)))];
}

GridDomain GridDomain::extended() const {
  GridSpec ext = spec_;
  ext.shape = DomainShape::Box;
  return GridDomain(ext, params_, lo_ - layers_, hi_ + layers_, layers_);
}

}  // namespace nehari
