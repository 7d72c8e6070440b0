#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nehari {

/// Values on the interior nodes of one GridDomain; collar values are zero.
class Field {
 public:
  Field() = default;
  explicit Field(std::size_t size, double value = 0.0) : values_(size, value) {}
  explicit Field(std::vector<double> values) : values_(std::move(values)) {}

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<double> span() { return values_; }
  [[nodiscard]] std::span<const double> span() const { return values_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::vector<double>& values() { return values_; }

  [[nodiscard]] bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }
  [[nodiscard]] bool is_zero() const {
    for (double v : values_)
      if (v != 0.0) return false;
    return true;
  }

  Field& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }
  /// this += c * other.
  Field& axpy(double c, const Field& other) {
    check_same(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * other.values_[i];
    return *this;
  }
  [[nodiscard]] Field scaled(double c) const {
    Field out = *this;
    out *= c;
    return out;
  }
  [[nodiscard]] Field abs() const {
    Field out = *this;
    for (double& v : out.values_) v = std::abs(v);
    return out;
  }

  void check_same(const Field& other) const {
    if (other.size() != size()) throw std::invalid_argument("fields live on different domains");
  }

 private:
  std::vector<double> values_;
};

/// State (u, v) of the coupled system.
struct FieldPair {
  Field u;
  Field v;

  FieldPair() = default;
  FieldPair(Field a, Field b) : u(std::move(a)), v(std::move(b)) { u.check_same(v); }
  static FieldPair zeros(std::size_t size) { return {Field(size), Field(size)}; }

  [[nodiscard]] std::size_t size() const { return u.size(); }
  [[nodiscard]] bool is_zero() const { return u.is_zero() && v.is_zero(); }
  [[nodiscard]] bool all_finite() const { return u.all_finite() && v.all_finite(); }

  FieldPair& operator*=(double c) {
    u *= c;
    v *= c;
    return *this;
  }
  FieldPair& axpy(double c, const FieldPair& other) {
    u.axpy(c, other.u);
    v.axpy(c, other.v);
    return *this;
  }
  [[nodiscard]] FieldPair scaled(double c) const { return {u.scaled(c), v.scaled(c)}; }
  [[nodiscard]] FieldPair swapped() const { return {v, u}; }
};

/// Euclidean inner product of two pairs viewed as one vector.
inline double dot(const FieldPair& a, const FieldPair& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.u[i] * b.u[i] + a.v[i] * b.v[i];
  return acc;
}

inline double euclidean_norm(const FieldPair& a) { return std::sqrt(dot(a, a)); }

}  // namespace nehari
