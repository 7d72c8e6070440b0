#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nehari {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Thread cap from NEHARI_FRAC_THREADS (default: hardware concurrency).
inline unsigned thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("NEHARI_FRAC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Number of fixed reduction chunks; independent of the thread count so that
/// results are identical for any NEHARI_FRAC_THREADS value.
inline constexpr std::size_t kReductionChunks = 32;

/// Minimum work per chunk before threads are used at all.
inline constexpr std::size_t kParallelThreshold = 1u << 16;

/// Runs body(chunk, begin, end) for each fixed chunk of [0, count).
template <class Body>
void for_each_chunk(std::size_t count, Body&& body) {
  const std::size_t chunks = kReductionChunks;
  auto range = [&](std::size_t c) {
    return std::pair<std::size_t, std::size_t>{count * c / chunks, count * (c + 1) / chunks};
  };
  const unsigned threads = count >= kParallelThreshold ? thread_cap() : 1u;
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = range(c);
      body(c, b, e);
    }
    return;
  }
  std::vector<std::thread> pool;
  const unsigned used = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  pool.reserve(used);
  for (unsigned t = 0; t < used; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += used) {
        auto [b, e] = range(c);
        body(c, b, e);
      }
    });
  }
  for (auto& th : pool) th.join();
}

/// Deterministic compensated reduction of term(k) over k in [0, count).
template <class Term>
double deterministic_sum(std::size_t count, Term&& term) {
  std::vector<CompensatedSum> partial(kReductionChunks);
  for_each_chunk(count, [&](std::size_t c, std::size_t b, std::size_t e) {
    CompensatedSum acc;
    for (std::size_t k = b; k < e; ++k) acc.add(term(k));
    partial[c] = acc;
  });
  CompensatedSum total;
  for (const auto& part : partial) total.add(part);
  return total.value();
}

/// |x|^r with fast paths for the common integer exponents.
inline double pow_abs(double x, double r) {
  const double a = std::abs(x);
  if (r == 2.0) return a * a;
  if (r == 1.0) return a;
  if (a == 0.0) return 0.0;
  return std::pow(a, r);
}

/// |x|^{r-2} x, defined as 0 at x = 0.
inline double signed_pow(double x, double r) {
  if (x == 0.0) return 0.0;
  if (r == 2.0) return x;
  return std::copysign(std::pow(std::abs(x), r - 1.0), x);
}

}  // namespace nehari
