#pragma once

#include <cstdint>

#include "covstar/tensor_form.hpp"

namespace covstar {

// Deterministic generator for randomized trials, built on the splitmix64
// finalizer (public domain, Sebastiano Vigna).  Fast and well mixed; not
// cryptographic, which is fine for test-case generation.
//
// split(i) derives stream i as a pure function of the original seed and i,
// independent of how much the parent stream has been consumed.  Trials that
// each draw from split(trial_index) therefore see identical inputs whether
// they run serially or on a thread pool.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, n), by rejection so small n is unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) fail_internal("empty range");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      std::uint64_t x = next();
      if (x < limit) return x % n;
    }
  }

  // Uniform integer in [lo, hi], inclusive.
  int range(int lo, int hi) {
    if (lo > hi) fail_internal("empty range");
    return lo + (int)below((std::uint64_t)(hi - lo) + 1);
  }

  bool flip() { return next() & 1; }

  Rng split(std::uint64_t i) const { return Rng(mix(seed_ ^ mix(i + 0x9e3779b97f4a7c15ULL))); }

private:
  std::uint64_t seed_, state_;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// Random polynomial: one to three monomials of total degree at most
// max_degree, with nonzero integer coefficients in [-3, 3].
inline ScalarExpr random_scalar(Rng& rng, int dim, int max_degree) {
  int terms = rng.range(1, 3);
  ScalarExpr s = ScalarExpr::zero(dim);
  for (int t = 0; t < terms; ++t) {
    int c = 0;
    while (c == 0) c = rng.range(-3, 3);
    ScalarExpr m = ScalarExpr::constant(dim, Rat(c));
    int deg = rng.range(0, max_degree);
    for (int j = 0; j < deg; ++j) m *= ScalarExpr::variable(dim, rng.range(1, dim));
    s += m;
  }
  return s;
}

// Random tensor-valued form: every component of the given shape is present
// with probability one half and carries a random polynomial.
inline TensorValuedForm random_form(Rng& rng, int dim, int upper, int lower, int degree,
                                    int max_degree) {
  TensorValuedForm r(dim, upper, lower, degree);
  for (const auto& u : all_tuples(dim, upper))
    for (const auto& l : all_tuples(dim, lower))
      for (const auto& f : increasing_tuples(dim, degree)) {
        if (!rng.flip()) continue;
        r.accumulate(u, l, f, random_scalar(rng, dim, max_degree));
      }
  return r;
}

} // namespace covstar
