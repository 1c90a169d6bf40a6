#pragma once

#include <gmpxx.h>

#include <string>

namespace covstar {

// Exact arbitrary-precision rationals.  GMP keeps them canonical
// (coprime numerator/denominator, positive denominator).
using Rat = mpq_class;
using Int = mpz_class;

inline std::string rat_str(const Rat& q) { return q.get_str(); }

inline Rat rat_pow_ui(const Rat& q, unsigned long e) {
  Rat r;
  mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), e);
  return r;
}

} // namespace covstar
