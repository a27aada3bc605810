#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace splitsdp {

// Arbitrary-precision integers and rationals back every exact computation.
using Int = mpz_class;
using Rat = mpq_class;

inline double to_double(const Int& v) { return v.get_d(); }
inline double to_double(const Rat& v) { return v.get_d(); }

// Exact dyadic rational equal to the double (finite values only).
Rat rat_from_double(double v);

// Best rational approximation with denominator <= max_den (continued
// fractions).  max_den == 0 requests the exact dyadic conversion.
Rat rat_approx(double v, unsigned long max_den);

// Floor of a rational as an integer.
Int rat_floor(const Rat& v);

std::string rat_str(const Rat& v);

// FNV-1a, used for content digests of deterministic serializations.
struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void feed(const void* data, std::size_t len);
  void feed(const std::string& s) { feed(s.data(), s.size()); }
  std::string hex() const;
};

}  // namespace splitsdp
