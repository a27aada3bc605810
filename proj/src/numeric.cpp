#include <splitsdp/numeric.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace splitsdp {

Rat rat_from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("rat_from_double: non-finite value");
  Rat r(v);  // exact: doubles are dyadic rationals
  r.canonicalize();
  return r;
}

Rat rat_approx(double v, unsigned long max_den) {
  if (!std::isfinite(v)) throw std::invalid_argument("rat_approx: non-finite value");
  if (max_den == 0) return rat_from_double(v);
  // Continued-fraction convergents of the exact dyadic value; the last
  // convergent with denominator <= max_den is the best approximation.
  Rat target = rat_from_double(v);
  if (target.get_den() <= max_den) return target;
  bool neg = target < 0;
  if (neg) target = -target;
  Int p0(1), q0(0), p1, q1(1);  // p1 = floor(target)
  Rat rem = target;
  p1 = rat_floor(rem);
  rem -= Rat(p1);
  while (rem != 0) {
    rem = 1 / rem;
    Int a = rat_floor(rem);
    rem -= Rat(a);
    Int p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > Int(max_den)) {
      // Semiconvergent with the largest admissible coefficient.
      Int amax = (Int(max_den) - q0) / q1;
      if (amax * 2 >= a) {
        Int ps = amax * p1 + p0, qs = amax * q1 + q0;
        Rat semi(ps, qs), conv(p1, q1);
        semi.canonicalize();
        conv.canonicalize();
        if (abs(semi - target) < abs(conv - target)) { p1 = ps; q1 = qs; }
      }
      break;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  Rat out(p1, q1);
  out.canonicalize();
  return neg ? Rat(-out) : out;
}

Int rat_floor(const Rat& v) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
  return q;
}

std::string rat_str(const Rat& v) {
  return v.get_str();
}

void Fnv1a::feed(const void* data, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace splitsdp
