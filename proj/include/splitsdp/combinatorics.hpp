#pragma once

#include <splitsdp/numeric.hpp>

namespace splitsdp {

// binom(n, k): binomial coefficient, 0 whenever k < 0, n < 0 or k > n.
Int binom(long n, long k);

// multinom(n, a, b, c) = n! / (a! b! c! (n-a-b-c)!), the number of ways to
// place three disjoint marked sets of sizes a, b, c inside n positions.
// 0 when any of a, b, c is negative or a + b + c > n.
Int multinom(long n, long a, long b, long c);

// Krawtchouk polynomial K_k^n(x) = sum_y (-1)^y binom(x, y) binom(n-x, k-y).
// Requires 0 <= k <= n and 0 <= x <= n.
Int krawtchouk(long k, long n, long x);

}  // namespace splitsdp
