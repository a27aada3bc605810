#include <splitsdp/combinatorics.hpp>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace splitsdp {

namespace {

// Factorial cache shared by binom and multinom.  Guarded by a mutex so
// constraint builders may call these from multiple threads.
std::mutex g_fact_mutex;
std::vector<Int> g_fact = {Int(1)};

Int fact(long n) {
  std::lock_guard<std::mutex> lock(g_fact_mutex);
  while (static_cast<long>(g_fact.size()) <= n) {
    g_fact.push_back(g_fact.back() * static_cast<long>(g_fact.size()));
  }
  return g_fact[static_cast<std::size_t>(n)];
}

}  // namespace

Int binom(long n, long k) {
  if (n < 0 || k < 0 || k > n) return Int(0);
  return fact(n) / (fact(k) * fact(n - k));
}

Int multinom(long n, long a, long b, long c) {
  if (n < 0 || a < 0 || b < 0 || c < 0 || a + b + c > n) return Int(0);
  return fact(n) / (fact(a) * fact(b) * fact(c) * fact(n - a - b - c));
}

Int krawtchouk(long k, long n, long x) {
  if (k < 0 || k > n || x < 0 || x > n) {
    throw std::invalid_argument("krawtchouk: indices out of range");
  }
  Int acc(0);
  for (long y = 0; y <= k; ++y) {
    Int term = binom(x, y) * binom(n - x, k - y);
    if (y % 2 == 0) acc += term; else acc -= term;
  }
  return acc;
}

}  // namespace splitsdp
