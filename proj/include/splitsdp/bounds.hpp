#pragma once

#include <splitsdp/numeric.hpp>

#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace splitsdp {

// Odd-distance instances reduce to even ones: A(n, 2e-1) = A(n+1, 2e).
// Requires 1 <= d <= n.  Even d is returned unchanged.
std::pair<int, int> propagate(int n, int d);

// Table of literature upper bounds, loaded from a plain text file with one
// entry per line:
//   cw  n d w value          # provenance
//   dcw w1 t1 w2 t2 d value  # provenance
//   a   n d value            # provenance
// cw entries bound constant-weight codes A(n, d, w); dcw entries bound
// doubly-bounded codes T(w1, t1, w2, t2, d) (w1 ones among t1 fixed
// positions, w2 among the remaining t2, min distance d); a entries bound
// unrestricted codes A(n, d).
struct BoundTable {
  std::map<std::tuple<int, int, int>, std::pair<Int, std::string>> cw;
  std::map<std::tuple<int, int, int, int, int>, std::pair<Int, std::string>> dcw;
  std::map<std::pair<int, int>, std::pair<Int, std::string>> nd;

  static BoundTable load(const std::string& path);
  static BoundTable parse(const std::string& text, const std::string& origin);
  std::string serialize() const;
};

// Lookup front-end: table entries win; otherwise a conservative analytic
// fallback is used.  Thread-safe; every answered query is recorded with its
// provenance so reports can cite the bounds a model consumed.
class BoundContext {
 public:
  explicit BoundContext(const BoundTable* table) : table_(table) {}

  // Upper bound on A(n, d, w); fallback
  //   min{ 1 if d > 2 min(w, n-w);  floor(n/w * cw(n-1, d, w-1));  binom(n, w) }.
  Int cw_bound(int n, int d, int w);

  // Upper bound on T(w1, t1, w2, t2, d); fallback
  //   min( cw_bound(t1 + t2, d, w1 + w2),  binom(t1, w1) * binom(t2, w2) ).
  Int dcw_bound(int w1, int t1, int w2, int t2, int d);

  // Upper bound on the unrestricted A(n, d): table entry, else the cheapest
  // of the classical Singleton / Plotkin / halving bounds (after even-d
  // propagation).
  Int nd_bound(int n, int d);

  std::vector<std::string> used() const;

 private:
  Int cw_bound_locked(int n, int d, int w);
  Int nd_bound_locked(int n, int d);
  void record(const std::string& line);

  const BoundTable* table_;
  mutable std::mutex mutex_;
  std::map<std::tuple<int, int, int>, Int> cw_memo_;
  std::map<std::pair<int, int>, Int> nd_memo_;
  std::map<std::string, std::string> used_;
};

}  // namespace splitsdp
