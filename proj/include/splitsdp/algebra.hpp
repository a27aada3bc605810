#pragma once

#include <splitsdp/combinatorics.hpp>

#include <string>
#include <vector>

namespace splitsdp {

// An ordered partition of the n coordinates into consecutive parts.
struct SplitShape {
  std::vector<int> parts;

  static SplitShape single(int n) { return SplitShape{{n}}; }
  int m() const { return static_cast<int>(parts.size()); }
  int n() const;
  bool valid() const;
  std::string str() const;  // "2,16"
  bool operator==(const SplitShape&) const = default;
};

SplitShape parse_shape(const std::string& s);

// Orbit of a pair of subsets under the shape's automorphism group, recorded
// per part as (|X n T_p|, |Y n T_p|, |X n Y n T_p|).
struct OrbitProfile {
  std::vector<int> i, j, t;

  int sum_i() const;
  int sum_j() const;
  int sum_t() const;
  // Aggregate Hamming distance |X xor Y| the profile encodes.
  int sum_dist() const { return sum_i() + sum_j() - 2 * sum_t(); }
  std::vector<int> dist_vec() const;  // i_p + j_p - 2 t_p per part

  bool operator==(const OrbitProfile&) const = default;
  // Lexicographic on the concatenation (i, j, t).
  bool operator<(const OrbitProfile& o) const;
  std::string str() const;  // "(i1..;j1..;t1..)"
};

// A profile is realizable iff per part 0 <= t_p <= min(i_p, j_p),
// i_p, j_p <= n_p and i_p + j_p - t_p <= n_p (the union must fit).
bool profile_valid(const SplitShape& shape, const OrbitProfile& p);

// All valid profiles of a shape in lexicographic order, with O(1) index
// lookup through a per-part mixed-radix table.
class ProfileSet {
 public:
  explicit ProfileSet(const SplitShape& shape);

  const SplitShape& shape() const { return shape_; }
  const std::vector<OrbitProfile>& profiles() const { return profiles_; }
  int size() const { return static_cast<int>(profiles_.size()); }
  const OrbitProfile& operator[](int idx) const { return profiles_[idx]; }

  // Index of a profile, -1 when invalid / not present.
  int index_of(const OrbitProfile& p) const;
  // Fast path: per-part (i, j, t) triples given as flat arrays.
  int index_of(const int* i, const int* j, const int* t) const;

 private:
  SplitShape shape_;
  std::vector<OrbitProfile> profiles_;
  std::vector<int> part_code_stride_;   // (n_p+1)^2-style encoding strides
  std::vector<std::vector<int>> part_local_;  // per part: code -> local idx, -1
  std::vector<int> local_count_;
  std::vector<int> mixed_stride_;
  std::vector<int> lut_;  // mixed-radix code -> global index
};

// Index of one eigenblock: one k_p per part with 0 <= k_p <= n_p / 2.
using BlockIndex = std::vector<int>;

std::vector<BlockIndex> block_indices(const SplitShape& shape);

// Block size N_k = prod_p (n_p - 2 k_p + 1).
long block_size(const SplitShape& shape, const BlockIndex& k);

// Multiplicity of the block in the regular representation,
// prod_p (binom(n_p, k_p) - binom(n_p, k_p - 1)).
Int block_multiplicity(const SplitShape& shape, const BlockIndex& k);

// Entry coefficient of the block diagonalization:
// beta(i, j, t, k, n) = sum_u (-1)^(u-t) binom(u, t) binom(n-2k, u-k)
//                       binom(n-k-u, i-u) binom(n-k-u, j-u).
Int beta(long i, long j, long t, long k, long n);

// One symbolic eigenblock: entries are integer linear forms in the profile
// variables; the normalizer 1/sqrt(row_denom[r] * row_denom[c]) is kept
// symbolically so floating point enters only at emission time.
struct BlockSpec {
  BlockIndex k;
  int size = 0;
  std::vector<std::vector<int>> rows;  // row labels: i-vectors, lex order
  std::vector<Int> row_denom;          // prod_p binom(n_p - 2k_p, i_p - k_p)

  struct Term {
    int profile;  // index into the ProfileSet
    Int coeff;    // product of per-part beta values
  };
  // terms[r * size + c]: the linear form of entry (r, c).
  std::vector<std::vector<Term>> terms;

  const std::vector<Term>& entry(int r, int c) const {
    return terms[static_cast<std::size_t>(r) * size + c];
  }
};

// Assemble the eigenblock for block index k over the given profile set.
BlockSpec assemble_block(const ProfileSet& ps, const BlockIndex& k);

// Evaluate a BlockSpec at a numeric profile assignment (with normalizers).
std::vector<double> block_eval(const BlockSpec& b, const std::vector<double>& x);

}  // namespace splitsdp
