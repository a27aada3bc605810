#pragma once

#include <splitsdp/algebra.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace splitsdp {

// Brute-force reference implementations used to validate the production
// code paths.  Everything here favors obviousness over speed and is only
// expected to run at small parameters.

using Word = std::uint32_t;  // coordinate 1 = most significant of the n bits

// Popcount of the portion of w lying in part p of the shape.
int part_popcount(const SplitShape& shape, Word w, int p);

// A binary code given explicitly by its words.
struct CodeSample {
  SplitShape shape;
  std::vector<Word> words;

  static CodeSample from_strings(const SplitShape& shape,
                                 const std::vector<std::string>& rows);
  // Parse one 0/1 string per line; blank lines and '#' comments ignored.
  static CodeSample parse(const SplitShape& shape, const std::string& text);
  int min_distance() const;  // n + 1 for codes with fewer than 2 words
  std::string str() const;
};

// Dense 0/1 generator matrix of one orbit profile, indexed by all 2^n words.
// Requires shape.n() <= 12.
Eigen::MatrixXd dense_generator(const SplitShape& shape, const OrbitProfile& p);

// Triple statistics lambda[p] = #{(X,Y,Z) in C^3 : profile(X xor Y, X xor Z) = p}.
struct LambdaCounts {
  const ProfileSet* ps;
  std::vector<Int> counts;  // indexed like ps->profiles()
};
LambdaCounts lambda_counts(const ProfileSet& ps, const CodeSample& code);

// Normalized variables x[p] = lambda[p] / (|C| * prod_p multinom(...)).
std::vector<Rat> x_from_lambda(const LambdaCounts& lc, std::size_t code_size);

// The two moment matrices of a code, built from x via the coefficient
// formulas.  R'_s is absent when |C| = 2^n (the prefactor degenerates).
struct MomentMatrices {
  Eigen::MatrixXd R;
  std::optional<Eigen::MatrixXd> Rprime;
};
MomentMatrices build_R_matrices(const ProfileSet& ps, const std::vector<Rat>& x,
                                std::size_t code_size);

// Same matrices by explicit averaging over the stabilizer cosets of the
// shape's automorphism group (coordinate permutations within parts composed
// with translations).  Test oracle only; requires shape.n() <= 6.
MomentMatrices build_R_matrices_by_averaging(const SplitShape& shape,
                                             const CodeSample& code);

// Exact maximum size of a binary code with length n and minimum distance d,
// by maximum-clique branch and bound.  Requires n <= limit (default 10).
int exact_A(int n, int d, int limit = 10);
std::vector<Word> exact_A_code(int n, int d, int limit = 10);

// Exact maximum size of a constant-weight-w code with distance d.
int exact_A_cw(int n, int d, int w);

// Exact optimum of the linear-programming bound
//   max 1 + sum_{j >= d} A_j  s.t.  A_j >= 0,
//   sum_j A_j K_k^n(j) >= -binom(n, k) for k = 0..n,
// solved in rational arithmetic.  Requires n <= 20.
Rat delsarte_lp_value(int n, int d);

// Exact rational LP: max c.v subject to A v <= b, v >= 0 (primal simplex,
// Bland's rule).  Returns nullopt when unbounded; throws when infeasible.
std::optional<Rat> rational_lp_max(const std::vector<std::vector<Rat>>& A,
                                   const std::vector<Rat>& b,
                                   const std::vector<Rat>& c);

// Uniformly random code with min distance >= d (greedy fill from a shuffled
// word order; repeatable via the seed).
CodeSample random_code(const SplitShape& shape, int d, std::mt19937& rng,
                       int max_words = -1);

// Words of the extended Hamming code of length 8 (16 words, distance 4).
std::vector<Word> extended_hamming8();

}  // namespace splitsdp
