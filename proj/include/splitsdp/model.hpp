#pragma once

#include <splitsdp/algebra.hpp>
#include <splitsdp/bounds.hpp>

#include <string>
#include <vector>

namespace splitsdp {

// Canonical representative of a profile's symmetry class: the lex-least
// profile obtained by permuting the triple of vectors (i, j, i+j-2t) and
// re-solving for t.
OrbitProfile canonical_class(const SplitShape& shape, const OrbitProfile& p);

struct ClassInfo {
  int rep = -1;              // profile index of the canonical representative
  std::vector<int> members;  // profile indices, ascending
  bool pinned = false;       // the all-zero class, fixed to 1
  bool forced_zero = false;  // killed by the distance constraints
  int var = -1;              // model variable index, -1 when eliminated
};

// Symmetry classes of a profile set together with the distance-d forcing:
// a class is forced to zero when any of its aggregate distances
// {sum i, sum j, sum i + sum j - 2 sum t} falls in {1, .., d-1}.
struct Classification {
  const ProfileSet* ps = nullptr;
  int d = 0;
  std::vector<int> class_of_profile;
  std::vector<ClassInfo> classes;  // ordered by representative profile index
  int num_vars = 0;
  std::vector<int> class_of_var;
};

Classification classify(const ProfileSet& ps, int d);

// One inequality sum_v coeff_v x_v <= rhs over the model variables.
struct LinearConstraint {
  std::string family;
  std::string label;
  std::vector<std::pair<int, Rat>> terms;  // sorted by variable index
  Rat rhs;
};

// One eigenblock as an affine matrix form over the model variables.  The
// exact content of entry (r, c) is (const + sum coeff_v x_v); the value the
// solver sees is that divided by sqrt(row_denom[r] * row_denom[c]).  Only
// the upper triangle (r <= c) is stored; the form is symmetric.
struct BlockForm {
  std::string name;
  BlockIndex k;
  bool primed = false;  // substitutes x_dist - x per profile
  int size = 0;
  std::vector<std::vector<int>> row_ivecs;
  std::vector<Int> row_denom;

  struct Term {
    int r, c, var;
    Int coeff;
  };
  std::vector<Term> terms;                          // sorted (r, c, var)
  std::vector<std::tuple<int, int, Int>> consts;    // sorted (r, c)
};

// Toggles for the optional linear constraint families (all on by default).
struct ModelOptions {
  bool shortening = true;  // binomial-weighted rate constraints
  int shortening_kmax = 4;
  bool tail = true;           // single high-weight counting row
  bool weighted_tail = true;  // constant-weight-weighted high-weight row
  bool tail_family = true;    // per-offset high-weight rows
  bool weight_caps = true;    // A_i <= A(n, d, i)
  bool pair_caps = true;      // doubly-bounded caps on aggregated pairs
};

struct SdpModel {
  SplitShape shape;
  int d = 0;
  ProfileSet ps;
  Classification cls;
  int num_vars = 0;
  Rat obj_const;
  std::vector<Rat> obj;  // per variable, the |C| objective
  std::vector<BlockForm> blocks;
  std::vector<LinearConstraint> linear;
  std::vector<std::string> bounds_used;

  explicit SdpModel(const SplitShape& s) : shape(s), ps(s) {}
  // cls.ps points at the ps member, so moves must re-seat it.
  SdpModel(SdpModel&& o);
  SdpModel& operator=(SdpModel&& o);
  SdpModel(const SdpModel&) = delete;
  SdpModel& operator=(const SdpModel&) = delete;

  std::string digest() const;         // FNV-1a over the exact serialization
  std::string manifest_json() const;  // structural summary for reports
};

// Assemble the SDP for shape and even distance d (d == n+1 builds the
// trivial all-distances-forbidden model).  Table lookups go through ctx.
SdpModel build_model(const SplitShape& shape, int d, BoundContext& ctx,
                     const ModelOptions& opts = {});

// Push a per-profile assignment down to one value per model variable,
// checking class-constancy, forced zeros and the pinned class exactly.
std::vector<Rat> model_x_from_profiles(const SdpModel& model,
                                       const std::vector<Rat>& x_profiles);

// Aggregation to a coarser shape obtained by merging consecutive parts:
// x_coarse[(a,b,c)] = sum over fine profiles mapping to (a,b,c) of
//   prod_parts multinom(n_p; i_p-t_p, j_p-t_p, t_p) / multinom(N_q; ...)
// times x_fine.  Exact.
std::vector<Rat> aggregate(const ProfileSet& fine, const std::vector<Rat>& x,
                           const ProfileSet& coarse);

// For each coarse profile, the fine profiles whose partwise sums land on it.
// Triple counts and generators aggregate as plain sums over these fibers;
// the x-level aggregation above adds the multinomial weights.
std::vector<std::vector<int>> aggregation_fibers(const ProfileSet& fine,
                                                 const ProfileSet& coarse);

// Triple-count aggregation: plain sums over the fibers.
std::vector<Int> aggregate_lambda(const ProfileSet& fine,
                                  const std::vector<Int>& lam,
                                  const ProfileSet& coarse);

// Distance distribution of a per-profile assignment: the split entries
// A_ivec = prod_p binom(n_p, i_p) x_{(i,0,0)} (lex order, first part most
// significant) together with their sums by total weight.
struct DistanceDistribution {
  std::vector<Rat> by_weight;                             // A_0 .. A_n
  std::vector<std::pair<std::vector<int>, Rat>> by_ivec;  // (i-vector, A_ivec)
};

DistanceDistribution distance_distribution(const ProfileSet& ps,
                                           const std::vector<Rat>& x);

// The by_weight half of distance_distribution: returns A_0..A_n.
std::vector<Rat> weight_distribution(const ProfileSet& ps, const std::vector<Rat>& x);

// Residuals of the generalized power-sum inequalities: for every exponent
// vector p the value sum_ivec A_ivec prod_q K_{p_q}^{n_q}(i_q).
// All residuals of a genuine code are nonnegative.
std::vector<Rat> delsarte_residuals(const ProfileSet& ps, const std::vector<Rat>& x);

}  // namespace splitsdp
