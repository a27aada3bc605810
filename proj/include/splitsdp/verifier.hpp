#pragma once

#include <splitsdp/model.hpp>
#include <splitsdp/sdpa_io.hpp>

#include <string>
#include <vector>

namespace splitsdp {

using RatMat = std::vector<std::vector<Rat>>;

// Exact LDL^T positive-semidefiniteness test.  Returns true iff PSD; when
// false, *bad_row (if non-null) receives the offending pivot row.
bool verify_psd(const RatMat& a, int* bad_row = nullptr);

// Repeatedly zero the row/column of a failing pivot until the matrix passes
// verify_psd (terminating at the zero matrix in the worst case).  Returns the
// number of zeroed rows; the result is exactly PSD.
int psd_repair(RatMat& a);

// The solver dual mapped onto the exact integer block forms.  Blocks are the
// congruence images Y_rc / sqrt(denom_r denom_c) of the solver dual, made
// symmetric by averaging and rounded to denominators <= denominator_limit;
// mu holds the clipped-nonnegative multipliers of the linear rows.
struct RationalDual {
  std::vector<RatMat> blocks;  // one per PSD block
  std::vector<Rat> mu;         // one per linear row, >= 0
};

RationalDual rationalize_dual(const SolverSolution& sol, const SdpModel& model,
                              unsigned long denominator_limit);

// raw bound = base + sum max(0, eps_v): the weak-duality estimate under
// 0 <= x <= 1.
Rat raw_bound_from(const Rat& base, const std::vector<Rat>& eps);

struct Certificate {
  std::string model_digest;
  SplitShape shape;
  int d = 0;
  int num_vars = 0;
  unsigned long denominator_limit = 0;
  std::vector<RatMat> Y;       // verified PSD dual blocks (post-repair)
  std::vector<Rat> mu;         // linear-row multipliers
  std::vector<Rat> eps;        // exact residual per variable
  std::vector<int> repaired;   // zeroed rows per block during PSD repair
  Rat base;                    // obj_const + <F_0, Y> + mu . rhs
  Rat raw_bound;               // base + sum max(0, eps)
  Int integer_bound;           // floor(raw_bound)
  double solver_claim = 0;     // solver's primal objective for comparison
  bool certified = false;      // integer_bound <= ceil(solver_claim)
  std::vector<std::string> bounds_used;

  std::string text() const;  // deterministic human-auditable serialization
};

struct CertifyOptions {
  // 0 keeps the exact binary value of every float: denominators stay powers
  // of two, so the rational arithmetic never blows up on mixed lcm's.
  unsigned long denominator_limit = 0;
};

// certified_bound: exact weak-duality bound from an already-rationalized
// PSD dual; certify runs rationalize_dual + psd_repair + certified_bound.
Certificate certified_bound(const SdpModel& model, const RationalDual& dual,
                            double solver_claim, unsigned long denominator_limit);
Certificate certify(const SdpModel& model, const SolverSolution& sol,
                    const CertifyOptions& opts = {});

// Exact feasibility audit of a per-profile assignment against every model
// constraint: the pin/forcing/symmetry structure and each linear row are
// checked in rational arithmetic; PSD blocks are checked through float
// eigenvalues at tolerance tol.
struct FeasibilityReport {
  bool pass = false;
  Rat objective;               // model objective at x
  double min_block_eig = 0;    // over all blocks
  std::vector<std::string> failures;
};

FeasibilityReport check_feasible(const SdpModel& model,
                                 const std::vector<Rat>& x_profiles,
                                 double tol = 1e-9);

}  // namespace splitsdp
