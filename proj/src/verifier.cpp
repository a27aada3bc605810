#include <splitsdp/verifier.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace splitsdp {

bool verify_psd(const RatMat& a, int* bad_row) {
  const int n = static_cast<int>(a.size());
  for (int r = 0; r < n; ++r)
    if (static_cast<int>(a[r].size()) != n)
      throw std::invalid_argument("verify_psd: matrix not square");
  // Work on the lower triangle of a copy; W[i][j] for j <= i.
  std::vector<std::vector<Rat>> w(n);
  for (int i = 0; i < n; ++i) {
    w[i].resize(i + 1);
    for (int j = 0; j <= i; ++j) {
      if (a[i][j] != a[j][i])
        throw std::invalid_argument("verify_psd: matrix not symmetric");
      w[i][j] = a[i][j];
    }
  }
  for (int k = 0; k < n; ++k) {
    const Rat p = w[k][k];
    if (p < 0) {
      if (bad_row) *bad_row = k;
      return false;
    }
    if (p == 0) {
      for (int i = k + 1; i < n; ++i) {
        if (w[i][k] != 0) {
          // Zero pivot with a nonzero coupling: indefinite direction.
          if (bad_row) *bad_row = k;
          return false;
        }
      }
      continue;
    }
    for (int i = k + 1; i < n; ++i) {
      if (w[i][k] == 0) continue;
      const Rat f = w[i][k] / p;
      for (int j = k + 1; j <= i; ++j) {
        if (w[j][k] == 0) continue;
        w[i][j] -= f * w[j][k];
      }
    }
  }
  return true;
}

int psd_repair(RatMat& a) {
  int zeroed = 0;
  int bad = -1;
  while (!verify_psd(a, &bad)) {
    const int n = static_cast<int>(a.size());
    for (int j = 0; j < n; ++j) {
      a[bad][j] = 0;
      a[j][bad] = 0;
    }
    ++zeroed;
  }
  return zeroed;
}

RationalDual rationalize_dual(const SolverSolution& sol, const SdpModel& model,
                              unsigned long denominator_limit) {
  const int npsd = static_cast<int>(model.blocks.size());
  const bool has_lp = !model.linear.empty();
  if (static_cast<int>(sol.dual_Y.size()) != npsd + (has_lp ? 1 : 0))
    throw std::invalid_argument("rationalize_dual: dual block count mismatch");

  RationalDual dual;
  dual.blocks.resize(npsd);
  for (int b = 0; b < npsd; ++b) {
    const BlockForm& bf = model.blocks[b];
    const std::vector<double>& Y = sol.dual_Y[b];
    if (Y.size() != static_cast<std::size_t>(bf.size) * bf.size)
      throw std::invalid_argument("rationalize_dual: block " + bf.name +
                                  " has wrong shape");
    std::vector<double> norm(bf.size);
    for (int r = 0; r < bf.size; ++r) norm[r] = std::sqrt(to_double(bf.row_denom[r]));
    RatMat& Z = dual.blocks[b];
    Z.assign(bf.size, std::vector<Rat>(bf.size, Rat(0)));
    for (int r = 0; r < bf.size; ++r) {
      for (int c = r; c < bf.size; ++c) {
        const double avg = 0.5 * (Y[static_cast<std::size_t>(r) * bf.size + c] +
                                  Y[static_cast<std::size_t>(c) * bf.size + r]);
        const double mapped = avg / (norm[r] * norm[c]);
        const Rat q = rat_approx(mapped, denominator_limit);
        Z[r][c] = q;
        Z[c][r] = q;
      }
    }
  }
  if (has_lp) {
    const std::vector<double>& lp = sol.dual_Y[npsd];
    if (lp.size() != model.linear.size())
      throw std::invalid_argument("rationalize_dual: diagonal block has wrong shape");
    dual.mu.reserve(lp.size());
    for (double v : lp)
      dual.mu.push_back(v > 0 ? rat_approx(v, denominator_limit) : Rat(0));
  }
  return dual;
}

Rat raw_bound_from(const Rat& base, const std::vector<Rat>& eps) {
  Rat total = base;
  for (const Rat& e : eps)
    if (e > 0) total += e;
  return total;
}

Certificate certified_bound(const SdpModel& model, const RationalDual& dual,
                            double solver_claim,
                            unsigned long denominator_limit) {
  const int npsd = static_cast<int>(model.blocks.size());
  if (static_cast<int>(dual.blocks.size()) != npsd)
    throw std::invalid_argument("certified_bound: dual block count mismatch");
  if (dual.mu.size() != model.linear.size())
    throw std::invalid_argument("certified_bound: multiplier count mismatch");

  Certificate cert;
  cert.model_digest = model.digest();
  cert.shape = model.shape;
  cert.d = model.d;
  cert.num_vars = model.num_vars;
  cert.denominator_limit = denominator_limit;
  cert.Y = dual.blocks;
  cert.mu = dual.mu;
  cert.bounds_used = model.bounds_used;
  cert.solver_claim = solver_claim;

  cert.repaired.resize(npsd, 0);
  for (int b = 0; b < npsd; ++b) {
    const BlockForm& bf = model.blocks[b];
    if (static_cast<int>(cert.Y[b].size()) != bf.size)
      throw std::invalid_argument("certified_bound: block " + bf.name +
                                  " has wrong shape");
    cert.repaired[b] = psd_repair(cert.Y[b]);
  }
  for (const Rat& m : cert.mu)
    if (m < 0) throw std::invalid_argument("certified_bound: negative multiplier");

  // eps_v = obj_v + sum_b <F_v, Y_b> - sum_r mu_r a_rv, all exact.
  cert.eps.assign(model.num_vars, Rat(0));
  for (int v = 0; v < model.num_vars; ++v) cert.eps[v] = model.obj[v];
  cert.base = model.obj_const;
  for (int b = 0; b < npsd; ++b) {
    const BlockForm& bf = model.blocks[b];
    const RatMat& Z = cert.Y[b];
    for (const BlockForm::Term& t : bf.terms) {
      const Rat& z = Z[t.r][t.c];
      if (z == 0) continue;
      Int cc = t.coeff;
      if (t.r != t.c) cc *= 2;
      cert.eps[t.var] += Rat(cc) * z;
    }
    for (const auto& [r, c, cv] : bf.consts) {
      const Rat& z = Z[r][c];
      if (z == 0) continue;
      Int cc = cv;
      if (r != c) cc *= 2;
      cert.base += Rat(cc) * z;
    }
  }
  for (std::size_t r = 0; r < model.linear.size(); ++r) {
    const Rat& m = cert.mu[r];
    if (m == 0) continue;
    cert.base += m * model.linear[r].rhs;
    for (const auto& [v, cf] : model.linear[r].terms) cert.eps[v] -= m * cf;
  }

  cert.raw_bound = raw_bound_from(cert.base, cert.eps);
  cert.integer_bound = rat_floor(cert.raw_bound);
  // integer_bound is sound on its own; "certified" records whether it keeps
  // pace with the solver's claim instead of drifting past its next integer
  // (the error-too-large failure mode), in which case the run proves only a
  // much weaker statement than the claim.
  const Rat claim = rat_from_double(solver_claim);
  Int claim_ceil = rat_floor(claim);
  if (Rat(claim_ceil) != claim) claim_ceil += 1;
  cert.certified = (cert.integer_bound <= claim_ceil);
  return cert;
}

Certificate certify(const SdpModel& model, const SolverSolution& sol,
                    const CertifyOptions& opts) {
  const RationalDual dual =
      rationalize_dual(sol, model, opts.denominator_limit);
  return certified_bound(model, dual, sol.primal_objective,
                         opts.denominator_limit);
}

std::string Certificate::text() const {
  std::ostringstream out;
  char claim[40];
  std::snprintf(claim, sizeof claim, "%.17g", solver_claim);
  out << "certificate v1\n";
  out << "shape " << shape.str() << "\n";
  out << "d " << d << "\n";
  out << "digest " << model_digest << "\n";
  out << "variables " << num_vars << "\n";
  out << "denominator_limit " << denominator_limit << "\n";
  out << "solver_claim " << claim << "\n";
  out << "base " << rat_str(base) << "\n";
  int neg = 0, zero = 0, pos = 0;
  Rat pos_sum = 0;
  for (const Rat& e : eps) {
    if (e > 0) {
      ++pos;
      pos_sum += e;
    } else if (e < 0) {
      ++neg;
    } else {
      ++zero;
    }
  }
  out << "eps_negative " << neg << "\n";
  out << "eps_zero " << zero << "\n";
  out << "eps_positive " << pos << "\n";
  out << "eps_positive_sum " << rat_str(pos_sum) << "\n";
  // Sign map, 100 variables per line, in variable order.
  for (std::size_t ofs = 0; ofs < eps.size(); ofs += 100) {
    out << "eps_signs ";
    for (std::size_t v = ofs; v < eps.size() && v < ofs + 100; ++v)
      out << (eps[v] > 0 ? '+' : eps[v] < 0 ? '-' : '0');
    out << "\n";
  }
  for (std::size_t v = 0; v < eps.size(); ++v)
    if (eps[v] > 0) out << "eps+ " << v << " " << rat_str(eps[v]) << "\n";
  out << "raw_bound " << rat_str(raw_bound) << "\n";
  out << "integer_bound " << integer_bound.get_str() << "\n";
  out << "certified " << (certified ? "yes" : "no") << "\n";
  int total_repaired = 0;
  for (std::size_t b = 0; b < repaired.size(); ++b) total_repaired += repaired[b];
  out << "repaired_rows " << total_repaired << "\n";
  for (std::size_t b = 0; b < repaired.size(); ++b)
    if (repaired[b] > 0)
      out << "repaired_block " << b << " rows " << repaired[b] << "\n";
  out << "bounds_used " << bounds_used.size() << "\n";
  for (const std::string& s : bounds_used) out << "  " << s << "\n";
  out << "end certificate\n";
  return out.str();
}

FeasibilityReport check_feasible(const SdpModel& model,
                                 const std::vector<Rat>& x_profiles,
                                 double tol) {
  FeasibilityReport rep;
  rep.objective = 0;
  if (static_cast<int>(x_profiles.size()) != model.ps.size()) {
    rep.failures.push_back("value vector size mismatch");
    return rep;
  }

  // Structural constraints: pin, zero-forcing, class constancy.
  std::vector<Rat> x(model.num_vars, Rat(0));
  for (const ClassInfo& ci : model.cls.classes) {
    const Rat& v0 = x_profiles[ci.members.front()];
    for (int mem : ci.members) {
      if (x_profiles[mem] != v0) {
        rep.failures.push_back("not constant on class " + model.ps[ci.rep].str());
        break;
      }
    }
    if (ci.pinned) {
      if (v0 != 1)
        rep.failures.push_back("pinned class value " + rat_str(v0) + " != 1");
    } else if (ci.forced_zero) {
      if (v0 != 0)
        rep.failures.push_back("forced-zero class " + model.ps[ci.rep].str() +
                               " value " + rat_str(v0));
    } else {
      x[ci.var] = v0;
    }
  }

  rep.objective = model.obj_const;
  for (int v = 0; v < model.num_vars; ++v) rep.objective += model.obj[v] * x[v];

  for (const LinearConstraint& lc : model.linear) {
    Rat lhs = 0;
    for (const auto& [v, cf] : lc.terms) lhs += cf * x[v];
    if (lhs > lc.rhs) {
      rep.failures.push_back("row " + lc.family +
                             (lc.label.empty() ? "" : " " + lc.label) +
                             " violated: lhs-rhs = " + rat_str(lhs - lc.rhs));
    }
  }

  rep.min_block_eig = 0;
  for (const BlockForm& bf : model.blocks) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(bf.size, bf.size);
    std::vector<double> norm(bf.size);
    for (int r = 0; r < bf.size; ++r) norm[r] = std::sqrt(to_double(bf.row_denom[r]));
    for (const auto& [r, c, cv] : bf.consts) M(r, c) += to_double(cv);
    for (const BlockForm::Term& t : bf.terms)
      M(t.r, t.c) += to_double(t.coeff) * to_double(x[t.var]);
    for (int r = 0; r < bf.size; ++r)
      for (int c = r; c < bf.size; ++c) {
        M(r, c) /= norm[r] * norm[c];
        M(c, r) = M(r, c);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const double mn = es.eigenvalues().minCoeff();
    rep.min_block_eig = std::min(rep.min_block_eig, mn);
    if (mn < -tol)
      rep.failures.push_back("block " + bf.name + " not PSD: min eigenvalue " +
                             std::to_string(mn));
  }

  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace splitsdp
