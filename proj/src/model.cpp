#include <splitsdp/model.hpp>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace splitsdp {

OrbitProfile canonical_class(const SplitShape& shape, const OrbitProfile& p) {
  const int m = shape.m();
  const std::vector<int> dv = p.dist_vec();
  const std::vector<int>* v[3] = {&p.i, &p.j, &dv};
  // Permuting the triple (i, j, dist) and re-solving t = (i' + j' - dist') / 2
  // per part maps realizable profiles to realizable profiles.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  OrbitProfile best;
  bool have = false;
  for (const auto& pm : perms) {
    OrbitProfile q;
    q.i = *v[pm[0]];
    q.j = *v[pm[1]];
    const std::vector<int>& dd = *v[pm[2]];
    q.t.resize(m);
    bool ok = true;
    for (int a = 0; a < m; ++a) {
      const int s = q.i[a] + q.j[a] - dd[a];
      if (s < 0 || s % 2 != 0) {
        ok = false;
        break;
      }
      q.t[a] = s / 2;
    }
    if (!ok || !profile_valid(shape, q)) continue;
    if (!have || q < best) {
      best = q;
      have = true;
    }
  }
  if (!have) throw std::logic_error("canonical_class: no realizable image");
  return best;
}

Classification classify(const ProfileSet& ps, int d) {
  Classification out;
  out.ps = &ps;
  out.d = d;
  const int P = ps.size();
  out.class_of_profile.assign(P, -1);

  std::map<int, std::vector<int>> groups;  // rep profile index -> members
  for (int idx = 0; idx < P; ++idx) {
    const OrbitProfile rep = canonical_class(ps.shape(), ps[idx]);
    const int ridx = ps.index_of(rep);
    if (ridx < 0) throw std::logic_error("classify: canonical image missing");
    groups[ridx].push_back(idx);
  }

  out.classes.reserve(groups.size());
  const auto in_gap = [d](int w) { return w >= 1 && w <= d - 1; };
  for (const auto& [ridx, members] : groups) {
    ClassInfo ci;
    ci.rep = ridx;
    ci.members = members;  // ascending by construction
    const OrbitProfile& r = ps[ridx];
    const int si = r.sum_i(), sj = r.sum_j(), sd = r.sum_dist();
    ci.pinned = (si == 0 && sj == 0);
    ci.forced_zero = in_gap(si) || in_gap(sj) || in_gap(sd);
    const int cidx = static_cast<int>(out.classes.size());
    for (int mem : members) out.class_of_profile[mem] = cidx;
    out.classes.push_back(std::move(ci));
  }

  int v = 0;
  for (std::size_t c = 0; c < out.classes.size(); ++c) {
    ClassInfo& ci = out.classes[c];
    if (ci.pinned || ci.forced_zero) continue;
    ci.var = v++;
    out.class_of_var.push_back(static_cast<int>(c));
  }
  out.num_vars = v;
  return out;
}

namespace {

// Affine form constant + sum coeff_v x_v over the model variables.
struct LinExpr {
  std::map<int, Rat> terms;
  Rat constant = 0;

  bool empty() const { return terms.empty() && constant == 0; }
};

// Accumulates one row sum coeff_v x_v <= rhs, folding the pinned class into
// the right-hand side and dropping forced-zero classes.
struct RowBuilder {
  const Classification* cls;
  std::map<int, Rat> terms;
  Rat rhs = 0;

  explicit RowBuilder(const Classification& c) : cls(&c) {}

  void add_class(int cidx, const Rat& coeff) {
    const ClassInfo& ci = cls->classes[cidx];
    if (ci.forced_zero) return;
    if (ci.pinned) {
      rhs -= coeff;
      return;
    }
    terms[ci.var] += coeff;
  }
  void add_profile(int pidx, const Rat& coeff) {
    add_class(cls->class_of_profile[pidx], coeff);
  }
  void add_expr(const LinExpr& e, const Rat& scale) {
    for (const auto& [v, c] : e.terms) terms[v] += scale * c;
    rhs -= scale * e.constant;
  }
};

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (a) s += ',';
    s += std::to_string(v[a]);
  }
  return s;
}

}  // namespace

SdpModel::SdpModel(SdpModel&& o)
    : shape(std::move(o.shape)),
      d(o.d),
      ps(std::move(o.ps)),
      cls(std::move(o.cls)),
      num_vars(o.num_vars),
      obj_const(std::move(o.obj_const)),
      obj(std::move(o.obj)),
      blocks(std::move(o.blocks)),
      linear(std::move(o.linear)),
      bounds_used(std::move(o.bounds_used)) {
  cls.ps = &ps;
}

SdpModel& SdpModel::operator=(SdpModel&& o) {
  if (this != &o) {
    shape = std::move(o.shape);
    d = o.d;
    ps = std::move(o.ps);
    cls = std::move(o.cls);
    num_vars = o.num_vars;
    obj_const = std::move(o.obj_const);
    obj = std::move(o.obj);
    blocks = std::move(o.blocks);
    linear = std::move(o.linear);
    bounds_used = std::move(o.bounds_used);
    cls.ps = &ps;
  }
  return *this;
}

SdpModel build_model(const SplitShape& shape, int d, BoundContext& ctx,
                     const ModelOptions& opts) {
  if (!shape.valid()) throw std::invalid_argument("build_model: invalid shape");
  const int n = shape.n();
  const int m = shape.m();
  const bool trivial = (d == n + 1);
  if (!trivial && !(d >= 2 && d <= n && d % 2 == 0)) {
    throw std::invalid_argument(
        "build_model: need even d in [2, n] or d = n + 1; reduce odd d with "
        "propagate(n, d) first");
  }

  SdpModel model(shape);
  model.d = d;
  model.cls = classify(model.ps, d);
  model.cls.ps = &model.ps;
  model.num_vars = model.cls.num_vars;
  const ProfileSet& ps = model.ps;
  const Classification& cls = model.cls;
  const int P = ps.size();

  const std::vector<int> zz(m, 0);
  const auto diag_index = [&](const std::vector<int>& iv) {
    const int idx = ps.index_of(iv.data(), zz.data(), zz.data());
    if (idx < 0) throw std::logic_error("build_model: missing diagonal profile");
    return idx;
  };

  // Weight expressions A_w = sum_{|ivec| = w} prod_p binom(n_p, i_p) x_(ivec,0,0).
  std::vector<LinExpr> Aw(n + 1);
  {
    std::vector<int> iv(m, 0);
    while (true) {
      Int w = 1;
      int total = 0;
      for (int a = 0; a < m; ++a) {
        w *= binom(shape.parts[a], iv[a]);
        total += iv[a];
      }
      const ClassInfo& ci = cls.classes[cls.class_of_profile[diag_index(iv)]];
      if (ci.pinned) {
        Aw[total].constant += Rat(w);
      } else if (!ci.forced_zero) {
        Aw[total].terms[ci.var] += Rat(w);
      }
      int a = m - 1;
      while (a >= 0 && iv[a] == shape.parts[a]) iv[a--] = 0;
      if (a < 0) break;
      ++iv[a];
    }
  }

  // Objective |C| = sum_w A_w.
  model.obj_const = 0;
  model.obj.assign(model.num_vars, 0);
  for (int w = 0; w <= n; ++w) {
    model.obj_const += Aw[w].constant;
    for (const auto& [v, c] : Aw[w].terms) model.obj[v] += c;
  }

  // Distance diagonal profile of every profile, for the complement blocks.
  std::vector<int> dist_idx(P);
  for (int idx = 0; idx < P; ++idx) dist_idx[idx] = diag_index(ps[idx].dist_vec());

  // Eigenblocks: the pair form R[k], then the complement form Rp[k] whose
  // entries substitute x_dist(p) - x_p per profile.  The positive prefactor
  // |C| / (2^n - |C|) on the complement form is omitted; it does not affect
  // semidefiniteness.
  for (const BlockIndex& k : block_indices(shape)) {
    const BlockSpec spec = assemble_block(ps, k);
    BlockForm R, Q;
    R.k = Q.k = k;
    R.name = "R[" + join_ints(k) + "]";
    Q.name = "Rp[" + join_ints(k) + "]";
    R.primed = false;
    Q.primed = true;
    R.size = Q.size = spec.size;
    R.row_ivecs = Q.row_ivecs = spec.rows;
    R.row_denom = Q.row_denom = spec.row_denom;
    for (int r = 0; r < spec.size; ++r) {
      for (int c = r; c < spec.size; ++c) {
        std::map<int, Int> accR, accQ;
        Int cstR = 0, cstQ = 0;
        const auto fold = [&](std::map<int, Int>& acc, Int& cst, int pidx,
                              const Int& coeff) {
          const ClassInfo& ci = cls.classes[cls.class_of_profile[pidx]];
          if (ci.forced_zero) return;
          if (ci.pinned)
            cst += coeff;
          else
            acc[ci.var] += coeff;
        };
        for (const BlockSpec::Term& tm : spec.entry(r, c)) {
          fold(accR, cstR, tm.profile, tm.coeff);
          fold(accQ, cstQ, dist_idx[tm.profile], tm.coeff);
          fold(accQ, cstQ, tm.profile, -tm.coeff);
        }
        if (cstR != 0) R.consts.emplace_back(r, c, cstR);
        if (cstQ != 0) Q.consts.emplace_back(r, c, cstQ);
        for (const auto& [v, co] : accR)
          if (co != 0) R.terms.push_back({r, c, v, co});
        for (const auto& [v, co] : accQ)
          if (co != 0) Q.terms.push_back({r, c, v, co});
      }
    }
    model.blocks.push_back(std::move(R));
    model.blocks.push_back(std::move(Q));
  }

  // Linear rows, deduplicated on the exact (terms, rhs) content.
  std::set<std::string> seen;
  const auto push_row = [&](RowBuilder& rb, const std::string& family,
                            const std::string& label) {
    for (auto it = rb.terms.begin(); it != rb.terms.end();) {
      if (it->second == 0)
        it = rb.terms.erase(it);
      else
        ++it;
    }
    if (rb.terms.empty()) {
      if (rb.rhs < 0)
        throw std::logic_error("build_model: contradictory row in " + family);
      return;  // trivially satisfied
    }
    std::string key;
    for (const auto& [v, c] : rb.terms)
      key += std::to_string(v) + ":" + rat_str(c) + ";";
    key += "<=" + rat_str(rb.rhs);
    if (!seen.insert(key).second) return;
    LinearConstraint lc;
    lc.family = family;
    lc.label = label;
    lc.terms.assign(rb.terms.begin(), rb.terms.end());
    lc.rhs = rb.rhs;
    model.linear.push_back(std::move(lc));
  };

  // x >= 0 per variable.
  for (int c : cls.class_of_var) {
    RowBuilder rb(cls);
    rb.terms[cls.classes[c].var] = -1;
    push_row(rb, "nonneg", ps[cls.classes[c].rep].str());
  }

  // x_p <= x_(i(p),0,0) per profile (the diagonal dominates its row/column).
  for (const ClassInfo& ci : cls.classes) {
    for (int pm : ci.members) {
      RowBuilder rb(cls);
      rb.add_profile(pm, 1);
      rb.add_profile(diag_index(ps[pm].i), -1);
      push_row(rb, "diag-cap", ps[pm].str());
    }
  }

  // x_(i,0,0) + x_(0,j,0) <= 1 + x_p per profile.
  for (const ClassInfo& ci : cls.classes) {
    for (int pm : ci.members) {
      RowBuilder rb(cls);
      rb.add_profile(diag_index(ps[pm].i), 1);
      OrbitProfile offd;
      offd.i = zz;
      offd.j = ps[pm].j;
      offd.t = zz;
      const int jdx = ps.index_of(offd);
      if (jdx < 0) throw std::logic_error("build_model: missing column profile");
      rb.add_profile(jdx, 1);
      rb.add_profile(pm, -1);
      rb.rhs += 1;
      push_row(rb, "triangle", ps[pm].str());
    }
  }

  // x <= 1 per variable (mostly deduplicated against diag-cap).
  for (int c : cls.class_of_var) {
    RowBuilder rb(cls);
    rb.terms[cls.classes[c].var] = 1;
    rb.rhs = 1;
    push_row(rb, "box", ps[cls.classes[c].rep].str());
  }

  // Literature families only apply to genuine even distances.
  if (!trivial) {
    const int h = d / 2;

    if (opts.shortening) {
      const int kmax = std::min(opts.shortening_kmax, n - 1);
      for (int k = 1; k <= kmax; ++k) {
        const Int bnd = ctx.nd_bound(n - k, d);
        RowBuilder rb(cls);
        for (int w = 0; w <= n - k; ++w) rb.add_expr(Aw[w], Rat(binom(n - w, k)));
        rb.rhs += Rat(binom(n, k) * bnd);
        push_row(rb, "shortening", "k=" + std::to_string(k));
      }
    }

    if (opts.tail) {
      const Int cap = 2 * n / d;
      RowBuilder rb(cls);
      rb.add_expr(Aw[n - h], 1);
      for (int i = 0; i < h; ++i) rb.add_expr(Aw[n - i], Rat(cap));
      rb.rhs += Rat(cap);
      push_row(rb, "tail", "");
    }

    if (opts.weighted_tail && d >= 4 && n >= d + 1) {
      const Int pP = ctx.cw_bound(n - 1, d, h + 1);
      const Int qQ = ctx.cw_bound(n - h, d, h + 1);
      const Int rR = ctx.cw_bound(n - h + 2, d, h + 2);
      RowBuilder rb(cls);
      rb.add_expr(Aw[n - h - 2], Rat(h + 2));
      rb.add_expr(Aw[n - h], Rat(h * (pP - qQ)));
      rb.add_expr(Aw[n - h + 2], Rat(n * pP - (h + 2) * rR));
      for (int w = n - h + 3; w <= n; ++w) rb.add_expr(Aw[w], Rat(n * pP));
      rb.rhs += Rat(n * pP);
      push_row(rb, "weighted-tail", "");
    }

    if (opts.tail_family) {
      for (int i = 1; i <= h - 1; ++i) {
        const Int cap = ctx.cw_bound(n, d, h + i);
        const Int inner = ctx.cw_bound(n - h + i, d, h + i);
        RowBuilder rb(cls);
        rb.add_expr(Aw[n - h - i], 1);
        rb.add_expr(Aw[n - h + i], Rat(cap - inner));
        for (int j = i + 1; j <= h; ++j) rb.add_expr(Aw[n - h + j], Rat(cap));
        rb.rhs += Rat(cap);
        push_row(rb, "tail-family", "i=" + std::to_string(i));
      }
    }

    if (opts.weight_caps) {
      for (int w = 1; w <= n; ++w) {
        if (Aw[w].empty()) continue;
        RowBuilder rb(cls);
        rb.add_expr(Aw[w], 1);
        rb.rhs += Rat(ctx.cw_bound(n, d, w));
        push_row(rb, "weight-cap", "w=" + std::to_string(w));
      }
    }

    if (opts.pair_caps) {
      // Aggregate the model down to the unsplit shape and cap every coarse
      // pair variable by a doubly-bounded code count times its diagonal.
      const ProfileSet cps(SplitShape::single(n));
      std::vector<LinExpr> coarse(cps.size());
      for (int idx = 0; idx < P; ++idx) {
        const OrbitProfile& p = ps[idx];
        const ClassInfo& ci = cls.classes[cls.class_of_profile[idx]];
        if (ci.forced_zero) continue;
        const int a = p.sum_i(), b = p.sum_j(), c = p.sum_t();
        OrbitProfile cp;
        cp.i = {a};
        cp.j = {b};
        cp.t = {c};
        const int cidx = cps.index_of(cp);
        if (cidx < 0) throw std::logic_error("build_model: bad aggregate profile");
        Rat w = 1;
        for (int q = 0; q < m; ++q) {
          w *= Rat(multinom(shape.parts[q], p.i[q] - p.t[q], p.j[q] - p.t[q],
                            p.t[q]));
        }
        w /= Rat(multinom(n, a - c, b - c, c));
        if (ci.pinned)
          coarse[cidx].constant += w;
        else
          coarse[cidx].terms[ci.var] += w;
      }
      for (int cidx = 0; cidx < cps.size(); ++cidx) {
        const OrbitProfile& cp = cps[cidx];
        const int a = cp.i[0], b = cp.j[0], c = cp.t[0];
        if ((a == 0 && b == 0) || (b == 0 && c == 0)) continue;
        if (coarse[cidx].empty()) continue;
        const Int cap = ctx.dcw_bound(c, a, b - c, n - a, d);
        const Rat scale = Rat(cap) / Rat(binom(a, c) * binom(n - a, b - c));
        RowBuilder rb(cls);
        rb.add_expr(coarse[cidx], 1);
        if (a == 0) {
          rb.rhs += scale;  // the diagonal factor is the pinned x = 1
        } else {
          rb.add_expr(Aw[a], -scale / Rat(binom(n, a)));
        }
        push_row(rb, "pair-cap", cp.str());
      }
    }
  }

  model.bounds_used = ctx.used();
  return model;
}

std::vector<Rat> model_x_from_profiles(const SdpModel& model,
                                       const std::vector<Rat>& x_profiles) {
  if (static_cast<int>(x_profiles.size()) != model.ps.size())
    throw std::invalid_argument("model_x_from_profiles: size mismatch");
  std::vector<Rat> out(model.num_vars, 0);
  for (const ClassInfo& ci : model.cls.classes) {
    const Rat& v0 = x_profiles[ci.members.front()];
    for (int mem : ci.members) {
      if (x_profiles[mem] != v0)
        throw std::logic_error("value not constant on symmetry class " +
                               model.ps[ci.rep].str());
    }
    if (ci.pinned) {
      if (v0 != 1)
        throw std::logic_error("empty-pair value must equal 1");
    } else if (ci.forced_zero) {
      if (v0 != 0)
        throw std::logic_error("distance-forced value must vanish at " +
                               model.ps[ci.rep].str());
    } else {
      out[ci.var] = v0;
    }
  }
  return out;
}

namespace {

// Map each fine part to the coarse part it merges into; throws unless the
// coarse parts are exactly consecutive runs of the fine parts.
std::vector<int> nest_groups(const std::vector<int>& fp,
                             const std::vector<int>& cp) {
  std::vector<int> group_of(fp.size());
  std::size_t q = 0;
  int acc = 0;
  for (std::size_t p = 0; p < fp.size(); ++p) {
    if (q >= cp.size()) throw std::invalid_argument("aggregate: parts do not nest");
    group_of[p] = static_cast<int>(q);
    acc += fp[p];
    if (acc == cp[q]) {
      ++q;
      acc = 0;
    } else if (acc > cp[q]) {
      throw std::invalid_argument("aggregate: parts do not nest");
    }
  }
  if (q != cp.size() || acc != 0)
    throw std::invalid_argument("aggregate: parts do not nest");
  return group_of;
}

}  // namespace

std::vector<Rat> aggregate(const ProfileSet& fine, const std::vector<Rat>& x,
                           const ProfileSet& coarse) {
  const auto& fp = fine.shape().parts;
  const auto& cp = coarse.shape().parts;
  if (static_cast<int>(x.size()) != fine.size())
    throw std::invalid_argument("aggregate: value vector size mismatch");
  const std::vector<int> group_of = nest_groups(fp, cp);
  const int mC = static_cast<int>(cp.size());
  std::vector<Rat> out(coarse.size(), 0);
  std::vector<int> av(mC), bv(mC), cv(mC);
  for (int idx = 0; idx < fine.size(); ++idx) {
    if (x[idx] == 0) continue;
    const OrbitProfile& p = fine[idx];
    std::fill(av.begin(), av.end(), 0);
    std::fill(bv.begin(), bv.end(), 0);
    std::fill(cv.begin(), cv.end(), 0);
    Rat w = 1;
    for (std::size_t q = 0; q < fp.size(); ++q) {
      const int g = group_of[q];
      av[g] += p.i[q];
      bv[g] += p.j[q];
      cv[g] += p.t[q];
      w *= Rat(multinom(fp[q], p.i[q] - p.t[q], p.j[q] - p.t[q], p.t[q]));
    }
    for (int g = 0; g < mC; ++g)
      w /= Rat(multinom(cp[g], av[g] - cv[g], bv[g] - cv[g], cv[g]));
    const int cidx = coarse.index_of(av.data(), bv.data(), cv.data());
    if (cidx < 0) throw std::logic_error("aggregate: image profile not realizable");
    out[cidx] += w * x[idx];
  }
  return out;
}

std::vector<std::vector<int>> aggregation_fibers(const ProfileSet& fine,
                                                 const ProfileSet& coarse) {
  const auto& fp = fine.shape().parts;
  const auto& cp = coarse.shape().parts;
  const std::vector<int> group_of = nest_groups(fp, cp);
  const int mC = static_cast<int>(cp.size());
  std::vector<std::vector<int>> fibers(coarse.size());
  std::vector<int> av(mC), bv(mC), cv(mC);
  for (int idx = 0; idx < fine.size(); ++idx) {
    const OrbitProfile& p = fine[idx];
    std::fill(av.begin(), av.end(), 0);
    std::fill(bv.begin(), bv.end(), 0);
    std::fill(cv.begin(), cv.end(), 0);
    for (std::size_t q = 0; q < fp.size(); ++q) {
      const int g = group_of[q];
      av[g] += p.i[q];
      bv[g] += p.j[q];
      cv[g] += p.t[q];
    }
    const int cidx = coarse.index_of(av.data(), bv.data(), cv.data());
    if (cidx < 0) throw std::logic_error("aggregate: image profile not realizable");
    fibers[cidx].push_back(idx);
  }
  return fibers;
}

std::vector<Int> aggregate_lambda(const ProfileSet& fine,
                                  const std::vector<Int>& lam,
                                  const ProfileSet& coarse) {
  if (static_cast<int>(lam.size()) != fine.size())
    throw std::invalid_argument("aggregate_lambda: value vector size mismatch");
  const std::vector<std::vector<int>> fibers = aggregation_fibers(fine, coarse);
  std::vector<Int> out(coarse.size(), 0);
  for (int c = 0; c < coarse.size(); ++c)
    for (int idx : fibers[c]) out[c] += lam[idx];
  return out;
}

DistanceDistribution distance_distribution(const ProfileSet& ps,
                                           const std::vector<Rat>& x) {
  const SplitShape& shape = ps.shape();
  const int n = shape.n();
  const int m = shape.m();
  if (static_cast<int>(x.size()) != ps.size())
    throw std::invalid_argument("distance_distribution: size mismatch");
  DistanceDistribution dd;
  dd.by_weight.assign(n + 1, Rat(0));
  const std::vector<int> zz(m, 0);
  std::vector<int> iv(m, 0);
  while (true) {
    Int w = 1;
    int total = 0;
    for (int a = 0; a < m; ++a) {
      w *= binom(shape.parts[a], iv[a]);
      total += iv[a];
    }
    const int idx = ps.index_of(iv.data(), zz.data(), zz.data());
    if (idx < 0) throw std::logic_error("distance_distribution: missing profile");
    const Rat v = Rat(w) * x[idx];
    dd.by_ivec.emplace_back(iv, v);
    dd.by_weight[total] += v;
    int a = m - 1;
    while (a >= 0 && iv[a] == shape.parts[a]) iv[a--] = 0;
    if (a < 0) break;
    ++iv[a];
  }
  return dd;
}

std::vector<Rat> weight_distribution(const ProfileSet& ps,
                                     const std::vector<Rat>& x) {
  std::vector<Rat> out = distance_distribution(ps, x).by_weight;
  return out;
}

std::vector<Rat> delsarte_residuals(const ProfileSet& ps,
                                    const std::vector<Rat>& x) {
  const SplitShape& shape = ps.shape();
  const int m = shape.m();
  if (static_cast<int>(x.size()) != ps.size())
    throw std::invalid_argument("delsarte_residuals: size mismatch");

  // Per-part Krawtchouk tables kt[q][k][i].
  std::vector<std::vector<std::vector<Int>>> kt(m);
  for (int q = 0; q < m; ++q) {
    const int nq = shape.parts[q];
    kt[q].assign(nq + 1, std::vector<Int>(nq + 1));
    for (int k = 0; k <= nq; ++k)
      for (int i = 0; i <= nq; ++i) kt[q][k][i] = krawtchouk(k, nq, i);
  }

  // Distance distribution per weight vector, enumerated lexicographically
  // (first part slowest).
  int B = 1;
  for (int q = 0; q < m; ++q) B *= shape.parts[q] + 1;
  const std::vector<int> zz(m, 0);
  std::vector<std::vector<int>> vecs;
  vecs.reserve(B);
  {
    std::vector<int> iv(m, 0);
    while (true) {
      vecs.push_back(iv);
      int a = m - 1;
      while (a >= 0 && iv[a] == shape.parts[a]) iv[a--] = 0;
      if (a < 0) break;
      ++iv[a];
    }
  }
  std::vector<Rat> dist(B, 0);
  for (int e = 0; e < B; ++e) {
    Int w = 1;
    for (int q = 0; q < m; ++q) w *= binom(shape.parts[q], vecs[e][q]);
    const int idx = ps.index_of(vecs[e].data(), zz.data(), zz.data());
    if (idx < 0) throw std::logic_error("delsarte_residuals: missing profile");
    dist[e] = Rat(w) * x[idx];
  }

  std::vector<Rat> out(B, 0);
  for (int ep = 0; ep < B; ++ep) {
    Rat s = 0;
    for (int e = 0; e < B; ++e) {
      if (dist[e] == 0) continue;
      Int prod = 1;
      for (int q = 0; q < m; ++q) prod *= kt[q][vecs[ep][q]][vecs[e][q]];
      s += Rat(prod) * dist[e];
    }
    out[ep] = s;
  }
  return out;
}

std::string SdpModel::digest() const {
  Fnv1a f;
  const auto S = [&](const std::string& s) {
    f.feed(s);
    f.feed("\n");
  };
  S("shape " + shape.str());
  S("d " + std::to_string(d));
  for (const ClassInfo& ci : cls.classes) {
    std::string line = "class " + ps[ci.rep].str();
    line += " n=" + std::to_string(ci.members.size());
    if (ci.pinned) line += " pinned";
    if (ci.forced_zero) line += " zero";
    if (ci.var >= 0) line += " var=" + std::to_string(ci.var);
    S(line);
  }
  S("objconst " + rat_str(obj_const));
  for (int v = 0; v < num_vars; ++v) S("obj " + rat_str(obj[v]));
  for (const BlockForm& b : blocks) {
    S("block " + b.name + " size=" + std::to_string(b.size));
    for (int r = 0; r < b.size; ++r)
      S("denom " + b.row_denom[r].get_str());
    for (const auto& [r, c, v] : b.consts)
      S("const " + std::to_string(r) + "," + std::to_string(c) + " " +
        v.get_str());
    for (const BlockForm::Term& t : b.terms)
      S("term " + std::to_string(t.r) + "," + std::to_string(t.c) + "," +
        std::to_string(t.var) + " " + t.coeff.get_str());
  }
  for (const LinearConstraint& lc : linear) {
    std::string line = "row " + lc.family + "|" + lc.label + "|";
    for (const auto& [v, c] : lc.terms)
      line += std::to_string(v) + ":" + rat_str(c) + ";";
    line += "<=" + rat_str(lc.rhs);
    S(line);
  }
  return f.hex();
}

std::string SdpModel::manifest_json() const {
  nlohmann::ordered_json j;
  j["shape"] = shape.str();
  j["n"] = shape.n();
  j["d"] = d;
  j["profiles"] = ps.size();
  j["classes"] = cls.classes.size();
  int forced = 0;
  for (const ClassInfo& ci : cls.classes) forced += ci.forced_zero ? 1 : 0;
  j["forced_zero_classes"] = forced;
  j["variables"] = num_vars;
  j["objective_constant"] = rat_str(obj_const);
  j["blocks"] = nlohmann::ordered_json::array();
  for (const BlockForm& b : blocks) {
    j["blocks"].push_back({{"name", b.name},
                           {"size", b.size},
                           {"terms", b.terms.size()},
                           {"consts", b.consts.size()}});
  }
  j["linear_rows"] = linear.size();
  nlohmann::ordered_json fam = nlohmann::ordered_json::object();
  for (const LinearConstraint& lc : linear) {
    if (!fam.contains(lc.family)) fam[lc.family] = 0;
    fam[lc.family] = fam[lc.family].get<int>() + 1;
  }
  j["linear_families"] = fam;
  j["bounds_used"] = bounds_used;
  j["digest"] = digest();
  return j.dump(2);
}

}  // namespace splitsdp
