#include <splitsdp/oracle.hpp>

#include <splitsdp/bounds.hpp>

#include <algorithm>
#include <bit>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace splitsdp {

namespace {

// Bitmask of part p; coordinate 1 is the most significant of the n bits, so
// part masks read left to right like the printed codewords.
Word part_mask(const SplitShape& shape, int p) {
  int n = shape.n();
  int off = 0;
  for (int q = 0; q < p; ++q) off += shape.parts[q];
  int np = shape.parts[p];
  return ((Word(1) << np) - 1) << (n - off - np);
}

std::vector<Word> all_part_masks(const SplitShape& shape) {
  std::vector<Word> masks(shape.m());
  for (int p = 0; p < shape.m(); ++p) masks[p] = part_mask(shape, p);
  return masks;
}

}  // namespace

int part_popcount(const SplitShape& shape, Word w, int p) {
  return std::popcount(w & part_mask(shape, p));
}

CodeSample CodeSample::from_strings(const SplitShape& shape,
                                    const std::vector<std::string>& rows) {
  CodeSample c;
  c.shape = shape;
  int n = shape.n();
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("CodeSample: word '" + row + "' has wrong length");
    Word w = 0;
    for (char ch : row) {
      if (ch != '0' && ch != '1')
        throw std::invalid_argument("CodeSample: invalid character in word");
      w = (w << 1) | static_cast<Word>(ch - '0');
    }
    c.words.push_back(w);
  }
  std::sort(c.words.begin(), c.words.end());
  c.words.erase(std::unique(c.words.begin(), c.words.end()), c.words.end());
  return c;
}

CodeSample CodeSample::parse(const SplitShape& shape, const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    rows.push_back(line.substr(start));
  }
  return from_strings(shape, rows);
}

int CodeSample::min_distance() const {
  if (words.size() < 2) return shape.n() + 1;
  int best = shape.n() + 1;
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b)
      best = std::min(best, std::popcount(words[a] ^ words[b]));
  return best;
}

std::string CodeSample::str() const {
  std::ostringstream os;
  int n = shape.n();
  for (Word w : words) {
    for (int b = n - 1; b >= 0; --b) os << ((w >> b) & 1);
    os << '\n';
  }
  return os.str();
}

Eigen::MatrixXd dense_generator(const SplitShape& shape, const OrbitProfile& p) {
  int n = shape.n();
  if (n > 12) throw std::invalid_argument("dense_generator: n > 12");
  if (!profile_valid(shape, p)) throw std::invalid_argument("dense_generator: invalid profile");
  long size = 1L << n;
  auto masks = all_part_masks(shape);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size, size);
  for (long X = 0; X < size; ++X) {
    bool okX = true;
    for (int q = 0; q < shape.m() && okX; ++q)
      okX = std::popcount(static_cast<Word>(X) & masks[q]) == p.i[q];
    if (!okX) continue;
    for (long Y = 0; Y < size; ++Y) {
      bool ok = true;
      for (int q = 0; q < shape.m() && ok; ++q) {
        Word mask = masks[q];
        ok = std::popcount(static_cast<Word>(Y) & mask) == p.j[q] &&
             std::popcount(static_cast<Word>(X) & static_cast<Word>(Y) & mask) == p.t[q];
      }
      if (ok) M(X, Y) = 1.0;
    }
  }
  return M;
}

LambdaCounts lambda_counts(const ProfileSet& ps, const CodeSample& code) {
  const SplitShape& shape = ps.shape();
  int m = shape.m();
  auto masks = all_part_masks(shape);
  LambdaCounts lc;
  lc.ps = &ps;
  lc.counts.assign(ps.size(), Int(0));
  std::vector<int> iv(m), jv(m), tv(m);
  for (Word X : code.words)
    for (Word Y : code.words) {
      Word A = X ^ Y;
      for (int q = 0; q < m; ++q) iv[q] = std::popcount(A & masks[q]);
      for (Word Z : code.words) {
        Word B = X ^ Z;
        for (int q = 0; q < m; ++q) {
          jv[q] = std::popcount(B & masks[q]);
          tv[q] = std::popcount(A & B & masks[q]);
        }
        int idx = ps.index_of(iv.data(), jv.data(), tv.data());
        if (idx < 0) throw std::logic_error("lambda_counts: unindexed profile");
        ++lc.counts[idx];
      }
    }
  return lc;
}

std::vector<Rat> x_from_lambda(const LambdaCounts& lc, std::size_t code_size) {
  const ProfileSet& ps = *lc.ps;
  const SplitShape& shape = ps.shape();
  std::vector<Rat> x(ps.size());
  for (int idx = 0; idx < ps.size(); ++idx) {
    const OrbitProfile& p = ps[idx];
    Int denom(static_cast<long>(code_size));
    for (int q = 0; q < shape.m(); ++q)
      denom *= multinom(shape.parts[q], p.i[q] - p.t[q], p.j[q] - p.t[q], p.t[q]);
    if (denom == 0) {
      if (lc.counts[idx] != 0) throw std::logic_error("x_from_lambda: count on degenerate profile");
      x[idx] = Rat(0);
      continue;
    }
    x[idx] = Rat(lc.counts[idx]) / Rat(denom);
    x[idx].canonicalize();
  }
  return x;
}

MomentMatrices build_R_matrices(const ProfileSet& ps, const std::vector<Rat>& x,
                                std::size_t code_size) {
  const SplitShape& shape = ps.shape();
  int n = shape.n();
  if (n > 12) throw std::invalid_argument("build_R_matrices: n > 12");
  long size = 1L << n;
  auto masks = all_part_masks(shape);
  int m = shape.m();
  MomentMatrices mm;
  mm.R = Eigen::MatrixXd::Zero(size, size);
  bool full = (static_cast<long>(code_size) == size);
  if (!full) mm.Rprime = Eigen::MatrixXd::Zero(size, size);
  double prefactor =
      full ? 0.0
           : static_cast<double>(code_size) / (static_cast<double>(size) - code_size);
  std::vector<int> iv(m), jv(m), tv(m), dv(m), zv(m, 0);
  for (long X = 0; X < size; ++X)
    for (long Y = 0; Y < size; ++Y) {
      for (int q = 0; q < m; ++q) {
        Word mask = masks[q];
        iv[q] = std::popcount(static_cast<Word>(X) & mask);
        jv[q] = std::popcount(static_cast<Word>(Y) & mask);
        tv[q] = std::popcount(static_cast<Word>(X) & static_cast<Word>(Y) & mask);
        dv[q] = iv[q] + jv[q] - 2 * tv[q];
      }
      int idx = ps.index_of(iv.data(), jv.data(), tv.data());
      if (idx < 0) throw std::logic_error("build_R_matrices: unindexed profile");
      double xv = to_double(x[idx]);
      mm.R(X, Y) = xv;
      if (!full) {
        int didx = ps.index_of(dv.data(), zv.data(), zv.data());
        (*mm.Rprime)(X, Y) = prefactor * (to_double(x[didx]) - xv);
      }
    }
  return mm;
}

namespace {

// All coordinate permutations preserving the parts, as word-remap tables.
std::vector<std::vector<Word>> part_permutation_tables(const SplitShape& shape) {
  int n = shape.n();
  // Per-part permutations of the part's coordinate positions.
  std::vector<std::vector<std::vector<int>>> per_part;
  int off = 0;
  for (int p = 0; p < shape.m(); ++p) {
    int np = shape.parts[p];
    std::vector<int> positions(np);
    for (int q = 0; q < np; ++q) positions[q] = n - 1 - (off + q);  // bit indices
    std::vector<std::vector<int>> perms;
    std::vector<int> perm = positions;
    std::sort(perm.begin(), perm.end());
    do {
      perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    per_part.push_back(std::move(perms));
    off += np;
  }
  // Cartesian product over parts -> full coordinate maps src bit -> dst bit.
  std::vector<std::vector<Word>> tables;
  std::vector<std::size_t> cursor(shape.m(), 0);
  while (true) {
    std::vector<int> bitmap(n);
    int offp = 0;
    for (int p = 0; p < shape.m(); ++p) {
      int np = shape.parts[p];
      std::vector<int> sorted_positions(np);
      for (int q = 0; q < np; ++q) sorted_positions[q] = n - 1 - (offp + q);
      std::sort(sorted_positions.begin(), sorted_positions.end());
      const std::vector<int>& target = per_part[p][cursor[p]];
      for (int q = 0; q < np; ++q) bitmap[sorted_positions[q]] = target[q];
      offp += np;
    }
    std::vector<Word> table(1L << n);
    for (long w = 0; w < (1L << n); ++w) {
      Word out = 0;
      for (int b = 0; b < n; ++b)
        if ((w >> b) & 1) out |= Word(1) << bitmap[b];
      table[w] = out;
    }
    tables.push_back(std::move(table));
    int p = shape.m() - 1;
    while (p >= 0) {
      if (++cursor[p] < per_part[p].size()) break;
      cursor[p] = 0;
      --p;
    }
    if (p < 0) break;
  }
  return tables;
}

}  // namespace

MomentMatrices build_R_matrices_by_averaging(const SplitShape& shape,
                                             const CodeSample& code) {
  int n = shape.n();
  if (n > 6) throw std::invalid_argument("build_R_matrices_by_averaging: n > 6");
  long size = 1L << n;
  auto tables = part_permutation_tables(shape);
  MomentMatrices mm;
  mm.R = Eigen::MatrixXd::Zero(size, size);
  bool full = (code.words.size() == static_cast<std::size_t>(size));
  if (!full) mm.Rprime = Eigen::MatrixXd::Zero(size, size);
  long terms_R = 0, terms_Rp = 0;
  std::vector<char> in_image(size);
  std::vector<Word> image(code.words.size());
  for (const auto& table : tables) {
    std::fill(in_image.begin(), in_image.end(), 0);
    for (std::size_t a = 0; a < code.words.size(); ++a) {
      image[a] = table[code.words[a]];
      in_image[image[a]] = 1;
    }
    for (long v = 0; v < size; ++v) {
      // Translated image sigma(C) xor v contains the empty set iff v lies in
      // sigma(C).
      Eigen::MatrixXd& target = in_image[v] ? mm.R : (full ? mm.R : *mm.Rprime);
      if (!in_image[v] && full) continue;
      if (in_image[v]) ++terms_R; else ++terms_Rp;
      for (Word a : image)
        for (Word b : image) target(a ^ v, b ^ v) += 1.0;
    }
  }
  mm.R /= static_cast<double>(terms_R);
  if (!full) *mm.Rprime /= static_cast<double>(terms_Rp);
  return mm;
}

// ---------------------------------------------------------------------------
// Maximum clique (bitset branch and bound with greedy coloring).

namespace {

struct BitGraph {
  int nv = 0;
  int nw = 0;
  std::vector<std::uint64_t> adj;  // nv rows of nw words

  void init(int vertices) {
    nv = vertices;
    nw = (vertices + 63) / 64;
    adj.assign(static_cast<std::size_t>(nv) * nw, 0);
  }
  void add_edge(int a, int b) {
    adj[static_cast<std::size_t>(a) * nw + b / 64] |= 1ULL << (b % 64);
    adj[static_cast<std::size_t>(b) * nw + a / 64] |= 1ULL << (a % 64);
  }
  const std::uint64_t* row(int v) const { return &adj[static_cast<std::size_t>(v) * nw]; }
};

// Suffix-table branch and bound with greedy-coloring and weight-layer
// prunes.  Vertices are processed last-to-first at the top level, recording
// c[i] = the exact clique number of the suffix {i, .., nv-1}; candidate
// sets always live inside a suffix, so size + c[min] <= best cuts deep.
struct CliqueSearch {
  const BitGraph* g;
  std::vector<int> c;  // exact per-suffix clique numbers, filled downward
  std::vector<int> best;
  std::vector<int> cur;
  int max = 0;
  int stop_at = std::numeric_limits<int>::max();  // abort once max reaches this
  bool done = false;
  // Optional per-vertex weight layers with clique caps per layer
  // (e.g. a distance-d code holds at most A(n,d,w) words of weight w).
  std::vector<std::vector<std::uint64_t>> layer_mask;
  std::vector<int> layer_cap;
  std::vector<int> layer_of;    // vertex -> layer index
  std::vector<int> layer_used;  // slots consumed by the current clique

  struct Scratch {
    std::vector<std::uint64_t> next, rest, cls;
    std::vector<int> order, color;
  };
  std::vector<Scratch> scratch;  // per depth

  static void clear(std::uint64_t* s, int v) { s[v / 64] &= ~(1ULL << (v % 64)); }

  int count(const std::uint64_t* s) const {
    int k = 0;
    for (int w = 0; w < g->nw; ++w) k += std::popcount(s[w]);
    return k;
  }
  int first(const std::uint64_t* s) const {
    for (int w = 0; w < g->nw; ++w)
      if (s[w]) return w * 64 + std::countr_zero(s[w]);
    return -1;
  }

  int layer_bound(const std::uint64_t* U) const {
    int bound = 0;
    for (std::size_t l = 0; l < layer_mask.size(); ++l) {
      int in_layer = 0;
      for (int w = 0; w < g->nw; ++w)
        in_layer += std::popcount(U[w] & layer_mask[l][w]);
      bound += std::min(in_layer, layer_cap[l] - layer_used[l]);
    }
    return bound;
  }

  // The candidate set U is owned by this depth and consumed destructively;
  // the caller rebuilds it per branch.  Returns true on improvement: the
  // current root is then already optimal for its suffix, so unwind.
  bool expand(std::uint64_t* U, int depth) {
    if (done) return true;
    int pending = count(U);
    const int size = static_cast<int>(cur.size());
    if (pending == 0) {
      if (size > max) {
        max = size;
        best = cur;
        if (max >= stop_at) done = true;
        return true;
      }
      return false;
    }
    if (size + pending <= max) return false;
    const int at = first(U);
    if (size + c[at] <= max) return false;  // U lives inside the suffix of at
    if (!layer_mask.empty() && size + layer_bound(U) <= max) return false;
    Scratch& s = scratch[depth];  // preallocated: depth < nv
    // Greedy coloring of U, emitted class by class: color[idx] bounds any
    // clique inside {order[0..idx]}, so the descending scan prunes per vertex.
    s.order.clear();
    s.color.clear();
    s.rest.assign(U, U + g->nw);
    s.cls.resize(g->nw);
    for (int colors = 1; ; ++colors) {
      int v = first(s.rest.data());
      if (v < 0) break;
      std::copy(s.rest.begin(), s.rest.end(), s.cls.begin());
      while (v >= 0) {
        s.order.push_back(v);
        s.color.push_back(colors);
        clear(s.rest.data(), v);
        clear(s.cls.data(), v);
        const std::uint64_t* nb = g->row(v);
        for (int w = 0; w < g->nw; ++w) s.cls[w] &= ~nb[w];
        v = first(s.cls.data());
      }
    }
    s.next.resize(g->nw);
    std::uint64_t* newU = s.next.data();
    for (int idx = static_cast<int>(s.order.size()) - 1; idx >= 0; --idx) {
      if (size + s.color[idx] <= max) return false;
      const int v = s.order[idx];
      const std::uint64_t* nb = g->row(v);
      for (int w = 0; w < g->nw; ++w) newU[w] = U[w] & nb[w];
      cur.push_back(v);
      if (!layer_mask.empty()) ++layer_used[layer_of[v]];
      const bool improved = expand(newU, depth + 1);
      if (!layer_mask.empty()) --layer_used[layer_of[v]];
      cur.pop_back();
      if (improved) return true;
      clear(U, v);
    }
    return false;
  }
};

// Weight layering of the vertex set: per-layer vertex masks plus caps on
// how many clique members a layer admits.
struct LayerInfo {
  std::vector<std::vector<std::uint64_t>> mask;
  std::vector<int> cap;
  std::vector<int> of;  // vertex -> layer index
};

std::vector<int> max_clique(const BitGraph& g, int lower_hint = 0,
                            const LayerInfo* layers = nullptr,
                            int stop_at = std::numeric_limits<int>::max()) {
  // Seeding max with the hint is sound: prunes only discard extensions that
  // cannot beat it, and the suffix records stay >= the true suffix values.
  // A finite stop_at turns the search into find-only: it aborts as soon as
  // a clique that large is found (callers pass an externally proven cap).
  CliqueSearch s;
  s.g = &g;
  s.max = lower_hint;
  s.stop_at = stop_at;
  s.c.assign(g.nv + 1, 0);
  s.scratch.resize(g.nv + 1);
  if (layers) {
    s.layer_mask = layers->mask;
    s.layer_cap = layers->cap;
    s.layer_of = layers->of;
    s.layer_used.assign(layers->cap.size(), 0);
  }
  std::vector<std::uint64_t> root(g.nw, 0);
  for (int i = g.nv - 1; i >= 0 && !s.done; --i) {
    const std::uint64_t* nb = g.row(i);
    // candidates: neighbors of i within the suffix {i+1, ...}
    for (int w = 0; w < g.nw; ++w) root[w] = nb[w];
    for (int v = 0; v <= i; ++v) CliqueSearch::clear(root.data(), v);
    s.cur.assign(1, i);
    if (layers) ++s.layer_used[s.layer_of[i]];
    s.expand(root.data(), 0);
    if (layers) --s.layer_used[s.layer_of[i]];
    s.cur.clear();
    s.c[i] = s.max;
  }
  if (static_cast<int>(s.best.size()) <= lower_hint) return {};
  return s.best;
}

// Greedy clique for an initial lower bound.
std::vector<int> greedy_clique(const std::vector<Word>& verts, int d) {
  std::vector<int> picked;
  for (std::size_t v = 0; v < verts.size(); ++v) {
    bool ok = true;
    for (int u : picked)
      if (std::popcount(verts[v] ^ verts[u]) < d) { ok = false; break; }
    if (ok) picked.push_back(static_cast<int>(v));
  }
  return picked;
}

struct ExactAResult {
  int size;
  std::vector<Word> words;
};

// Fixed-size annealing: hunt for `target` words (the zero word plus
// target-1 candidates) by Metropolis descent on the number of pairs closer
// than d.  Zero energy is a valid code by construction.  Returns success.
bool anneal_code(const std::vector<Word>& cand, int d, int target,
                 std::mt19937& rng, std::vector<Word>& out) {
  const int m = target - 1;
  if (m <= 0 || m > static_cast<int>(cand.size())) return false;
  std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
  std::uniform_int_distribution<int> slot(0, m - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Word> w(m);
  std::vector<int> conf(m);
  std::vector<char> was(m), now(m);
  for (int restart = 0; restart < 3; ++restart) {
    for (int i = 0; i < m; ++i) w[i] = cand[pick(rng)];
    conf.assign(m, 0);
    long energy = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (std::popcount(w[i] ^ w[j]) < d) {
          ++conf[i];
          ++conf[j];
          ++energy;
        }
    double temp = 1.0;
    for (long it = 0; it < 1500000 && energy > 0; ++it) {
      int i = slot(rng);
      for (int scan = 0; conf[i] == 0 && scan < m; ++scan) i = (i + 1) % m;
      const Word old = w[i];
      const Word repl = cand[pick(rng)];
      if (repl == old) continue;
      int delta = 0;
      for (int j = 0; j < m; ++j) {
        if (j == i) {
          was[j] = now[j] = 0;
          continue;
        }
        was[j] = std::popcount(old ^ w[j]) < d;
        now[j] = std::popcount(repl ^ w[j]) < d;
        delta += now[j] - was[j];
      }
      if (delta > 0 && unit(rng) >= std::exp(-delta / temp)) {
        temp = std::max(0.05, temp * 0.999995);
        continue;
      }
      int ci = 0;
      for (int j = 0; j < m; ++j) {
        conf[j] += now[j] - was[j];
        ci += now[j];
      }
      conf[i] = ci;
      w[i] = repl;
      energy += delta;
      temp = std::max(0.05, temp * 0.999995);
    }
    if (energy == 0) {
      out.clear();
      out.push_back(0);
      out.insert(out.end(), w.begin(), w.end());
      return true;
    }
  }
  return false;
}

ExactAResult exact_A_impl(int n, int d, int limit) {
  if (n < 1) throw std::invalid_argument("exact_A: n < 1");
  if (n > limit) throw std::invalid_argument("exact_A: n exceeds configured ceiling");
  if (d < 1) throw std::invalid_argument("exact_A: d < 1");
  if (d > n) {
    // Two distinct words differ in at most n coordinates, except the
    // complementary pair at distance exactly n.
    return {1, {0}};
  }
  if (d == 1) {
    std::vector<Word> all(1U << n);
    for (Word w = 0; w < (Word(1) << n); ++w) all[w] = w;
    return {1 << n, all};
  }
  // A distance-2e optimum may be assumed to lie in the even-weight words and
  // to contain the zero word (parity extension + translation invariance).
  bool even_only = (d % 2 == 0);
  std::vector<Word> cand;  // candidates for the remaining words
  for (Word w = 1; w < (Word(1) << n); ++w) {
    if (even_only && (std::popcount(w) % 2)) continue;
    if (std::popcount(w) < d) continue;
    cand.push_back(w);
  }
  if (cand.empty()) return {1, {0}};

  // Deleting a coordinate splits any code by the deleted bit into two codes
  // one symbol shorter, so A(n, d) <= 2 A(n-1, d).  The recursive optimum
  // both caps the search (find-only once the cap is met) and feeds the
  // doubling construction below.
  const ExactAResult shorter = exact_A_impl(n - 1, d, limit);
  const int upper = 2 * shorter.size;

  // Greedy lower bound: one weight-sorted pass plus fixed-seed shuffled
  // restarts.  A strong start keeps the exact search in pruning mode.
  std::vector<Word> sorted = cand;
  std::sort(sorted.begin(), sorted.end(), [](Word a, Word b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  ExactAResult best;
  best.size = 0;
  std::mt19937 greedy_rng(0x5eedc0de);
  std::vector<Word> order = sorted;
  for (int pass = 0; pass < 50 && best.size < upper; ++pass) {
    if (pass > 0) std::shuffle(order.begin(), order.end(), greedy_rng);
    const std::vector<int> picked = greedy_clique(order, d);
    if (static_cast<int>(picked.size()) + 1 > best.size) {
      best.size = static_cast<int>(picked.size()) + 1;
      best.words = {0};
      for (int v : picked) best.words.push_back(order[v]);
    }
  }

  // Refill local search: eject a couple of random words, then greedily
  // repack from a fresh shuffle.  Cheap and often lifts the greedy plateau.
  {
    std::vector<Word> code(best.words.begin() + 1, best.words.end());
    std::vector<Word> pool = sorted;
    for (int round = 0; round < 1500 && best.size < upper; ++round) {
      std::vector<Word> trial = code;
      const int eject = 1 + static_cast<int>(round % 2);
      for (int e = 0; e < eject && !trial.empty(); ++e)
        trial.erase(trial.begin() + greedy_rng() % trial.size());
      std::shuffle(pool.begin(), pool.end(), greedy_rng);
      for (Word v : pool) {
        bool ok = true;
        for (Word u : trial)
          if (u == v || std::popcount(u ^ v) < d) { ok = false; break; }
        if (ok) trial.push_back(v);
      }
      if (trial.size() >= code.size()) code.swap(trial);  // accept ties: drift
      if (static_cast<int>(code.size()) + 1 > best.size) {
        best.size = static_cast<int>(code.size()) + 1;
        best.words = {0};
        for (Word v : code) best.words.push_back(v);
      }
    }
  }

  // Doubling attempt: pair the shorter optimum against a permuted translate
  // of itself on a fresh coordinate.  Words (c, 0) and (c', 1) end up at
  // distance d whenever the short-space pair is at distance >= d-1, so a
  // translate clearing d-1 from every pairwise difference meets the halving
  // cap exactly.
  if (best.size < upper && n - 1 <= 20) {
    const std::vector<Word>& base = shorter.words;
    std::vector<int> perm(n - 1);
    for (int i = 0; i < n - 1; ++i) perm[i] = i;
    std::mt19937 pair_rng(0xd0b1e5);
    std::vector<Word> moved(base.size());
    for (int attempt = 0; attempt < 200 && best.size < upper; ++attempt) {
      if (attempt > 0) std::shuffle(perm.begin(), perm.end(), pair_rng);
      for (std::size_t i = 0; i < base.size(); ++i) {
        Word m = 0;
        for (int b = 0; b < n - 1; ++b)
          if (base[i] >> b & 1) m |= Word(1) << perm[b];
        moved[i] = m;
      }
      for (Word t = 0; t < (Word(1) << (n - 1)); ++t) {
        bool ok = true;
        for (Word c : base) {
          for (Word m : moved)
            if (std::popcount(c ^ m ^ t) < d - 1) { ok = false; break; }
          if (!ok) break;
        }
        if (!ok) continue;
        ExactAResult doubled;
        doubled.size = upper;
        for (Word c : base) doubled.words.push_back(c);
        for (Word m : moved)
          doubled.words.push_back((m ^ t) | Word(1) << (n - 1));
        CodeSample sample{SplitShape::single(n), doubled.words};
        if (sample.min_distance() >= d) {  // belt and braces
          best = doubled;
          break;
        }
      }
    }
  }

  // Annealing escalation: on larger instances, hunt for one-more-word codes
  // before paying for the exact search.  Each hit re-seeds the escalation;
  // the first miss leaves the bound to the branch and bound below.
  if (cand.size() > 200) {
    std::mt19937 anneal_rng(0xa22ea1);
    std::vector<Word> found;
    while (best.size < upper &&
           anneal_code(cand, d, best.size + 1, anneal_rng, found)) {
      best.size += 1;
      best.words = found;
    }
  }

  if (best.size >= upper) {
    std::sort(best.words.begin(), best.words.end());
    return best;
  }

  // Per-weight caps: a distance-d code holds at most A(n, d, w) words of
  // weight w.  The analytic constant-weight bound (with its complement-
  // weight twin) is sound and instant; exactness is not required here.
  std::vector<int> cw_cap(n + 1, 0);
  {
    BoundContext caps(nullptr);
    for (Word v : cand) {
      const int w = std::popcount(v);
      if (!cw_cap[w]) {
        Int cap = caps.cw_bound(n, d, w);
        Int twin = caps.cw_bound(n, d, n - w);
        if (twin < cap) cap = twin;
        cw_cap[w] = static_cast<int>(cap.get_si());
      }
    }
  }

  // Sort candidates weight-major once; the filters below preserve order and
  // the clique engine wants that order for its coloring.
  std::sort(cand.begin(), cand.end(), [](Word a, Word b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });

  // Canonical-prefix search.  The coordinate permutations fixing every word
  // chosen so far form a product of symmetric groups on the blocks of
  // coordinates the prefix leaves indistinguishable.  Relative to the
  // prefix, any further code word is therefore equivalent to the
  // representative that packs its overlap with each block into the block's
  // leading bits, so enumerating block profiles covers every extension;
  // a code reachable through several profiles costs repeated work, never
  // the optimum.  Blocks split as words are chosen; once the prefix is deep
  // or the candidate set small, the clique engine finishes the branch.
  struct PrefixSearch {
    int n;
    int d;
    bool even_only;
    int stop_size;  // externally proven cap: reaching it ends the search
    const std::vector<int>& cw_cap;
    ExactAResult& best;

    int weight_slack(const std::vector<Word>& chosen,
                     const std::vector<Word>& sub) const {
      std::vector<int> in_layer(n + 1, 0), used(n + 1, 0);
      for (Word v : sub) ++in_layer[std::popcount(v)];
      for (Word c : chosen) ++used[std::popcount(c)];
      int bound = 0;
      for (int w = 0; w <= n; ++w)
        if (in_layer[w]) bound += std::min(in_layer[w], cw_cap[w] - used[w]);
      return bound;
    }

    void leaf(const std::vector<Word>& chosen, const std::vector<Word>& sub) {
      BitGraph g;
      g.init(static_cast<int>(sub.size()));
      for (int a = 0; a < g.nv; ++a)
        for (int b = a + 1; b < g.nv; ++b)
          if (std::popcount(sub[a] ^ sub[b]) >= d) g.add_edge(a, b);
      LayerInfo layers;
      layers.of.resize(sub.size());
      std::vector<int> layer_at(n + 1, -1), used(n + 1, 0);
      for (Word c : chosen) ++used[std::popcount(c)];
      for (std::size_t v = 0; v < sub.size(); ++v) {
        const int w = std::popcount(sub[v]);
        if (layer_at[w] < 0) {
          layer_at[w] = static_cast<int>(layers.cap.size());
          // prefix words already occupy slots of their weight class
          layers.cap.push_back(cw_cap[w] - used[w]);
          layers.mask.emplace_back(g.nw, 0);
        }
        layers.of[v] = layer_at[w];
        layers.mask[layer_at[w]][v / 64] |= 1ULL << (v % 64);
      }
      const int have = static_cast<int>(chosen.size());
      std::vector<int> clique =
          max_clique(g, std::max(0, best.size - have), &layers, stop_size - have);
      if (static_cast<int>(clique.size()) + have > best.size) {
        best.size = static_cast<int>(clique.size()) + have;
        best.words = chosen;
        for (int v : clique) best.words.push_back(sub[v]);
      }
    }

    void run(std::vector<Word>& chosen,
             const std::vector<std::vector<int>>& blocks,
             const std::vector<Word>& sub) {
      if (best.size >= stop_size) return;
      const int have = static_cast<int>(chosen.size());
      if (have > best.size) {
        best.size = have;
        best.words = chosen;
      }
      if (sub.empty()) return;
      if (have + static_cast<int>(sub.size()) <= best.size) return;
      if (have + weight_slack(chosen, sub) <= best.size) return;
      if (have >= 4 || sub.size() <= 128) {
        leaf(chosen, sub);
        return;
      }
      std::vector<int> take(blocks.size(), 0);
      for (;;) {
        // next block profile (odometer over 0..|block| per block)
        std::size_t q = 0;
        while (q < take.size()) {
          if (take[q] < static_cast<int>(blocks[q].size())) {
            ++take[q];
            break;
          }
          take[q] = 0;
          ++q;
        }
        if (q == take.size()) break;
        Word rep = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b)
          for (int i = 0; i < take[b]; ++i) rep |= Word(1) << blocks[b][i];
        const int wt = std::popcount(rep);
        if (wt < d || (even_only && wt % 2)) continue;
        bool ok = true;
        for (Word c : chosen)
          if (std::popcount(rep ^ c) < d) { ok = false; break; }
        if (!ok) continue;
        std::vector<Word> next_sub;
        next_sub.reserve(sub.size());
        for (Word v : sub)
          if (v != rep && std::popcount(v ^ rep) >= d) next_sub.push_back(v);
        std::vector<std::vector<int>> next_blocks;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          const int t = take[b], len = static_cast<int>(blocks[b].size());
          if (t == 0 || t == len) {
            next_blocks.push_back(blocks[b]);
            continue;
          }
          next_blocks.emplace_back(blocks[b].begin(), blocks[b].begin() + t);
          next_blocks.emplace_back(blocks[b].begin() + t, blocks[b].end());
        }
        chosen.push_back(rep);
        run(chosen, next_blocks, next_sub);
        chosen.pop_back();
      }
    }
  };

  PrefixSearch search{n, d, even_only, upper, cw_cap, best};
  std::vector<Word> chosen = {0};
  std::vector<std::vector<int>> blocks(1);
  for (int i = n - 1; i >= 0; --i) blocks[0].push_back(i);
  search.run(chosen, blocks, cand);
  std::sort(best.words.begin(), best.words.end());
  return best;
}

}  // namespace

int exact_A(int n, int d, int limit) { return exact_A_impl(n, d, limit).size; }

std::vector<Word> exact_A_code(int n, int d, int limit) {
  return exact_A_impl(n, d, limit).words;
}

int exact_A_cw(int n, int d, int w) {
  if (n < 0 || w < 0 || w > n) throw std::invalid_argument("exact_A_cw: bad (n, w)");
  std::vector<Word> verts;
  for (Word v = 0; v < (Word(1) << n); ++v)
    if (std::popcount(v) == w) verts.push_back(v);
  if (verts.empty()) return 0;
  if (d <= 2) return static_cast<int>(verts.size());
  BitGraph g;
  g.init(static_cast<int>(verts.size()));
  for (int a = 0; a < g.nv; ++a)
    for (int b = a + 1; b < g.nv; ++b)
      if (std::popcount(verts[a] ^ verts[b]) >= d) g.add_edge(a, b);
  std::vector<int> clique = max_clique(g);
  return static_cast<int>(clique.size());
}

// ---------------------------------------------------------------------------
// Exact rational LP (two-phase primal simplex, Bland's rule).

namespace {

struct Tableau {
  // max c.v  s.t.  A v <= b, v >= 0, solved on the dictionary
  // basis[i] = variable index of row i; columns 0..nv-1 structural,
  // nv..nv+nc-1 slack, then artificials during phase 1.
  int rows, cols;
  std::vector<std::vector<Rat>> a;  // rows x cols
  std::vector<Rat> rhs;
  std::vector<Rat> obj;  // reduced objective row (maximization)
  Rat obj_const;
  std::vector<int> basis;

  void pivot(int pr, int pc) {
    Rat piv = a[pr][pc];
    for (int c = 0; c < cols; ++c) a[pr][c] /= piv;
    rhs[pr] /= piv;
    for (int r = 0; r < rows; ++r) {
      if (r == pr || a[r][pc] == 0) continue;
      Rat f = a[r][pc];
      for (int c = 0; c < cols; ++c) a[r][c] -= f * a[pr][c];
      rhs[r] -= f * rhs[pr];
    }
    if (obj[pc] != 0) {
      Rat f = obj[pc];
      for (int c = 0; c < cols; ++c) obj[c] -= f * a[pr][c];
      obj_const += f * rhs[pr];
    }
    basis[pr] = pc;
  }

  // Returns false when unbounded.
  bool run() {
    while (true) {
      int pc = -1;
      for (int c = 0; c < cols; ++c)
        if (obj[c] > 0) { pc = c; break; }  // Bland: smallest index
      if (pc < 0) return true;
      int pr = -1;
      Rat best_ratio;
      for (int r = 0; r < rows; ++r) {
        if (a[r][pc] <= 0) continue;
        Rat ratio = rhs[r] / a[r][pc];
        if (pr < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[pr])) {
          pr = r;
          best_ratio = ratio;
        }
      }
      if (pr < 0) return false;
      pivot(pr, pc);
    }
  }
};

}  // namespace

std::optional<Rat> rational_lp_max(const std::vector<std::vector<Rat>>& A,
                                   const std::vector<Rat>& b,
                                   const std::vector<Rat>& c) {
  int nc = static_cast<int>(A.size());
  int nv = static_cast<int>(c.size());
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != nv)
      throw std::invalid_argument("rational_lp_max: ragged constraint matrix");

  bool need_phase1 = false;
  for (const Rat& bi : b)
    if (bi < 0) need_phase1 = true;

  Tableau t;
  t.rows = nc;
  t.cols = nv + nc + (need_phase1 ? nc : 0);
  t.a.assign(nc, std::vector<Rat>(t.cols, Rat(0)));
  t.rhs = b;
  t.basis.resize(nc);
  for (int r = 0; r < nc; ++r) {
    for (int v = 0; v < nv; ++v) t.a[r][v] = A[r][v];
    t.a[r][nv + r] = 1;
    t.basis[r] = nv + r;
    if (t.rhs[r] < 0) {
      // Flip the row and give it an artificial basic variable.
      for (int cidx = 0; cidx < t.cols; ++cidx) t.a[r][cidx] = -t.a[r][cidx];
      t.rhs[r] = -t.rhs[r];
    }
  }
  if (need_phase1) {
    int art0 = nv + nc;
    int next_art = art0;
    for (int r = 0; r < nc; ++r) {
      if (t.basis[r] == nv + r && t.a[r][nv + r] == 1) continue;  // slack still basic
      t.a[r][next_art] = 1;
      t.basis[r] = next_art;
      ++next_art;
    }
    // Phase 1: maximize -sum(artificials).
    t.obj.assign(t.cols, Rat(0));
    t.obj_const = 0;
    for (int r = 0; r < nc; ++r) {
      if (t.basis[r] < art0) continue;
      for (int cidx = 0; cidx < t.cols; ++cidx) t.obj[cidx] += t.a[r][cidx];
      t.obj_const -= t.rhs[r];
    }
    for (int cidx = art0; cidx < t.cols; ++cidx) t.obj[cidx] = 0;
    // obj currently = sum over artificial rows of the row expression; the
    // phase-1 objective is its negation's maximization: max (obj_const +
    // sum a) is encoded by maximizing the positive row entries.
    if (!t.run()) throw std::logic_error("rational_lp_max: phase 1 unbounded");
    if (t.obj_const != 0) throw std::invalid_argument("rational_lp_max: infeasible");
    // Drive any artificial out of the basis, then drop artificial columns.
    for (int r = 0; r < nc; ++r) {
      if (t.basis[r] < art0) continue;
      int pc = -1;
      for (int cidx = 0; cidx < art0 && pc < 0; ++cidx)
        if (t.a[r][cidx] != 0) pc = cidx;
      if (pc >= 0) t.pivot(r, pc);
      // A fully-zero row is redundant; leave the artificial at value zero.
    }
    t.cols = art0;
    for (auto& row : t.a) row.resize(t.cols);
  }

  // Phase 2 objective expressed over the current basis.
  t.obj.assign(t.cols, Rat(0));
  t.obj_const = 0;
  for (int v = 0; v < nv; ++v) t.obj[v] = c[v];
  for (int r = 0; r < nc; ++r) {
    int bv = t.basis[r];
    if (bv < t.cols && t.obj[bv] != 0) {
      Rat f = t.obj[bv];
      for (int cidx = 0; cidx < t.cols; ++cidx) t.obj[cidx] -= f * t.a[r][cidx];
      t.obj_const += f * t.rhs[r];
    }
  }
  if (!t.run()) return std::nullopt;
  return t.obj_const;
}

Rat delsarte_lp_value(int n, int d) {
  if (n < 1 || n > 20) throw std::invalid_argument("delsarte_lp_value: n out of range");
  if (d < 1) throw std::invalid_argument("delsarte_lp_value: d < 1");
  if (d > n) return Rat(1);
  int nv = n - d + 1;  // A_d .. A_n
  std::vector<std::vector<Rat>> A(n + 1, std::vector<Rat>(nv));
  std::vector<Rat> b(n + 1), c(nv, Rat(1));
  for (int k = 0; k <= n; ++k) {
    for (int jj = d; jj <= n; ++jj) A[k][jj - d] = Rat(-krawtchouk(k, n, jj));
    b[k] = Rat(binom(n, k));
  }
  auto opt = rational_lp_max(A, b, c);
  if (!opt) throw std::logic_error("delsarte_lp_value: unbounded");
  return Rat(1) + *opt;
}

CodeSample random_code(const SplitShape& shape, int d, std::mt19937& rng,
                       int max_words) {
  int n = shape.n();
  if (n > 16) throw std::invalid_argument("random_code: n > 16");
  std::vector<Word> order(1U << n);
  for (Word w = 0; w < (Word(1) << n); ++w) order[w] = w;
  std::shuffle(order.begin(), order.end(), rng);
  CodeSample c;
  c.shape = shape;
  for (Word w : order) {
    bool ok = true;
    for (Word u : c.words)
      if (std::popcount(w ^ u) < d) { ok = false; break; }
    if (!ok) continue;
    c.words.push_back(w);
    if (max_words > 0 && static_cast<int>(c.words.size()) >= max_words) break;
  }
  std::sort(c.words.begin(), c.words.end());
  return c;
}

std::vector<Word> extended_hamming8() {
  // Span of the [7,4] Hamming generator rows, each extended by overall parity.
  const Word gens7[4] = {0b1000011, 0b0100101, 0b0010110, 0b0001111};
  std::vector<Word> words;
  for (int mask = 0; mask < 16; ++mask) {
    Word w7 = 0;
    for (int g = 0; g < 4; ++g)
      if ((mask >> g) & 1) w7 ^= gens7[g];
    Word w8 = (w7 << 1) | (std::popcount(w7) & 1);
    words.push_back(w8);
  }
  std::sort(words.begin(), words.end());
  return words;
}

}  // namespace splitsdp
