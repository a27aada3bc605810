#include <splitsdp/algebra.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace splitsdp {

int SplitShape::n() const { return std::accumulate(parts.begin(), parts.end(), 0); }

bool SplitShape::valid() const {
  if (parts.empty()) return false;
  for (int p : parts)
    if (p < 1) return false;
  return true;
}

std::string SplitShape::str() const {
  std::ostringstream os;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (p) os << ',';
    os << parts[p];
  }
  return os.str();
}

SplitShape parse_shape(const std::string& s) {
  SplitShape shape;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("parse_shape: empty part in '" + s + "'");
    shape.parts.push_back(std::stoi(tok));
  }
  if (!shape.valid()) throw std::invalid_argument("parse_shape: invalid shape '" + s + "'");
  return shape;
}

int OrbitProfile::sum_i() const { return std::accumulate(i.begin(), i.end(), 0); }
int OrbitProfile::sum_j() const { return std::accumulate(j.begin(), j.end(), 0); }
int OrbitProfile::sum_t() const { return std::accumulate(t.begin(), t.end(), 0); }

std::vector<int> OrbitProfile::dist_vec() const {
  std::vector<int> d(i.size());
  for (std::size_t p = 0; p < i.size(); ++p) d[p] = i[p] + j[p] - 2 * t[p];
  return d;
}

bool OrbitProfile::operator<(const OrbitProfile& o) const {
  if (i != o.i) return i < o.i;
  if (j != o.j) return j < o.j;
  return t < o.t;
}

std::string OrbitProfile::str() const {
  auto vec = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t p = 0; p < v.size(); ++p) {
      if (p) s += ',';
      s += std::to_string(v[p]);
    }
    return s;
  };
  return "(" + vec(i) + ";" + vec(j) + ";" + vec(t) + ")";
}

bool profile_valid(const SplitShape& shape, const OrbitProfile& p) {
  std::size_t m = shape.parts.size();
  if (p.i.size() != m || p.j.size() != m || p.t.size() != m) return false;
  for (std::size_t q = 0; q < m; ++q) {
    int n = shape.parts[q], i = p.i[q], j = p.j[q], t = p.t[q];
    if (i < 0 || j < 0 || t < 0) return false;
    if (i > n || j > n) return false;
    if (t > std::min(i, j)) return false;
    if (i + j - t > n) return false;  // the union of X and Y must fit in the part
  }
  return true;
}

ProfileSet::ProfileSet(const SplitShape& shape) : shape_(shape) {
  if (!shape.valid()) throw std::invalid_argument("ProfileSet: invalid shape");
  int m = shape.m();
  // Per-part valid triples in the local lex order (i, j, t).
  std::vector<std::vector<std::array<int, 3>>> locals(m);
  part_code_stride_.resize(m);
  part_local_.resize(m);
  local_count_.resize(m);
  for (int p = 0; p < m; ++p) {
    int n = shape.parts[p];
    int s = n + 1;
    part_code_stride_[p] = s;
    part_local_[p].assign(static_cast<std::size_t>(s) * s * s, -1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        for (int t = 0; t <= std::min(i, j); ++t) {
          if (i + j - t > n) continue;
          part_local_[p][(static_cast<std::size_t>(i) * s + j) * s + t] =
              static_cast<int>(locals[p].size());
          locals[p].push_back({i, j, t});
        }
    local_count_[p] = static_cast<int>(locals[p].size());
  }
  mixed_stride_.assign(m, 1);
  for (int p = m - 2; p >= 0; --p) mixed_stride_[p] = mixed_stride_[p + 1] * local_count_[p + 1];
  long total = static_cast<long>(mixed_stride_[0]) * local_count_[0];

  profiles_.reserve(total);
  std::vector<int> cursor(m, 0);
  for (long c = 0; c < total; ++c) {
    OrbitProfile pr;
    pr.i.resize(m);
    pr.j.resize(m);
    pr.t.resize(m);
    long rem = c;
    for (int p = 0; p < m; ++p) {
      int loc = static_cast<int>(rem / mixed_stride_[p]);
      rem %= mixed_stride_[p];
      pr.i[p] = locals[p][loc][0];
      pr.j[p] = locals[p][loc][1];
      pr.t[p] = locals[p][loc][2];
    }
    profiles_.push_back(std::move(pr));
  }
  std::sort(profiles_.begin(), profiles_.end());

  lut_.assign(total, -1);
  for (int idx = 0; idx < static_cast<int>(profiles_.size()); ++idx) {
    const OrbitProfile& pr = profiles_[idx];
    long code = 0;
    for (int p = 0; p < m; ++p) {
      int s = part_code_stride_[p];
      int loc = part_local_[p][(static_cast<std::size_t>(pr.i[p]) * s + pr.j[p]) * s + pr.t[p]];
      code += static_cast<long>(loc) * mixed_stride_[p];
    }
    lut_[code] = idx;
  }
}

int ProfileSet::index_of(const int* i, const int* j, const int* t) const {
  long code = 0;
  int m = shape_.m();
  for (int p = 0; p < m; ++p) {
    int n = shape_.parts[p];
    if (i[p] < 0 || j[p] < 0 || t[p] < 0 || i[p] > n || j[p] > n || t[p] > n) return -1;
    int s = part_code_stride_[p];
    int loc = part_local_[p][(static_cast<std::size_t>(i[p]) * s + j[p]) * s + t[p]];
    if (loc < 0) return -1;
    code += static_cast<long>(loc) * mixed_stride_[p];
  }
  return lut_[code];
}

int ProfileSet::index_of(const OrbitProfile& p) const {
  if (static_cast<int>(p.i.size()) != shape_.m()) return -1;
  return index_of(p.i.data(), p.j.data(), p.t.data());
}

std::vector<BlockIndex> block_indices(const SplitShape& shape) {
  std::vector<BlockIndex> out;
  BlockIndex k(shape.m(), 0);
  while (true) {
    out.push_back(k);
    int p = shape.m() - 1;
    while (p >= 0) {
      if (k[p] < shape.parts[p] / 2) {
        ++k[p];
        break;
      }
      k[p] = 0;
      --p;
    }
    if (p < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

long block_size(const SplitShape& shape, const BlockIndex& k) {
  long s = 1;
  for (int p = 0; p < shape.m(); ++p) s *= shape.parts[p] - 2 * k[p] + 1;
  return s;
}

Int block_multiplicity(const SplitShape& shape, const BlockIndex& k) {
  Int mult(1);
  for (int p = 0; p < shape.m(); ++p)
    mult *= binom(shape.parts[p], k[p]) - binom(shape.parts[p], k[p] - 1);
  return mult;
}

Int beta(long i, long j, long t, long k, long n) {
  Int acc(0);
  for (long u = 0; u <= n; ++u) {
    Int term = binom(u, t) * binom(n - 2 * k, u - k) * binom(n - k - u, i - u) *
               binom(n - k - u, j - u);
    if (term == 0) continue;
    if ((u - t) % 2 == 0) acc += term; else acc -= term;
  }
  return acc;
}

BlockSpec assemble_block(const ProfileSet& ps, const BlockIndex& k) {
  const SplitShape& shape = ps.shape();
  int m = shape.m();
  if (static_cast<int>(k.size()) != m) throw std::invalid_argument("assemble_block: bad k");
  for (int p = 0; p < m; ++p)
    if (k[p] < 0 || 2 * k[p] > shape.parts[p])
      throw std::invalid_argument("assemble_block: k out of range");

  BlockSpec b;
  b.k = k;
  // Row labels: i-vectors with k_p <= i_p <= n_p - k_p, lex order.
  std::vector<int> iv(m);
  for (int p = 0; p < m; ++p) iv[p] = k[p];
  while (true) {
    b.rows.push_back(iv);
    int p = m - 1;
    while (p >= 0) {
      if (iv[p] < shape.parts[p] - k[p]) {
        ++iv[p];
        break;
      }
      iv[p] = k[p];
      --p;
    }
    if (p < 0) break;
  }
  b.size = static_cast<int>(b.rows.size());
  b.row_denom.reserve(b.size);
  for (const auto& r : b.rows) {
    Int d(1);
    for (int p = 0; p < m; ++p) d *= binom(shape.parts[p] - 2 * k[p], r[p] - k[p]);
    b.row_denom.push_back(d);
  }

  // Per-part beta cache: beta(i, j, t) for this k.
  b.terms.assign(static_cast<std::size_t>(b.size) * b.size, {});
  std::vector<int> tv(m);
  for (int r = 0; r < b.size; ++r) {
    for (int c = 0; c < b.size; ++c) {
      const std::vector<int>& ri = b.rows[r];
      const std::vector<int>& ci = b.rows[c];
      auto& entry = b.terms[static_cast<std::size_t>(r) * b.size + c];
      // Enumerate t-vectors giving valid profiles (ri, ci, t).
      std::fill(tv.begin(), tv.end(), 0);
      while (true) {
        int profile = ps.index_of(ri.data(), ci.data(), tv.data());
        if (profile >= 0) {
          Int coeff(1);
          for (int p = 0; p < m && coeff != 0; ++p)
            coeff *= beta(ri[p], ci[p], tv[p], k[p], shape.parts[p]);
          if (coeff != 0) entry.push_back({profile, coeff});
        }
        int p = m - 1;
        while (p >= 0) {
          if (tv[p] < std::min(ri[p], ci[p])) {
            ++tv[p];
            break;
          }
          tv[p] = 0;
          --p;
        }
        if (p < 0) break;
      }
    }
  }
  return b;
}

std::vector<double> block_eval(const BlockSpec& b, const std::vector<double>& x) {
  std::vector<double> out(static_cast<std::size_t>(b.size) * b.size, 0.0);
  for (int r = 0; r < b.size; ++r) {
    for (int c = 0; c < b.size; ++c) {
      double acc = 0;
      for (const auto& term : b.entry(r, c)) acc += to_double(term.coeff) * x[term.profile];
      double denom = std::sqrt(to_double(b.row_denom[r]) * to_double(b.row_denom[c]));
      out[static_cast<std::size_t>(r) * b.size + c] = acc / denom;
    }
  }
  return out;
}

}  // namespace splitsdp
