#include <splitsdp/bounds.hpp>

#include <splitsdp/combinatorics.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splitsdp {

std::pair<int, int> propagate(int n, int d) {
  if (d < 1 || d > n) throw std::invalid_argument("propagate: need 1 <= d <= n");
  if (d % 2 == 1) return {n + 1, d + 1};
  return {n, d};
}

BoundTable BoundTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("BoundTable: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

BoundTable BoundTable::parse(const std::string& text, const std::string& origin) {
  BoundTable t;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string provenance;
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      provenance = line.substr(hash + 1);
      std::size_t s = provenance.find_first_not_of(" \t");
      provenance = (s == std::string::npos) ? "" : provenance.substr(s);
      while (!provenance.empty() && (provenance.back() == ' ' || provenance.back() == '\r'))
        provenance.pop_back();
      line.erase(hash);
    }
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;  // blank or comment-only line
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
    };
    auto read_value = [&](long fields_before) {
      (void)fields_before;
      std::string v;
      if (!(ls >> v)) fail("missing value field");
      try {
        return Int(v);
      } catch (const std::invalid_argument&) {
        fail("malformed value '" + v + "'");
      }
      return Int(0);
    };
    if (kind == "cw") {
      int n, d, w;
      if (!(ls >> n >> d >> w)) fail("cw entry needs: n d w value");
      Int v = read_value(3);
      if (n < 0 || w < 0 || w > n || v < 0) fail("cw entry out of range");
      t.cw[{n, d, w}] = {v, provenance};
    } else if (kind == "dcw") {
      int w1, t1, w2, t2, d;
      if (!(ls >> w1 >> t1 >> w2 >> t2 >> d)) fail("dcw entry needs: w1 t1 w2 t2 d value");
      Int v = read_value(5);
      if (w1 < 0 || w2 < 0 || w1 > t1 || w2 > t2 || v < 0) fail("dcw entry out of range");
      t.dcw[{w1, t1, w2, t2, d}] = {v, provenance};
    } else if (kind == "a") {
      int n, d;
      if (!(ls >> n >> d)) fail("a entry needs: n d value");
      Int v = read_value(2);
      if (n < 1 || d < 1 || v < 0) fail("a entry out of range");
      t.nd[{n, d}] = {v, provenance};
    } else {
      fail("unknown entry kind '" + kind + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing field '" + extra + "'");
  }
  return t;
}

std::string BoundTable::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : cw)
    os << "cw " << std::get<0>(k) << ' ' << std::get<1>(k) << ' ' << std::get<2>(k)
       << ' ' << v.first.get_str() << (v.second.empty() ? "" : " # " + v.second) << '\n';
  for (const auto& [k, v] : dcw)
    os << "dcw " << std::get<0>(k) << ' ' << std::get<1>(k) << ' ' << std::get<2>(k)
       << ' ' << std::get<3>(k) << ' ' << std::get<4>(k) << ' ' << v.first.get_str()
       << (v.second.empty() ? "" : " # " + v.second) << '\n';
  for (const auto& [k, v] : nd)
    os << "a " << k.first << ' ' << k.second << ' ' << v.first.get_str()
       << (v.second.empty() ? "" : " # " + v.second) << '\n';
  return os.str();
}

void BoundContext::record(const std::string& line) {
  auto tab = line.find('\t');
  used_[line.substr(0, tab)] = line.substr(tab + 1);
}

Int BoundContext::cw_bound(int n, int d, int w) {
  std::lock_guard<std::mutex> lock(mutex_);
  return cw_bound_locked(n, d, w);
}

Int BoundContext::cw_bound_locked(int n, int d, int w) {
  if (n < 0 || w < 0 || w > n || d < 1)
    throw std::invalid_argument("cw_bound: bad arguments");
  auto key = std::make_tuple(n, d, w);
  if (auto it = cw_memo_.find(key); it != cw_memo_.end()) return it->second;
  Int result;
  std::string source;
  if (table_) {
    if (auto it = table_->cw.find(key); it != table_->cw.end()) {
      result = it->second.first;
      source = "table: " + (it->second.second.empty() ? "unattributed" : it->second.second);
    }
  }
  if (source.empty()) {
    result = binom(n, w);
    source = "fallback: binom";
    if (d > 2 * std::min(w, n - w) && result > 1) {
      result = 1;
      source = "fallback: spread";
    }
    if (w >= 1 && n >= 1) {
      Int johnson = (Int(n) * cw_bound_locked(n - 1, d, w - 1)) / w;
      if (johnson < result) {
        result = johnson;
        source = "fallback: johnson";
      }
    }
  }
  cw_memo_[key] = result;
  record("cw(" + std::to_string(n) + "," + std::to_string(d) + "," + std::to_string(w) +
         ")=" + result.get_str() + "\t" + source);
  return result;
}

Int BoundContext::dcw_bound(int w1, int t1, int w2, int t2, int d) {
  if (w1 < 0 || w2 < 0 || w1 > t1 || w2 > t2 || d < 1)
    throw std::invalid_argument("dcw_bound: bad arguments");
  std::lock_guard<std::mutex> lock(mutex_);
  Int result;
  std::string source;
  if (table_) {
    if (auto it = table_->dcw.find({w1, t1, w2, t2, d}); it != table_->dcw.end()) {
      result = it->second.first;
      source = "table: " + (it->second.second.empty() ? "unattributed" : it->second.second);
    }
  }
  if (source.empty()) {
    Int relax = cw_bound_locked(t1 + t2, d, w1 + w2);
    Int count = binom(t1, w1) * binom(t2, w2);
    result = relax < count ? relax : count;
    source = relax < count ? "fallback: cw relaxation" : "fallback: counting";
  }
  record("dcw(" + std::to_string(w1) + "," + std::to_string(t1) + "," + std::to_string(w2) +
         "," + std::to_string(t2) + "," + std::to_string(d) + ")=" + result.get_str() +
         "\t" + source);
  return result;
}

Int BoundContext::nd_bound(int n, int d) {
  std::lock_guard<std::mutex> lock(mutex_);
  return nd_bound_locked(n, d);
}

Int BoundContext::nd_bound_locked(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("nd_bound: bad arguments");
  if (d > n) return Int(1);
  auto key = std::make_pair(n, d);
  if (auto it = nd_memo_.find(key); it != nd_memo_.end()) return it->second;
  Int result;
  std::string source;
  if (table_) {
    if (auto it = table_->nd.find(key); it != table_->nd.end()) {
      result = it->second.first;
      source = "table: " + (it->second.second.empty() ? "unattributed" : it->second.second);
    }
  }
  if (source.empty()) {
    if (d % 2 == 1) {
      // A(n, 2e-1) = A(n+1, 2e).
      result = nd_bound_locked(n + 1, d + 1);
      source = "fallback: propagation";
    } else {
      result = Int(1) << n;
      source = "fallback: trivial";
      Int singleton = Int(1) << (n - d + 1);
      if (singleton < result) {
        result = singleton;
        source = "fallback: singleton";
      }
      if (2 * d > n) {
        Int plotkin = 2 * (Int(d) / (2 * d - n));
        if (plotkin < result) {
          result = plotkin;
          source = "fallback: plotkin";
        }
      } else if (2 * d == n) {
        Int plotkin = Int(4) * d;
        if (plotkin < result) {
          result = plotkin;
          source = "fallback: plotkin";
        }
      } else {
        Int halved = 2 * nd_bound_locked(n - 1, d);
        if (halved < result) {
          result = halved;
          source = "fallback: halving";
        }
      }
    }
  }
  nd_memo_[key] = result;
  record("a(" + std::to_string(n) + "," + std::to_string(d) + ")=" + result.get_str() +
         "\t" + source);
  return result;
}

std::vector<std::string> BoundContext::used() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out;
  out.reserve(used_.size());
  for (const auto& [k, v] : used_) out.push_back(k + " [" + v + "]");
  return out;
}

}  // namespace splitsdp
