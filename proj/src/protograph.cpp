#include "fqms/protograph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "fqms/common.hpp"
#include "fqms/rng.hpp"

namespace fqms {

DegreeProfile Protograph::degrees() const {
  DegreeProfile d;
  d.d_v.assign(n, 0);
  d.d_c.assign(m, 0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      d.d_v[i] += at(j, i);
      d.d_c[j] += at(j, i);
    }
  d.max_dv = *std::max_element(d.d_v.begin(), d.d_v.end());
  d.max_dc = *std::max_element(d.d_c.begin(), d.d_c.end());
  d.q_s = static_cast<int>(std::ceil(std::log2(static_cast<double>(d.max_dv + 1))));
  return d;
}

std::string Protograph::canonical() const {
  std::ostringstream os;
  os << m << ' ' << n;
  for (int v : s) os << ' ' << v;
  return os.str();
}

Protograph parse_protograph(const std::string& text, const std::string& name) {
  Protograph p;
  p.name = name;
  std::string rows = text;
  std::replace(rows.begin(), rows.end(), ';', '\n');
  std::istringstream is(rows);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<int> row;
    long v;
    while (ls >> v) {
      if (v < 0) throw config_error("protograph entries must be non-negative");
      row.push_back(static_cast<int>(v));
    }
    if (!ls.eof()) throw config_error("protograph row has non-integer token: " + line);
    if (row.empty()) continue;
    if (p.n == 0) p.n = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != p.n)
      throw config_error("protograph rows have inconsistent lengths");
    p.s.insert(p.s.end(), row.begin(), row.end());
    ++p.m;
  }
  if (p.m == 0 || p.n == 0) throw config_error("protograph is empty");
  for (int i = 0; i < p.n; ++i) {
    int col = 0;
    for (int j = 0; j < p.m; ++j) col += p.at(j, i);
    if (col == 0) throw config_error("protograph column " + std::to_string(i) + " has no edges");
  }
  if (p.n <= p.m) throw config_error("protograph rate (n-m)/n must be positive");
  return p;
}

Protograph protograph_preset(const std::string& name) {
  std::string key;
  for (char c : name) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto make = [&](std::string nm, std::vector<int> s) {
    Protograph p;
    p.name = std::move(nm);
    p.m = 2;
    p.n = 4;
    p.s = std::move(s);
    return p;
  };
  if (key == "s17") return make("s17", {2, 3, 1, 1, 0, 1, 4, 1});
  if (key == "s36") return make("s36", {2, 1, 2, 3, 1, 4, 0, 1});
  if (key == "sm") return make("sm", {3, 2, 1, 2, 0, 1, 1, 4});
  if (key == "sc") return make("sc", {0, 1, 2, 5, 2, 2, 0, 2});
  throw config_error("unknown protograph preset: " + name);
}

std::vector<std::string> protograph_preset_names() { return {"s17", "s36", "sm", "sc"}; }

namespace {

constexpr int kChainCap = 32;  // chain codewords at least this heavy are all fine

// Spreading factors to try, largest first: divisors of Z from {10, 5, 2}
// that keep the circulant blocks at least 8 deep, then 1 (no spreading).
std::vector<int> spread_candidates(int Z) {
  std::vector<int> out;
  for (int f : {10, 5, 2})
    if (Z % f == 0 && Z / f >= 8) out.push_back(f);
  out.push_back(1);
  return out;
}

struct ShiftPlan {
  std::vector<LiftedCode::EdgeClass> edges;
  int F = 1;  // spreading factor used (LiftedCode::blocks)
  int cycle4_count = 0;
  // Smallest codeword weight carried by chains of degree-2 variable blocks
  // (capped at kChainCap).  Every closed chain through degree-2 variables is
  // a codeword, so a short chain caps the minimum distance no matter how
  // good the rest of the graph is.
  int min_chain_weight = 0;
};

// Exact smallest-weight codeword supported on degree-2 variable blocks.
// Each such block column attaches to two block rows with a fixed circulant
// transfer; a closed walk whose transfers cancel (mod Zb) lifts to a
// codeword whose weight is the number of variables on the walk.  A
// breadth-first search over (block row, accumulated transfer) states finds
// the shortest walk through each block column; the first and last step of a
// walk may not reuse the very variable that closes it.
int chain_codeword_weight(const Protograph& p, int F, int Zb,
                          const std::vector<LiftedCode::EdgeClass>& edges) {
  const DegreeProfile deg = p.degrees();
  struct Link {
    int a, b, t;  // block rows joined, circulant transfer a -> b
  };
  std::vector<Link> links;
  {
    std::vector<std::vector<std::pair<int, int>>> att(
        static_cast<std::size_t>(p.n) * F);
    for (const auto& e : edges)
      if (deg.d_v[e.i] == 2)
        att[static_cast<std::size_t>(e.i) * F + e.col].push_back(
            {e.j * F + e.row, e.shift});
    for (const auto& a : att)
      if (a.size() == 2) {
        int t = (a[1].second - a[0].second) % Zb;
        if (t < 0) t += Zb;
        links.push_back({a[0].first, a[1].first, t});
      }
  }
  if (links.empty()) return kChainCap;

  const int R = p.m * F;
  int best = kChainCap;
  std::vector<int> dist(static_cast<std::size_t>(R) * Zb);
  std::vector<int> queue;
  for (std::size_t e0 = 0; e0 < links.size() && best > 2; ++e0) {
    const Link& L0 = links[e0];
    const int start = L0.b * Zb + L0.t;
    const int target = L0.a * Zb;  // transfer 0 at the first endpoint
    if (start == target) continue;  // cannot happen: duplicate shifts are barred
    std::fill(dist.begin(), dist.end(), -1);
    dist[start] = 0;
    queue.assign(1, start);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int s = queue[head];
      const int r = s / Zb, delta = s % Zb;
      if (dist[s] + 1 >= best) break;  // even one more step cannot improve
      for (std::size_t k = 0; k < links.size(); ++k) {
        const Link& L = links[k];
        // Crossing link e0 at the transfer it was entered with would reuse
        // the closing variable itself; every other crossing is a fresh one.
        if (L.a == r && !(k == e0 && delta == 0)) {
          const int ns = L.b * Zb + (delta + L.t) % Zb;
          if (dist[ns] < 0) {
            dist[ns] = dist[s] + 1;
            queue.push_back(ns);
          }
        }
        if (L.b == r && !(k == e0 && delta == L0.t)) {
          const int ns = L.a * Zb + (delta - L.t + Zb) % Zb;
          if (dist[ns] < 0) {
            dist[ns] = dist[s] + 1;
            queue.push_back(ns);
          }
        }
      }
      if (dist[target] >= 0) break;
    }
    if (dist[target] >= 0) best = std::min(best, dist[target] + 1);
  }
  return best;
}

// Greedy placement at spreading factor F.  Parallel edges of one cell take
// distinct block-row offsets whenever F allows it, then every block edge is
// given its own shift.  diffs[r1][r2] marks circulant differences already
// present between block rows r1 and r2; a repeat means a length-4 cycle.
// Each block edge takes the candidate with the best (no-4-cycle, same-cell
// ring weight) score; ties resolve by the shuffled scan order.
ShiftPlan place_shifts(const Protograph& p, int Z, int F, uint64_t seed) {
  const int Zb = Z / F;
  const int R = p.m * F;  // block rows
  const int C = p.n * F;  // block columns
  ShiftPlan plan;
  plan.F = F;

  SplitMix64 rng(derive_key(seed, kMemLift, 0));

  // Block-row offset per parallel copy.  Distinct offsets put parallel edges
  // in different block cells; a plain circulant lift (F == 1) instead pins
  // weight-8 codewords into the code for EVERY shift choice whenever a cell
  // holds two parallel edges, because the pair acts as one repeated algebraic
  // factor that other columns can always cancel.
  std::vector<std::vector<int>> cell_off(static_cast<std::size_t>(p.m) * p.n);
  {
    std::vector<int> offs(F);
    for (int j = 0; j < p.m; ++j)
      for (int i = 0; i < p.n; ++i) {
        const int mu = p.at(j, i);
        if (mu == 0) continue;
        std::iota(offs.begin(), offs.end(), 0);
        for (int k = F - 1; k > 0; --k)
          std::swap(offs[k],
                    offs[static_cast<int>(rng.next() % static_cast<uint64_t>(k + 1))]);
        auto& dst = cell_off[static_cast<std::size_t>(j) * p.n + i];
        for (int c = 0; c < mu; ++c) dst.push_back(offs[c % F]);
      }
  }

  std::vector<std::vector<std::vector<uint8_t>>> diffs(
      R, std::vector<std::vector<uint8_t>>(R, std::vector<uint8_t>(Zb, 0)));
  // Placed block edges per block column: (block row, shift).
  std::vector<std::vector<std::pair<int, int>>> placed(C);

  const DegreeProfile deg = p.degrees();
  const int ring_cap = std::min(Zb, kChainCap);

  std::vector<int> order(Zb);
  std::vector<int> same_d;
  for (int j = 0; j < p.m; ++j)
    for (int i = 0; i < p.n; ++i)
      for (int copy = 0; copy < p.at(j, i); ++copy) {
        const int off = cell_off[static_cast<std::size_t>(j) * p.n + i][copy];
        for (int c = 0; c < F; ++c) {
          const int bc = i * F + c;
          const int br = j * F + (c + off) % F;
          std::iota(order.begin(), order.end(), 0);
          for (int k = Zb - 1; k > 0; --k)
            std::swap(order[k],
                      order[static_cast<int>(rng.next() % static_cast<uint64_t>(k + 1))]);

          int chosen = -1;
          bool chosen_cyc = false;
          long best_rank = -1;
          for (int cand : order) {
            bool dup = false, cyc = false;
            int pure_w = Zb, ring_w = ring_cap;
            same_d.clear();
            for (auto [rf, sf] : placed[bc]) {
              int d = cand - sf;
              if (d < 0) d += Zb;
              if (rf == br && d == 0) {
                dup = true;
                break;
              }
              if (diffs[br][rf][d]) cyc = true;
              if (rf == br) {
                // Parallel edges sharing one block cell (possible only when
                // the cell multiplicity exceeds F): the pair closes a
                // 4-cycle on its own when its difference is self-inverse,
                // and two fresh pairs close one when their differences
                // cancel.
                if ((2 * d) % Zb == 0) cyc = true;
                for (int prev : same_d)
                  if ((prev + d) % Zb == 0) cyc = true;
                same_d.push_back(d);
                const int w = Zb / std::gcd(Zb, d);
                if (deg.d_v[i] == 2)
                  pure_w = std::min(pure_w, w);
                else
                  ring_w = std::min(ring_w, std::min(w, ring_cap));
              }
            }
            if (dup) continue;
            long rank = cyc ? 0 : 1;
            rank = rank * (Zb + 1) + pure_w;
            rank = rank * (ring_cap + 1) + ring_w;
            if (rank > best_rank) {
              best_rank = rank;
              chosen = cand;
              chosen_cyc = cyc;
            }
            if (!cyc && pure_w == Zb && ring_w == ring_cap) break;
          }
          if (chosen < 0)
            throw config_error("lift: Z=" + std::to_string(Z) +
                               " cannot give distinct shifts to " +
                               std::to_string(p.at(j, i)) + " parallel edges");
          if (chosen_cyc) ++plan.cycle4_count;
          for (auto [rf, sf] : placed[bc]) {
            int d = chosen - sf;
            if (d < 0) d += Zb;
            diffs[br][rf][d] = 1;
            diffs[rf][br][(Zb - d) % Zb] = 1;
          }
          placed[bc].push_back({br, chosen});
          plan.edges.push_back({j, i, copy, c, (c + off) % F, chosen});
        }
      }
  plan.min_chain_weight = chain_codeword_weight(p, F, Zb, plan.edges);
  return plan;
}

}  // namespace

LiftedCode lift(const Protograph& proto, int Z, uint64_t seed) {
  if (Z < 1) throw config_error("lift: Z must be >= 1");

  ShiftPlan best;
  bool have = false;
  auto better = [](const ShiftPlan& a, const ShiftPlan& b) {
    if (a.cycle4_count != b.cycle4_count) return a.cycle4_count < b.cycle4_count;
    if (a.min_chain_weight != b.min_chain_weight)
      return a.min_chain_weight > b.min_chain_weight;
    return a.F > b.F;
  };
  for (int F : spread_candidates(Z)) {
    ShiftPlan fbest;
    bool fhave = false;
    for (uint64_t attempt = 0; attempt < 48; ++attempt) {
      ShiftPlan plan = place_shifts(
          proto, Z, F, derive_key(seed, kMemLift, (static_cast<uint64_t>(F) << 32) | attempt));
      if (!fhave || better(plan, fbest)) {
        fbest = std::move(plan);
        fhave = true;
      }
      if (fbest.cycle4_count == 0 && fbest.min_chain_weight >= kChainCap) break;
    }
    if (!have || better(fbest, best)) {
      best = std::move(fbest);
      have = true;
    }
    if (best.cycle4_count == 0) break;  // keep the widest spreading that lifts cleanly
  }

  LiftedCode code;
  code.proto = proto;
  code.Z = Z;
  code.N = proto.n * Z;
  code.M = proto.m * Z;
  code.blocks = best.F;
  code.Zb = Z / best.F;
  code.min_chain_weight = best.min_chain_weight;
  code.classes = std::move(best.edges);

  DegreeProfile deg = proto.degrees();
  code.cn_offset.assign(code.M + 1, 0);
  for (int j = 0; j < proto.m; ++j)
    for (int z = 0; z < Z; ++z) code.cn_offset[j * Z + z + 1] = deg.d_c[j];
  for (int c = 0; c < code.M; ++c) code.cn_offset[c + 1] += code.cn_offset[c];
  code.cn_vn.assign(code.cn_offset.back(), -1);

  std::vector<int> fill(code.M, 0);
  for (const auto& ec : code.classes)
    for (int z = 0; z < code.Zb; ++z) {
      int cn = ec.j * Z + ec.row * code.Zb + z;
      int vn = ec.i * Z + ec.col * code.Zb + (z + ec.shift) % code.Zb;
      code.cn_vn[code.cn_offset[cn] + fill[cn]] = vn;
      ++fill[cn];
    }

  code.vn_offset.assign(code.N + 1, 0);
  for (int vn : code.cn_vn) ++code.vn_offset[vn + 1];
  for (int v = 0; v < code.N; ++v) code.vn_offset[v + 1] += code.vn_offset[v];
  code.vn_cn.assign(code.cn_vn.size(), -1);
  code.vn_edge.assign(code.cn_vn.size(), -1);
  std::vector<int> vfill(code.N, 0);
  for (int cn = 0; cn < code.M; ++cn)
    for (int k = code.cn_offset[cn]; k < code.cn_offset[cn + 1]; ++k) {
      int vn = code.cn_vn[k];
      int slot = code.vn_offset[vn] + vfill[vn]++;
      code.vn_cn[slot] = cn;
      code.vn_edge[slot] = k;
    }
  return code;
}

bool has_length4_cycle(const LiftedCode& code) {
  std::unordered_set<uint64_t> pairs;
  for (int v = 0; v < code.N; ++v) {
    int b = code.vn_offset[v], e = code.vn_offset[v + 1];
    for (int a = b; a < e; ++a)
      for (int c = a + 1; c < e; ++c) {
        int c1 = code.vn_cn[a], c2 = code.vn_cn[c];
        if (c1 == c2) return true;  // parallel edges collapsed onto one CN
        if (c1 > c2) std::swap(c1, c2);
        uint64_t key = (static_cast<uint64_t>(c1) << 32) | static_cast<uint32_t>(c2);
        if (!pairs.insert(key).second) return true;
      }
  }
  return false;
}

std::string export_alist(const LiftedCode& code) {
  std::vector<std::vector<int>> vn_adj(code.N), cn_adj(code.M);
  for (int cn = 0; cn < code.M; ++cn)
    for (int k = code.cn_offset[cn]; k < code.cn_offset[cn + 1]; ++k) {
      int vn = code.cn_vn[k];
      vn_adj[vn].push_back(cn + 1);
      cn_adj[cn].push_back(vn + 1);
    }
  std::size_t max_dv = 0, max_dc = 0;
  for (auto& a : vn_adj) {
    std::sort(a.begin(), a.end());
    max_dv = std::max(max_dv, a.size());
  }
  for (auto& a : cn_adj) {
    std::sort(a.begin(), a.end());
    max_dc = std::max(max_dc, a.size());
  }

  std::ostringstream os;
  os << code.N << ' ' << code.M << '\n';
  os << max_dv << ' ' << max_dc << '\n';
  for (int v = 0; v < code.N; ++v) os << vn_adj[v].size() << (v + 1 < code.N ? ' ' : '\n');
  for (int c = 0; c < code.M; ++c) os << cn_adj[c].size() << (c + 1 < code.M ? ' ' : '\n');
  auto emit = [&os](const std::vector<int>& a) {
    for (std::size_t k = 0; k < a.size(); ++k) os << a[k] << (k + 1 < a.size() ? ' ' : '\n');
  };
  for (const auto& a : vn_adj) emit(a);
  for (const auto& a : cn_adj) emit(a);
  return os.str();
}

AlistGraph parse_alist(const std::string& text) {
  std::istringstream is(text);
  AlistGraph g;
  int max_dv, max_dc;
  if (!(is >> g.N >> g.M >> max_dv >> max_dc)) throw config_error("alist: bad header");
  std::vector<int> dv(g.N), dc(g.M);
  for (auto& d : dv) is >> d;
  for (auto& d : dc) is >> d;
  g.vn_adj.resize(g.N);
  g.cn_adj.resize(g.M);
  for (int v = 0; v < g.N; ++v) {
    g.vn_adj[v].resize(dv[v]);
    for (auto& x : g.vn_adj[v]) is >> x;
  }
  for (int c = 0; c < g.M; ++c) {
    g.cn_adj[c].resize(dc[c]);
    for (auto& x : g.cn_adj[c]) is >> x;
  }
  if (!is) throw config_error("alist: truncated body");
  return g;
}

}  // namespace fqms
