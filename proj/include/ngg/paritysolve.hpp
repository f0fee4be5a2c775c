// Two-player zero-sum game solving: Zielonka's algorithm for parity games
// with memoryless strategy extraction, Rabin games via index-appearance-
// record reduction to parity, and strategy verification.
#pragma once

#include <deque>
#include <optional>

#include "ngg/core.hpp"

namespace ngg {

enum class Side { Even = 0, Odd = 1 };
inline Side other(Side s) { return s == Side::Even ? Side::Odd : Side::Even; }

struct ParityGame {
  // owner[v]: Side; priority[v]: max-parity, Even wins iff the maximum
  // priority seen infinitely often is even.
  std::vector<Side> owner;
  std::vector<int> priority;
  std::vector<std::vector<int>> succ;
  std::vector<std::string> names;  // optional, for printing

  int size() const { return static_cast<int>(owner.size()); }
  int add_vertex(Side s, int prio) {
    owner.push_back(s);
    priority.push_back(prio);
    succ.emplace_back();
    return size() - 1;
  }
  void validate() const {
    for (int v = 0; v < size(); ++v)
      if (succ[v].empty()) throw input_error("parity game vertex without successor");
  }
};

struct Solution {
  std::vector<char> win_even;            // membership flags
  std::vector<int> strategy_even;        // successor or -1
  std::vector<int> strategy_odd;
};

namespace detail {

// Attractor of `target` for `side` within `alive`; fills strategy for
// side-owned vertices newly attracted (first improving successor in sorted
// order; deterministic).
inline std::vector<char> attractor(const ParityGame& g, const std::vector<char>& alive,
                                   Side side, const std::vector<char>& target,
                                   std::vector<int>* strategy) {
  int n = g.size();
  std::vector<char> in(n, 0);
  std::vector<int> pending(n, 0);  // for opponent vertices: successors not yet in
  std::vector<std::vector<int>> pred(n);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (int w : g.succ[v])
      if (alive[w]) {
        pred[w].push_back(v);
        ++pending[v];
      }
  }
  std::deque<int> queue;
  for (int v = 0; v < n; ++v)
    if (alive[v] && target[v]) {
      in[v] = 1;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (int v : pred[w]) {
      if (in[v]) continue;
      if (g.owner[v] == side) {
        // Pick the witnessing successor before marking v attracted, so a
        // self-loop cannot be chosen as its own attractor edge.
        if (strategy && (*strategy)[v] < 0) {
          for (int u : g.succ[v])
            if (alive[u] && in[u]) {
              (*strategy)[v] = u;
              break;
            }
        }
        in[v] = 1;
        queue.push_back(v);
      } else {
        if (--pending[v] == 0) {
          in[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }
  return in;
}

inline void zielonka(const ParityGame& g, std::vector<char> alive, Solution* sol) {
  int n = g.size();
  int top = -1;
  for (int v = 0; v < n; ++v)
    if (alive[v]) top = std::max(top, g.priority[v]);
  if (top < 0) return;  // empty subgame
  Side side = top % 2 == 0 ? Side::Even : Side::Odd;
  auto& my_strat = side == Side::Even ? sol->strategy_even : sol->strategy_odd;
  auto& opp_strat = side == Side::Even ? sol->strategy_odd : sol->strategy_even;

  std::vector<char> target(n, 0);
  for (int v = 0; v < n; ++v)
    if (alive[v] && g.priority[v] == top) target[v] = 1;
  std::vector<int> attr_strat(n, -1);
  std::vector<char> A = attractor(g, alive, side, target, &attr_strat);

  std::vector<char> rest = alive;
  for (int v = 0; v < n; ++v)
    if (A[v]) rest[v] = 0;
  Solution sub;
  sub.win_even.assign(n, 0);
  sub.strategy_even.assign(n, -1);
  sub.strategy_odd.assign(n, -1);
  zielonka(g, rest, &sub);

  bool opp_nonempty = false;
  for (int v = 0; v < n; ++v) {
    if (!rest[v]) continue;
    bool sub_even = sub.win_even[v];
    if ((side == Side::Even) != sub_even) opp_nonempty = true;
  }
  if (!opp_nonempty) {
    // `side` wins everywhere in this subgame.
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      sol->win_even[v] = side == Side::Even;
      if (g.owner[v] != side) continue;
      if (rest[v] && (side == Side::Even ? sub.strategy_even[v] : sub.strategy_odd[v]) >= 0)
        my_strat[v] = side == Side::Even ? sub.strategy_even[v] : sub.strategy_odd[v];
      else if (attr_strat[v] >= 0)
        my_strat[v] = attr_strat[v];
      else {
        // top-priority vertex of `side` with no attractor edge recorded:
        // any successor inside the (whole) subgame is fine.
        for (int u : g.succ[v])
          if (alive[u]) {
            my_strat[v] = u;
            break;
          }
      }
    }
    return;
  }
  // Opponent wins part of the subgame; attract to it and recurse.
  std::vector<char> opp_win(n, 0);
  for (int v = 0; v < n; ++v)
    if (rest[v] && ((side == Side::Even) != static_cast<bool>(sub.win_even[v])))
      opp_win[v] = 1;
  std::vector<int> opp_attr_strat(n, -1);
  std::vector<char> B = attractor(g, alive, other(side), opp_win, &opp_attr_strat);
  std::vector<char> rest2 = alive;
  for (int v = 0; v < n; ++v)
    if (B[v]) rest2[v] = 0;
  Solution sub2;
  sub2.win_even.assign(n, 0);
  sub2.strategy_even.assign(n, -1);
  sub2.strategy_odd.assign(n, -1);
  zielonka(g, rest2, &sub2);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    if (B[v]) {
      sol->win_even[v] = other(side) == Side::Even;
      if (g.owner[v] == other(side)) {
        if (opp_win[v]) {
          int s = other(side) == Side::Even ? sub.strategy_even[v] : sub.strategy_odd[v];
          opp_strat[v] = s;
          if (opp_strat[v] < 0)
            for (int u : g.succ[v])
              if (alive[u] && B[u]) {
                opp_strat[v] = u;
                break;
              }
        } else {
          opp_strat[v] = opp_attr_strat[v];
        }
      }
    } else {
      sol->win_even[v] = sub2.win_even[v];
      if (g.owner[v] == Side::Even && sub2.strategy_even[v] >= 0)
        sol->strategy_even[v] = sub2.strategy_even[v];
      if (g.owner[v] == Side::Odd && sub2.strategy_odd[v] >= 0)
        sol->strategy_odd[v] = sub2.strategy_odd[v];
    }
  }
}

}  // namespace detail

inline Solution solve_parity(const ParityGame& g) {
  g.validate();
  Solution sol;
  sol.win_even.assign(g.size(), 0);
  sol.strategy_even.assign(g.size(), -1);
  sol.strategy_odd.assign(g.size(), -1);
  std::vector<char> alive(g.size(), 1);
  detail::zielonka(g, std::move(alive), &sol);
  return sol;
}

// True iff, with side's moves fixed by strat inside region (and the
// opponent verified unable to leave region), every cycle of the restricted
// graph has winning parity for side.
inline bool verify_strategy(const ParityGame& g, const std::vector<char>& region,
                            Side side, const std::vector<int>& strat) {
  int n = g.size();
  std::vector<std::vector<int>> succ(n);
  for (int v = 0; v < n; ++v) {
    if (!region[v]) continue;
    if (g.owner[v] == side) {
      int s = strat[v];
      if (s < 0 || !region[s]) return false;  // strategy leaves region
      succ[v] = {s};
    } else {
      for (int w : g.succ[v]) {
        if (!region[w]) return false;  // opponent can exit
        succ[v].push_back(w);
      }
    }
  }
  // For each losing-dominant priority p, look for a cycle within
  // {priority <= p} containing a priority-p vertex.
  int maxp = 0;
  for (int v = 0; v < n; ++v)
    if (region[v]) maxp = std::max(maxp, g.priority[v]);
  int losing_parity = side == Side::Even ? 1 : 0;
  for (int p = losing_parity; p <= maxp; p += 2) {
    // SCCs of the subgraph restricted to priority <= p.
    std::vector<int> comp(n, -1);
    int comps = 0;
    {
      // simple iterative Tarjan over the restricted subgraph
      std::vector<int> low(n), num(n, -1), stk;
      std::vector<char> on(n, 0);
      int counter = 0;
      struct Frame { int v; size_t i; };
      for (int root = 0; root < n; ++root) {
        if (!region[root] || g.priority[root] > p || num[root] != -1) continue;
        std::vector<Frame> st{{root, 0}};
        num[root] = low[root] = counter++;
        stk.push_back(root);
        on[root] = 1;
        while (!st.empty()) {
          Frame& f = st.back();
          int v = f.v;
          bool descended = false;
          while (f.i < succ[v].size()) {
            int w = succ[v][f.i++];
            if (!region[w] || g.priority[w] > p) continue;
            if (num[w] == -1) {
              st.push_back({w, 0});
              num[w] = low[w] = counter++;
              stk.push_back(w);
              on[w] = 1;
              descended = true;
              break;
            } else if (on[w]) {
              low[v] = std::min(low[v], num[w]);
            }
          }
          if (descended) continue;
          if (low[v] == num[v]) {
            for (;;) {
              int w = stk.back();
              stk.pop_back();
              on[w] = 0;
              comp[w] = comps;
              if (w == v) break;
            }
            ++comps;
          }
          st.pop_back();
          if (!st.empty()) low[st.back().v] = std::min(low[st.back().v], low[v]);
        }
      }
    }
    std::vector<char> has_edge(comps, 0), has_p(comps, 0);
    for (int v = 0; v < n; ++v) {
      if (!region[v] || g.priority[v] > p) continue;
      for (int w : succ[v])
        if (region[w] && g.priority[w] <= p && comp[w] == comp[v]) has_edge[comp[v]] = 1;
      if (g.priority[v] == p) has_p[comp[v]] = 1;
    }
    for (int c = 0; c < comps; ++c)
      if (has_edge[c] && has_p[c]) return false;
  }
  return true;
}

// -------------------------------------------------------------------------
// Rabin games and the index-appearance-record reduction to parity.
// -------------------------------------------------------------------------
struct RabinGame {
  std::vector<Side> owner;  // the Rabin player is Even's role after reduction
  std::vector<std::vector<int>> succ;
  // pairs[j] = (E_j, F_j) membership flags over vertices; the Rabin player
  // wins a play iff for some j the play hits E_j finitely and F_j infinitely
  // often.
  std::vector<std::pair<std::vector<char>, std::vector<char>>> pairs;

  int size() const { return static_cast<int>(owner.size()); }
};

struct RabinReduction {
  ParityGame game;
  std::vector<int> lift;           // original vertex -> parity vertex (identity record)
  std::vector<int> orig_of;        // parity vertex -> original vertex
};

namespace detail {

// Priority emitted when entering state/vertex `v` while the record `perm`
// (positions 1..k, most recent E-hit first) is current: with e (f) the
// deepest record position whose pair has an E-hit (F-hit) at v, emit odd
// 2e+1 if e >= f and even 2f otherwise. The record then moves all E-hit
// indices to the front.
template <typename HitE, typename HitF>
int iar_priority(const std::vector<int>& perm, HitE hitE, HitF hitF) {
  int e = 0, f = 0;
  for (size_t pos = 0; pos < perm.size(); ++pos) {
    int j = perm[pos];
    if (hitE(j)) e = static_cast<int>(pos) + 1;
    if (hitF(j)) f = static_cast<int>(pos) + 1;
  }
  return e >= f ? 2 * e + 1 : 2 * f;
}

template <typename HitE>
std::vector<int> iar_update(const std::vector<int>& perm, HitE hitE) {
  std::vector<int> front, back;
  for (int j : perm)
    (hitE(j) ? front : back).push_back(j);
  front.insert(front.end(), back.begin(), back.end());
  return front;
}

}  // namespace detail

inline RabinReduction rabin_to_parity(const RabinGame& g, size_t max_vertices = 1000000) {
  RabinReduction red;
  int n = g.size();
  int k = static_cast<int>(g.pairs.size());
  red.lift.assign(n, -1);
  if (k == 0) {
    // Empty Rabin disjunction is false: Odd wins everywhere.
    for (int v = 0; v < n; ++v) {
      red.game.add_vertex(g.owner[v], 1);
      red.lift[v] = v;
      red.orig_of.push_back(v);
    }
    for (int v = 0; v < n; ++v) red.game.succ[v] = g.succ[v];
    return red;
  }
  auto hitE = [&](int v) {
    return [&, v](int j) { return static_cast<bool>(g.pairs[j].first[v]); };
  };
  auto hitF = [&](int v) {
    return [&, v](int j) { return static_cast<bool>(g.pairs[j].second[v]); };
  };
  std::vector<int> id_perm(k);
  for (int j = 0; j < k; ++j) id_perm[j] = j;

  struct Node { int v; std::vector<int> perm; };
  std::vector<Node> nodes;
  // Arriving at v emits a priority computed from the record before the
  // update; nodes are keyed on (v, updated record, emitted priority) since
  // distinct pre-update records can agree after the update yet differ in
  // hit depths.
  std::map<std::tuple<int, std::vector<int>, int>, int> index3;
  std::deque<int> work;
  auto get_node = [&](int v, const std::vector<int>& perm_before) {
    int prio = detail::iar_priority(perm_before, hitE(v), hitF(v));
    std::vector<int> perm = detail::iar_update(perm_before, hitE(v));
    auto key = std::make_tuple(v, perm, prio);
    auto it = index3.find(key);
    if (it != index3.end()) return it->second;
    int id = red.game.add_vertex(g.owner[v], prio);
    if (red.game.size() > static_cast<int>(max_vertices))
      throw cap_exceeded("rabin_to_parity: vertex cap exceeded");
    index3.emplace(key, id);
    nodes.push_back({v, perm});
    red.orig_of.push_back(v);
    work.push_back(id);
    return id;
  };
  for (int v = 0; v < n; ++v) red.lift[v] = get_node(v, id_perm);
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    Node node = nodes[id];
    std::vector<int> targets;
    for (int w : g.succ[node.v]) targets.push_back(get_node(w, node.perm));
    red.game.succ[id] = std::move(targets);  // get_node may grow succ
  }
  return red;
}

}  // namespace ngg
