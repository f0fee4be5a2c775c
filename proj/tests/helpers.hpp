// Shared test utilities: reference arenas, random generators, and
// independent brute-force oracles the unit tests validate against.
#pragma once

#include <random>

#include "ngg/automata.hpp"
#include "ngg/core.hpp"

namespace ngg::testing {

// The four-vertex reference arena: v0 -> v3, v0 -> v2, v3 -> v0, v3 -> v1,
// v1 -> v0, v2 -> v0; player 2 owns v3, player 1 owns the rest.
inline Arena reference_arena() {
  Arena a;
  a.set_players(2);
  int v0 = a.add_vertex("v0", 1);
  int v1 = a.add_vertex("v1", 1);
  int v2 = a.add_vertex("v2", 1);
  int v3 = a.add_vertex("v3", 2);
  a.add_edge(v0, v3);
  a.add_edge(v0, v2);
  a.add_edge(v3, v0);
  a.add_edge(v3, v1);
  a.add_edge(v1, v0);
  a.add_edge(v2, v0);
  a.finalize();
  return a;
}

inline Lasso make_lasso(std::vector<int> prefix, std::vector<int> cycle) {
  Lasso l;
  l.prefix = std::move(prefix);
  l.cycle = std::move(cycle);
  return normalize_lasso(l);
}

// Random deterministic complete automaton.
inline Gpa random_dpa(std::mt19937& rng, int tracks, int base, int max_states,
                      int num_conds, int max_prio, bool random_formula = false) {
  Gpa a;
  a.tracks = tracks;
  a.base1 = base;
  a.base2 = tracks == 2 ? base : 0;
  std::uniform_int_distribution<int> nstates(1, max_states);
  int n = nstates(rng);
  std::uniform_int_distribution<int> st(0, n - 1), pr(0, max_prio);
  a.delta.assign(n, std::vector<std::vector<int>>(a.alphabet_size()));
  for (int q = 0; q < n; ++q)
    for (int l = 0; l < a.alphabet_size(); ++l) a.delta[q][l] = {st(rng)};
  a.initial = st(rng);
  a.conditions.assign(num_conds, std::vector<int>(n));
  for (int j = 0; j < num_conds; ++j)
    for (int q = 0; q < n; ++q) a.conditions[j][q] = pr(rng);
  if (num_conds == 1 || !random_formula) {
    std::vector<Formula> leaves;
    for (int j = 0; j < num_conds; ++j) leaves.push_back(Formula::leaf(j));
    a.formula = rng() % 2 ? Formula::any_of(leaves) : Formula::all_of(leaves);
    if (num_conds == 1) a.formula = Formula::leaf(0);
  } else {
    // Random two-level positive formula.
    std::vector<Formula> groups;
    int g = 1 + static_cast<int>(rng() % 2);
    for (int k = 0; k < g; ++k) {
      std::vector<Formula> leaves;
      for (int j = 0; j < num_conds; ++j)
        if (rng() % 2) leaves.push_back(Formula::leaf(j));
      if (leaves.empty()) leaves.push_back(Formula::leaf(static_cast<int>(rng() % num_conds)));
      groups.push_back(rng() % 2 ? Formula::all_of(leaves) : Formula::any_of(leaves));
    }
    a.formula = rng() % 2 ? Formula::any_of(groups) : Formula::all_of(groups);
  }
  return a;
}

inline Lasso random_lasso(std::mt19937& rng, int letters, int max_pre, int max_cyc) {
  std::uniform_int_distribution<int> pre(0, max_pre), cyc(1, max_cyc),
      let(0, letters - 1);
  Lasso l;
  int np = pre(rng), nc = cyc(rng);
  for (int i = 0; i < np; ++i) l.prefix.push_back(let(rng));
  for (int i = 0; i < nc; ++i) l.cycle.push_back(let(rng));
  return normalize_lasso(l);
}

// Independent emptiness oracle: a run's set of infinitely visited states is
// exactly a reachable "cyclable" state set; enumerate all subsets.
inline bool brute_force_empty(const Gpa& a) {
  int n = a.num_states();
  if (n > 20) throw std::runtime_error("brute_force_empty: too many states");
  // Reachability from the initial state (any letters, any successor).
  std::vector<char> reach(n, 0);
  std::deque<int> q{a.initial};
  reach[a.initial] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (const auto& cell : a.delta[v])
      for (int w : cell)
        if (!reach[w]) {
          reach[w] = 1;
          q.push_back(w);
        }
  }
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool ok = true;
    for (int v = 0; v < n && ok; ++v)
      if ((mask >> v) & 1) ok = reach[v];
    if (!ok) continue;
    // Strong connectivity of the induced subgraph with at least one edge
    // per vertex (closed walk visiting exactly this set).
    auto inside = [&](int v) { return ((mask >> v) & 1) != 0; };
    for (int v = 0; v < n && ok; ++v) {
      if (!inside(v)) continue;
      // BFS within the subset from v must reach all subset members.
      std::vector<char> seen(n, 0);
      std::deque<int> bq{v};
      seen[v] = 1;
      while (!bq.empty()) {
        int x = bq.front();
        bq.pop_front();
        for (const auto& cell : a.delta[x])
          for (int w : cell) {
            if (!inside(w)) continue;
            if (!seen[w]) {
              seen[w] = 1;
              bq.push_back(w);
            }
          }
      }
      bool out_edge = false;
      for (const auto& cell : a.delta[v])
        for (int w : cell) out_edge = out_edge || inside(w);
      ok = out_edge;
      for (int w = 0; w < n && ok; ++w)
        if (inside(w)) ok = seen[w];
    }
    if (!ok) continue;
    std::vector<bool> truth(a.num_conditions());
    for (int j = 0; j < a.num_conditions(); ++j) {
      int m = -1;
      for (int v = 0; v < n; ++v)
        if (inside(v)) m = std::max(m, a.conditions[j][v]);
      truth[j] = m % 2 == 0;
    }
    if (a.formula.eval(truth)) return false;
  }
  return true;
}

}  // namespace ngg::testing
