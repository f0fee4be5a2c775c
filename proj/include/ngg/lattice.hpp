// Machinery for preorders on plays given by 2-track parity automata:
// equivalence-class enumeration through lasso representatives, embedding of
// partial preorders into total ones, threshold games ("achieve at least /
// concede at most this class"), per-vertex values, and the value-based
// equilibrium-outcome characterization for total prefix-independent or
// prefix-linear preorders.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ngg/nash.hpp"
#include "ngg/paritysolve.hpp"
#include "ngg/relprops.hpp"

namespace ngg {

// -------------------------------------------------------------------------
// ClassLattice: one lasso representative per discovered equivalence class,
// with the preorder restricted to representatives.
// -------------------------------------------------------------------------
struct ClassLattice {
  std::vector<Lasso> representatives;
  std::vector<std::vector<char>> order;  // order[a][b]: rep_a <= rep_b
  bool complete = false;

  int size() const { return static_cast<int>(representatives.size()); }
};

namespace detail {

// All normalized lasso plays of the arena with total length <= bound.
inline std::vector<Lasso> arena_lassos(const Arena& arena, int bound) {
  std::set<Lasso> found;
  std::vector<int> path;
  std::function<void()> dfs = [&]() {
    for (size_t k = 0; k < path.size(); ++k) {
      if (!arena.has_edge(path.back(), path[k])) continue;
      Lasso l;
      l.prefix.assign(path.begin(), path.begin() + k);
      l.cycle.assign(path.begin() + k, path.end());
      found.insert(normalize_lasso(l));
    }
    if (static_cast<int>(path.size()) >= bound) return;
    for (int w : arena.successors(path.back())) {
      path.push_back(w);
      dfs();
      path.pop_back();
    }
  };
  for (int v = 0; v < arena.size(); ++v) {
    path = {v};
    dfs();
  }
  return {found.begin(), found.end()};
}

// Index of the class of x among the representatives, or -1.
inline int class_of(const Gpa& r, const std::vector<Lasso>& reps, const Lasso& x) {
  for (size_t c = 0; c < reps.size(); ++c)
    if (accepts(r, x, reps[c]).accepted && accepts(r, reps[c], x).accepted)
      return static_cast<int>(c);
  return -1;
}

}  // namespace detail

inline ClassLattice enumerate_classes(const Gpa& r, const Arena& arena, int bound) {
  if (bound < 1) throw input_error("class enumeration bound must be positive");
  r.check_dpa_shape("enumerate_classes");
  if (r.tracks != 2 || r.base1 != arena.size() || r.base2 != arena.size())
    throw input_error("relation alphabet does not match the arena");
  ClassLattice lat;
  for (const Lasso& x : detail::arena_lassos(arena, bound))
    if (detail::class_of(r, lat.representatives, x) < 0)
      lat.representatives.push_back(x);
  int n = lat.size();
  lat.order.assign(n, std::vector<char>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      lat.order[a][b] =
          accepts(r, lat.representatives[a], lat.representatives[b]).accepted;
  // Completeness probe: no new class among strictly longer lassos.
  lat.complete = true;
  for (const Lasso& x : detail::arena_lassos(arena, bound + arena.size()))
    if (detail::class_of(r, lat.representatives, x) < 0) {
      lat.complete = false;
      break;
    }
  return lat;
}

// Embeds a partial preorder on classes into a total one by topological
// sorting, breaking ties by the smallest representative. Representative
// list order is preserved; only the order matrix is completed.
inline ClassLattice embed_total(const ClassLattice& lat) {
  int n = lat.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && lat.order[a][b] && lat.order[b][a])
        throw input_error("order matrix has a cycle (input is not a class order)");
  // Kahn's algorithm; among available classes pick the smallest representative.
  std::vector<int> indegree(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && lat.order[a][b]) ++indegree[b];
  std::vector<int> rank(n, -1);
  std::vector<char> placed(n, 0);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int c = 0; c < n; ++c) {
      if (placed[c] || indegree[c] != 0) continue;
      if (pick < 0 || lat.representatives[c] < lat.representatives[pick]) pick = c;
    }
    if (pick < 0) throw input_error("order matrix has a cycle (input is not a class order)");
    rank[pick] = step;
    placed[pick] = 1;
    for (int b = 0; b < n; ++b)
      if (b != pick && lat.order[pick][b]) --indegree[b];
  }
  ClassLattice out = lat;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.order[a][b] = rank[a] <= rank[b];
  return out;
}

// -------------------------------------------------------------------------
// Threshold games: from which vertices can player i force a play at least
// as good as rho; from which vertices can the coalition force a play at
// most as good as rho.
// -------------------------------------------------------------------------
enum class ThresholdDir { AtLeast, AtMost };

struct ThresholdGame {
  Gpa objective;    // 1-track DPA over V for the winning plays
  ParityGame game;  // nodes (v, q): q = objective state before reading v
  Solution sol;
  int num_vertices = 0;
  int node(int v, int q) const { return q * num_vertices + v; }
  int start(int v) const { return node(v, objective.initial); }
};

namespace detail {

// Parity game over (arena vertex, DPA state before reading the vertex).
inline ThresholdGame dpa_arena_game(const Arena& arena, Gpa objective,
                                    const std::function<bool(int)>& even_owner) {
  ThresholdGame tg;
  tg.objective = std::move(objective);
  tg.num_vertices = arena.size();
  int V = tg.num_vertices;
  int Q = tg.objective.num_states();
  for (int q = 0; q < Q; ++q)
    for (int v = 0; v < V; ++v)
      tg.game.add_vertex(even_owner(v) ? Side::Even : Side::Odd,
                         tg.objective.conditions[0][q]);
  for (int q = 0; q < Q; ++q)
    for (int v = 0; v < V; ++v) {
      int nq = tg.objective.step(q, v);
      for (int w : arena.successors(v))
        tg.game.succ[tg.node(v, q)].push_back(tg.node(w, nq));
    }
  tg.sol = solve_parity(tg.game);
  return tg;
}

}  // namespace detail

inline ThresholdGame threshold_solve(const Game& g, int i, const Lasso& rho,
                                     ThresholdDir dir) {
  g.validate();
  if (!lasso_is_play(g.arena, rho)) throw input_error("threshold lasso is not a play");
  const Gpa& r = g.preferences.at(i);
  Gpa objective = dir == ThresholdDir::AtLeast
                      ? to_dpa(fix_track(r, 1, rho))   // {x | rho <= x}
                      : to_dpa(fix_track(r, 2, rho));  // {x | x <= rho}
  bool even_is_i = dir == ThresholdDir::AtLeast;
  return detail::dpa_arena_game(
      g.arena, std::move(objective),
      [&g, i, even_is_i](int v) { return (g.arena.owner(v) == i) == even_is_i; });
}

// -------------------------------------------------------------------------
// Values: the best class player i can guarantee from each vertex; checked
// against the class the coalition can cap the play at.
// -------------------------------------------------------------------------
struct PlayerValues {
  int player = 0;
  ClassLattice lattice;          // total
  std::vector<int> value_class;  // per vertex, index into lattice
  std::vector<ThresholdGame> at_least;  // per class
  std::vector<ThresholdGame> at_most;   // per class
};

using ValueTable = std::map<int, PlayerValues>;

inline PlayerValues compute_values(const Game& g, int i, const ClassLattice& lat) {
  g.validate();
  if (!lat.complete)
    throw input_error("vertex values require a complete class lattice");
  int n = lat.size();
  if (n == 0) throw input_error("vertex values require at least one class");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (!lat.order[a][b] && !lat.order[b][a])
        throw input_error("vertex values require a total class order");
  PlayerValues out;
  out.player = i;
  out.lattice = lat;
  for (int c = 0; c < n; ++c) {
    out.at_least.push_back(
        threshold_solve(g, i, lat.representatives[c], ThresholdDir::AtLeast));
    out.at_most.push_back(
        threshold_solve(g, i, lat.representatives[c], ThresholdDir::AtMost));
  }
  // Classes in descending order.
  std::vector<int> descending;
  for (int c = 0; c < n; ++c) descending.push_back(c);
  std::sort(descending.begin(), descending.end(),
            [&](int a, int b) { return lat.order[b][a] && a != b; });
  out.value_class.assign(g.arena.size(), -1);
  for (int v = 0; v < g.arena.size(); ++v) {
    for (int c : descending)
      if (out.at_least[c].sol.win_even[out.at_least[c].start(v)]) {
        out.value_class[v] = c;
        break;
      }
    if (out.value_class[v] < 0)
      throw input_error("no class achievable from a vertex (incomplete lattice?)");
    int c = out.value_class[v];
    if (!out.at_most[c].sol.win_even[out.at_most[c].start(v)])
      throw input_error(
          "lower and upper values disagree (non-total preference or incomplete lattice)");
  }
  return out;
}

// -------------------------------------------------------------------------
// Equilibrium-outcome characterization for total preorders: the play is an
// equilibrium outcome iff at every position owned by player i, the value of
// that vertex is at most the class of the play (prefix-independent) or of
// the play's suffix from that position (prefix-linear). On success a
// witnessing profile is assembled from the play and the stored coalition
// capping strategies.
// -------------------------------------------------------------------------
enum class PrefixMode { Independent, Linear };

struct CharacterizationResult {
  bool holds = true;
  int offender = 0;
  int offendingPosition = -1;
  std::optional<std::map<int, MealyMachine>> profile;
};

inline CharacterizationResult characterize_outcome(const Game& g, const Lasso& rho,
                                                   const ValueTable& values,
                                                   PrefixMode mode) {
  g.validate();
  if (!lasso_is_play(g.arena, rho)) throw input_error("outcome lasso is not a play");
  for (int i = 1; i <= g.arena.players(); ++i)
    if (!values.count(i)) throw input_error("value table missing a player");
  int L = rho.length();
  CharacterizationResult res;
  // Per player, the class of the whole play (prefix-independent) or of each
  // suffix (prefix-linear).
  auto target_class = [&](int i, int n) {
    const PlayerValues& pv = values.at(i);
    Lasso ref = mode == PrefixMode::Independent ? rho : rho.suffix(n);
    int c = detail::class_of(g.preferences.at(i), pv.lattice.representatives, ref);
    if (c < 0) throw input_error("play class not covered by the lattice");
    return c;
  };
  for (int n = 0; n < L && res.holds; ++n) {
    int v = rho.at(n);
    int i = g.arena.owner(v);
    const PlayerValues& pv = values.at(i);
    int vc = pv.value_class[v];
    int tc = target_class(i, n);
    if (!pv.lattice.order[vc][tc]) {
      res.holds = false;
      res.offender = i;
      res.offendingPosition = n;
    }
  }
  if (!res.holds) return res;
  // Witnessing profile: follow the play; on a deviation by the owner of the
  // previous play vertex, the coalition caps the continuation at that
  // vertex's value with the stored at-most strategy.
  int V = g.arena.size();
  int pre = static_cast<int>(rho.prefix.size());
  // On-path memory = play position, unrolled one state past the cycle seam
  // so that each memory state has a unique predecessor play vertex.
  // Punishment blocks, one per (deviator, value class at the deviation
  // vertex) pair in use.
  std::map<std::pair<int, int>, int> block;  // (player, class) -> offset
  int total = L + 1;
  for (int m = 0; m <= L; ++m) {
    int dev = g.arena.owner(rho.at(m));
    int c = values.at(dev).value_class[rho.at(m)];
    if (block.emplace(std::make_pair(dev, c), total).second)
      total += values.at(dev).at_most[c].objective.num_states();
  }
  std::map<int, MealyMachine> profile;
  for (int j = 1; j <= g.arena.players(); ++j) {
    MealyMachine m;
    m.player = j;
    m.memory = total;
    m.initial = 0;
    auto fallback = [&](int v) { return g.arena.successors(v).front(); };
    auto punish_move = [&](const ThresholdGame& tg, int v, int q) {
      int target = tg.sol.strategy_even[tg.node(v, q)];
      return target >= 0 ? target % V : fallback(v);
    };
    for (int k = 0; k <= L; ++k) {
      int expected = rho.at(k);
      int nxt = k < L ? k + 1 : pre + 1;
      for (int v = 0; v < V; ++v) {
        if (v == expected) {
          m.update[{k, v}] = nxt;
          if (g.arena.owner(v) == j) m.next_move[{k, v}] = rho.at(k + 1);
          continue;
        }
        if (k == 0) {  // no predecessor: unreachable in well-formed use
          m.update[{k, v}] = k;
          if (g.arena.owner(v) == j) m.next_move[{k, v}] = fallback(v);
          continue;
        }
        int prev = rho.at(k - 1);
        int dev = g.arena.owner(prev);
        int c = values.at(dev).value_class[prev];
        const ThresholdGame& tg = values.at(dev).at_most[c];
        int q = tg.objective.step(tg.objective.initial, prev);
        int offset = block.at({dev, c});
        m.update[{k, v}] = offset + tg.objective.step(q, v);
        if (g.arena.owner(v) == j) m.next_move[{k, v}] = punish_move(tg, v, q);
      }
    }
    for (const auto& [key, offset] : block) {
      const ThresholdGame& tg = values.at(key.first).at_most[key.second];
      for (int q = 0; q < tg.objective.num_states(); ++q)
        for (int v = 0; v < V; ++v) {
          m.update[{offset + q, v}] = offset + tg.objective.step(q, v);
          if (g.arena.owner(v) == j) m.next_move[{offset + q, v}] = punish_move(tg, v, q);
        }
    }
    profile[j] = std::move(m);
  }
  res.profile = std::move(profile);
  return res;
}

}  // namespace ngg
