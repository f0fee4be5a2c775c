// Nash-equilibrium decision procedures for multi-player games on graphs
// whose preferences are binary relations on plays given by deterministic
// 2-track parity automata: profile checking, outcome checking with
// punishment synthesis, (constrained) equilibrium existence with
// finite-memory profile synthesis, the imperfect-information
// prover/challenger game structure, and an exhaustive profile-search
// oracle.
#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ngg/paritysolve.hpp"
#include "ngg/relprops.hpp"

namespace ngg {

// -------------------------------------------------------------------------
// Game: arena plus one strict-preference automaton per player. A deviation
// by player i is profitable when the deviating outcome is accepted as
// strictly preferred to the profile outcome by preference i.
// -------------------------------------------------------------------------
struct Game {
  Arena arena;
  std::map<int, Gpa> preferences;  // player -> 2-track DPA over V x V

  void validate() const {
    arena.validate();
    for (int p = 1; p <= arena.players(); ++p) {
      auto it = preferences.find(p);
      if (it == preferences.end())
        throw input_error("missing preference automaton for player " + std::to_string(p));
      const Gpa& a = it->second;
      if (a.tracks != 2 || a.base1 != arena.size() || a.base2 != arena.size())
        throw input_error("preference alphabet does not match the arena");
      a.check_dpa_shape("game preference");
    }
  }
};

// -------------------------------------------------------------------------
// fix_track: the 1-track language obtained by fixing one track of a 2-track
// automaton to a given lasso. States are (position in the lasso, automaton
// state); the language is {y | (w, y) in L(a)} for track 1.
// -------------------------------------------------------------------------
inline Gpa fix_track(const Gpa& a, int track, const Lasso& w) {
  a.check_dpa_shape("fix_track");
  if (a.tracks != 2) throw input_error("fix_track requires a 2-track automaton");
  int other = track == 1 ? a.base2 : a.base1;
  int fixed = track == 1 ? a.base1 : a.base2;
  for (size_t k = 0; k < w.prefix.size() + w.cycle.size(); ++k)
    if (w.at(k) < 0 || w.at(k) >= fixed)
      throw input_error("fix_track lasso letter outside alphabet");
  int L = w.length();
  int pre = static_cast<int>(w.prefix.size());
  int n = a.num_states();
  auto id = [&](int pos, int q) { return pos * n + q; };
  Gpa out;
  out.tracks = 1;
  out.base1 = other;
  out.base2 = 0;
  out.deterministic = true;
  out.delta.assign(static_cast<size_t>(L) * n, std::vector<std::vector<int>>(other));
  for (int pos = 0; pos < L; ++pos) {
    int nxt = pos + 1 < L ? pos + 1 : pre;
    for (int q = 0; q < n; ++q)
      for (int b = 0; b < other; ++b) {
        int letter = track == 1 ? a.pack(w.at(pos), b) : a.pack(b, w.at(pos));
        out.delta[id(pos, q)][b] = {id(nxt, a.step(q, letter))};
      }
  }
  out.initial = id(0, a.initial);
  out.conditions.assign(a.num_conditions(), std::vector<int>(out.num_states()));
  for (int j = 0; j < a.num_conditions(); ++j)
    for (int pos = 0; pos < L; ++pos)
      for (int q = 0; q < n; ++q)
        out.conditions[j][id(pos, q)] = a.conditions[j][q];
  out.formula = a.formula;
  return out;
}

namespace detail {

// DPA over V accepting exactly the plays from v0 that are consistent with
// every machine of the profile except the skipped player's. State =
// (previous vertex, memory vector on arrival there) plus a start state and
// a rejecting sink.
inline Gpa consistency_automaton(const Arena& arena,
                                 const std::map<int, MealyMachine>& profile,
                                 int skip_player, int v0) {
  int V = arena.size();
  Gpa out;
  out.tracks = 1;
  out.base1 = V;
  out.base2 = 0;
  out.deterministic = true;
  struct Key {
    int prev;
    std::vector<int> mems;
    bool operator<(const Key& o) const {
      return std::tie(prev, mems) < std::tie(o.prev, o.mems);
    }
  };
  std::map<Key, int> index;
  std::vector<Key> keys;
  // State 0 = start, state 1 = sink.
  out.delta.assign(2, std::vector<std::vector<int>>(V));
  auto get = [&](const Key& k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(out.delta.size());
    index.emplace(k, id);
    keys.push_back(k);
    out.delta.emplace_back(V);
    return id;
  };
  std::vector<int> init_mems(arena.players());
  for (int p = 1; p <= arena.players(); ++p) init_mems[p - 1] = profile.at(p).initial;
  for (int v = 0; v < V; ++v) {
    out.delta[0][v] = {v == v0 ? get({v0, init_mems}) : 1};
    out.delta[1][v] = {1};
  }
  for (size_t at = 0; at < keys.size(); ++at) {
    Key k = keys[at];
    int id = index.at(k);
    for (int v = 0; v < V; ++v) {
      bool ok = arena.has_edge(k.prev, v);
      int owner = arena.owner(k.prev);
      if (ok && owner != skip_player)
        ok = profile.at(owner).move(k.mems[owner - 1], k.prev) == v;
      if (!ok) {
        out.delta[id][v] = {1};
        continue;
      }
      Key nxt{v, k.mems};
      for (int p = 1; p <= arena.players(); ++p)
        nxt.mems[p - 1] = profile.at(p).step_memory(nxt.mems[p - 1], k.prev);
      out.delta[id][v] = {get(nxt)};
    }
  }
  out.initial = 0;
  out.conditions.assign(1, std::vector<int>(out.num_states(), 0));
  out.conditions[0][1] = 1;  // sink rejects
  out.formula = Formula::leaf(0);
  return out;
}

}  // namespace detail

// -------------------------------------------------------------------------
// check_ne: a profile is an equilibrium iff no player has a consistent
// deviating play strictly preferred to the profile outcome.
// -------------------------------------------------------------------------
struct NeVerdict {
  bool isNE = true;
  int deviator = 0;                       // player, when isNE is false
  std::optional<Lasso> deviationWitness;  // the deviating outcome
  std::optional<MealyMachine> deviationMachine;
};

inline NeVerdict check_ne(const Game& g, int v0,
                          const std::map<int, MealyMachine>& profile) {
  g.validate();
  Lasso rho = outcome_of_profile(g.arena, profile, v0);
  NeVerdict verdict;
  for (int i = 1; i <= g.arena.players(); ++i) {
    Gpa better = fix_track(g.preferences.at(i), 1, rho);  // {y | rho <_i y}
    Gpa cons = detail::consistency_automaton(g.arena, profile, i, v0);
    Gpa prod = combine({better, cons},
                       Formula::all_of({Formula::leaf(0), Formula::leaf(1)}));
    EmptinessResult e = is_empty(detail::shrink_dpa(prod));
    if (e.empty) continue;
    Lasso y = *e.witness;
    if (!accepts(g.preferences.at(i), rho, y).accepted)
      throw std::logic_error("deviation witness fails the preference re-check");
    verdict.isNE = false;
    verdict.deviator = i;
    verdict.deviationWitness = y;
    verdict.deviationMachine = machine_from_lasso(g.arena, i, y);
    return verdict;
  }
  return verdict;
}

// -------------------------------------------------------------------------
// check_outcome: a play is an equilibrium outcome iff, for every player i
// and every play position owned by i, the coalition of the other players
// can make every deviation of i non-profitable from that point on. The
// test solves, per player, a parity game over (vertex, state of the DPA
// for "not strictly preferred to the play").
// -------------------------------------------------------------------------
struct PunishmentGame {
  int player = 0;
  Gpa tracker;      // DPA over V for {x | NOT (play <_i x)}; state includes
                    // the scripted play position
  ParityGame game;  // nodes (v, q): q = tracker state before reading v
  Solution sol;
  int node(int v, int q) const { return q * num_vertices + v; }
  int num_vertices = 0;
};

struct OutcomeVerdict {
  bool isNEOutcome = true;
  int offender = 0;           // player, when isNEOutcome is false
  int offendingPosition = -1; // position in the play's unfolding
  std::vector<PunishmentGame> punishments;  // one per player, index p-1
};

namespace detail {

inline PunishmentGame build_punishment(const Game& g, int player,
                                       const Gpa& neg_dpa, const Lasso& pi) {
  PunishmentGame pg;
  pg.player = player;
  pg.tracker = fix_track(neg_dpa, 1, pi);
  pg.num_vertices = g.arena.size();
  int V = pg.num_vertices;
  int Q = pg.tracker.num_states();
  for (int q = 0; q < Q; ++q)
    for (int v = 0; v < V; ++v) {
      int id = pg.game.add_vertex(
          g.arena.owner(v) == player ? Side::Odd : Side::Even,
          pg.tracker.conditions[0][q]);
      (void)id;
    }
  for (int q = 0; q < Q; ++q)
    for (int v = 0; v < V; ++v) {
      int nq = pg.tracker.step(q, v);
      for (int w : g.arena.successors(v)) pg.game.succ[pg.node(v, q)].push_back(pg.node(w, nq));
    }
  pg.sol = solve_parity(pg.game);
  return pg;
}

}  // namespace detail

inline OutcomeVerdict check_outcome_with(const Game& g, const Lasso& pi,
                                         const std::vector<Gpa>& neg_dpas) {
  if (!lasso_is_play(g.arena, pi)) throw input_error("outcome lasso is not a play");
  OutcomeVerdict verdict;
  for (int i = 1; i <= g.arena.players(); ++i)
    verdict.punishments.push_back(
        detail::build_punishment(g, i, neg_dpas[i - 1], pi));
  for (int i = 1; i <= g.arena.players() && verdict.isNEOutcome; ++i) {
    const PunishmentGame& pg = verdict.punishments[i - 1];
    // Degenerate self-deviation: if the play is "strictly preferred" to
    // itself (the preference need not be irreflexive), replaying the same
    // play already profits, so no profile with this outcome is stable.
    if (!accepts(neg_dpas[i - 1], pi, pi).accepted) {
      verdict.isNEOutcome = false;
      verdict.offender = i;
      verdict.offendingPosition = -1;
      break;
    }
    // Walk the play; the tracker state determines the whole future, so the
    // walk closes once the state repeats.
    std::set<int> seen;
    int q = pg.tracker.initial;
    for (int n = 0; !seen.count(q); ++n) {
      seen.insert(q);
      int v = pi.at(n);
      if (g.arena.owner(v) == i && !pg.sol.win_even[pg.node(v, q)]) {
        verdict.isNEOutcome = false;
        verdict.offender = i;
        verdict.offendingPosition = n;
        break;
      }
      q = pg.tracker.step(q, v);
    }
  }
  return verdict;
}

inline OutcomeVerdict check_outcome(const Game& g, const Lasso& pi) {
  g.validate();
  std::vector<Gpa> neg;
  for (int i = 1; i <= g.arena.players(); ++i)
    neg.push_back(to_dpa(complement(g.preferences.at(i))));
  return check_outcome_with(g, pi, neg);
}

// -------------------------------------------------------------------------
// Profile synthesis from an equilibrium outcome: every machine follows the
// play, and on observing a deviation switches to the punishment strategy
// against the deviating player (memory = the punishment tracker state).
// -------------------------------------------------------------------------
struct SynthesizedNE {
  Lasso outcome;
  std::map<int, MealyMachine> profile;
};

inline SynthesizedNE synthesize_from_outcome(const Game& g, const Lasso& rho,
                                             const OutcomeVerdict& oc) {
  if (!oc.isNEOutcome) throw input_error("cannot synthesize from a refuted outcome");
  int P = g.arena.players();
  int V = g.arena.size();
  // On-path memory = position in the joint run of all punishment trackers
  // along the play. The joint state determines the whole future (each
  // tracker embeds the play position), so the run closes into a lasso; the
  // play position alone would not do, because tracker states can keep
  // changing across the first few traversals of the play's cycle.
  std::vector<std::vector<int>> joint;  // joint[n][i-1] = tracker_i state before position n
  int wrap = -1;
  {
    std::map<std::vector<int>, int> seen;
    std::vector<int> cur(P);
    for (int i = 1; i <= P; ++i) cur[i - 1] = oc.punishments[i - 1].tracker.initial;
    for (int n = 0;; ++n) {
      auto it = seen.find(cur);
      if (it != seen.end()) {
        wrap = it->second;
        break;
      }
      seen.emplace(cur, n);
      joint.push_back(cur);
      for (int i = 1; i <= P; ++i)
        cur[i - 1] = oc.punishments[i - 1].tracker.step(cur[i - 1], rho.at(n));
    }
  }
  // One extra unrolled state ensures every on-path memory has a unique
  // predecessor play vertex: the wrap target could otherwise be entered
  // both directly (predecessor = the vertex before it in the play) and via
  // the cycle (predecessor = the last cycle vertex), and those may differ.
  int W = static_cast<int>(joint.size());
  joint.push_back(joint[wrap]);
  // Memory layout, shared by all machines: on-path states 0..W (state k
  // expects the play vertex at position k), then per deviating player a
  // block of that player's punishment-tracker states.
  std::vector<int> block(P);
  int total = W + 1;
  for (int i = 1; i <= P; ++i) {
    block[i - 1] = total;
    total += oc.punishments[i - 1].tracker.num_states();
  }
  SynthesizedNE out;
  out.outcome = rho;
  for (int j = 1; j <= P; ++j) {
    MealyMachine m;
    m.player = j;
    m.memory = total;
    m.initial = 0;
    auto fallback = [&](int v) { return g.arena.successors(v).front(); };
    auto punish_move = [&](const PunishmentGame& pg, int v, int q) {
      int target = pg.sol.strategy_even[pg.node(v, q)];
      return target >= 0 ? target % V : fallback(v);
    };
    for (int k = 0; k <= W; ++k) {
      int expected = rho.at(k);
      int nxt = k < W ? k + 1 : wrap + 1;
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
        // Deviation by the owner of the previous play vertex.
        int dev = g.arena.owner(rho.at(k - 1));
        const PunishmentGame& pg = oc.punishments[dev - 1];
        int q = joint[k][dev - 1];  // tracker state before reading v
        m.update[{k, v}] = block[dev - 1] + pg.tracker.step(q, v);
        if (g.arena.owner(v) == j) m.next_move[{k, v}] = punish_move(pg, v, q);
      }
    }
    // Punishment blocks: memory = tracker state before the current vertex.
    for (int dev = 1; dev <= P; ++dev) {
      const PunishmentGame& pg = oc.punishments[dev - 1];
      for (int q = 0; q < pg.tracker.num_states(); ++q)
        for (int v = 0; v < V; ++v) {
          m.update[{block[dev - 1] + q, v}] = block[dev - 1] + pg.tracker.step(q, v);
          if (g.arena.owner(v) == j)
            m.next_move[{block[dev - 1] + q, v}] = punish_move(pg, v, q);
        }
    }
    out.profile[j] = std::move(m);
  }
  return out;
}

// -------------------------------------------------------------------------
// exists_ne: an equilibrium exists from v0 iff some play from v0 passes
// check_outcome. Candidate plays are enumerated shortest-first as lassos;
// the first accepted candidate is synthesized into a finite-memory profile
// and re-verified with check_ne.
// -------------------------------------------------------------------------
struct ExistsNeOptions {
  int max_total_length = 0;        // 0: use max(6, 2 * |V|)
  long long candidate_cap = 200000;
  std::map<int, Lasso> constraints;  // player -> play it must strictly improve on
};

struct ExistsNeResult {
  bool exists = false;
  std::optional<SynthesizedNE> ne;
  long long candidates_tried = 0;
  int searched_length = 0;  // all plays with |prefix|+|cycle| <= this were covered
  bool exhausted = true;    // false when the candidate cap stopped the search
};

inline ExistsNeResult exists_ne(const Game& g, int v0,
                                const ExistsNeOptions& opt = {}) {
  g.validate();
  for (const auto& [p, pi] : opt.constraints) {
    if (p < 1 || p > g.arena.players()) throw input_error("constraint for unknown player");
    if (!lasso_is_play(g.arena, pi)) throw input_error("constraint lasso is not a play");
  }
  std::vector<Gpa> neg;
  for (int i = 1; i <= g.arena.players(); ++i)
    neg.push_back(to_dpa(complement(g.preferences.at(i))));
  int bound = opt.max_total_length > 0 ? opt.max_total_length
                                       : std::max(6, 2 * g.arena.size());
  ExistsNeResult res;
  std::set<Lasso> seen;
  std::vector<std::vector<int>> frontier{{v0}};
  for (int len = 1; len <= bound; ++len) {
    for (const auto& path : frontier) {
      for (size_t k = 0; k < path.size(); ++k) {
        if (!g.arena.has_edge(path.back(), path[k])) continue;
        Lasso cand;
        cand.prefix.assign(path.begin(), path.begin() + k);
        cand.cycle.assign(path.begin() + k, path.end());
        cand = normalize_lasso(cand);
        if (!seen.insert(cand).second) continue;
        if (res.candidates_tried >= opt.candidate_cap) {
          res.exhausted = false;
          res.searched_length = len - 1;
          return res;
        }
        ++res.candidates_tried;
        bool ok = true;
        for (const auto& [p, pi] : opt.constraints)
          ok = ok && accepts(g.preferences.at(p), pi, cand).accepted;
        if (!ok) continue;
        OutcomeVerdict oc = check_outcome_with(g, cand, neg);
        if (!oc.isNEOutcome) continue;
        res.exists = true;
        res.ne = synthesize_from_outcome(g, cand, oc);
        if (outcome_of_profile(g.arena, res.ne->profile, v0) != cand)
          throw std::logic_error("synthesized profile does not replay its outcome");
        if (!check_ne(g, v0, res.ne->profile).isNE)
          throw std::logic_error("synthesized profile fails equilibrium re-check");
        res.searched_length = len;
        return res;
      }
    }
    if (len == bound) break;
    std::vector<std::vector<int>> next;
    for (const auto& path : frontier)
      for (int w : g.arena.successors(path.back())) {
        next.push_back(path);
        next.back().push_back(w);
      }
    frontier = std::move(next);
    res.searched_length = len;
  }
  res.searched_length = bound;
  return res;
}

// -------------------------------------------------------------------------
// Prover/challenger game structure: the three-player imperfect-information
// game whose merged-prover winning condition characterizes equilibrium
// existence. The v component follows the first prover's proposals, the u
// component the actual (possibly deviating) play; the tag names the
// deviating player once one exists. Exposed as an explicit graph with a
// Rabin condition for structural analysis.
// -------------------------------------------------------------------------
struct P1CP2Game {
  enum class Owner { P1, C, P2 };
  struct Node {
    bool intermediate = false;
    int v = 0;
    int tag = 0;  // 0 = no deviation yet, otherwise the deviating player
    int u = 0;
    std::vector<int> q;  // per-player tracker state (complemented preference)
    int c = -1;          // constraint-automaton state, -1 when unconstrained
    int ev = -1, ev2 = -1;  // proposed edge, for intermediates
    Owner owner = Owner::P1;
  };
  std::vector<Node> nodes;
  std::vector<std::vector<int>> succ;
  int initial = 0;
  RabinGame rabin;  // same ids; Even = merged prover, Odd = challenger
  std::vector<Gpa> devAutomata;
  Gpa constraintAutomaton;
  bool hasConstraint = false;

  // Observation of the imperfectly informed prover.
  std::pair<int, int> observation(int id) const {
    const Node& n = nodes[id];
    return n.intermediate ? std::make_pair(n.ev, n.ev2) : std::make_pair(n.v, -1);
  }
};

inline P1CP2Game build_p1cp2(const Game& g, int v0,
                             const std::map<int, Lasso>* constraints = nullptr,
                             size_t max_nodes = 1000000) {
  g.validate();
  P1CP2Game out;
  int P = g.arena.players();
  for (int i = 1; i <= P; ++i)
    out.devAutomata.push_back(to_dpa(complement(g.preferences.at(i))));
  if (constraints && !constraints->empty()) {
    std::vector<Gpa> parts;
    std::vector<Formula> leaves;
    for (const auto& [p, pi] : *constraints) {
      if (!lasso_is_play(g.arena, pi)) throw input_error("constraint lasso is not a play");
      parts.push_back(fix_track(g.preferences.at(p), 1, pi));
      leaves.push_back(Formula::leaf(static_cast<int>(leaves.size())));
    }
    out.constraintAutomaton = to_dpa(combine(parts, Formula::all_of(leaves)));
    out.hasConstraint = true;
  }
  struct Key {
    bool intermediate;
    int v, tag, u, c, ev, ev2;
    std::vector<int> q;
    bool operator<(const Key& o) const {
      return std::tie(intermediate, v, tag, u, c, ev, ev2, q) <
             std::tie(o.intermediate, o.v, o.tag, o.u, o.c, o.ev, o.ev2, o.q);
    }
  };
  std::map<Key, int> index;
  std::deque<int> work;
  auto owner_of = [&](const Key& k) {
    if (!k.intermediate) return P1CP2Game::Owner::P1;
    if (k.tag == 0) return P1CP2Game::Owner::C;
    return g.arena.owner(k.u) == k.tag ? P1CP2Game::Owner::C : P1CP2Game::Owner::P2;
  };
  auto get = [&](const Key& k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    if (out.nodes.size() >= max_nodes)
      throw cap_exceeded("prover/challenger game node cap exceeded");
    int id = static_cast<int>(out.nodes.size());
    index.emplace(k, id);
    P1CP2Game::Node n;
    n.intermediate = k.intermediate;
    n.v = k.v;
    n.tag = k.tag;
    n.u = k.u;
    n.q = k.q;
    n.c = k.c;
    n.ev = k.ev;
    n.ev2 = k.ev2;
    n.owner = owner_of(k);
    out.nodes.push_back(std::move(n));
    out.succ.emplace_back();
    work.push_back(id);
    return id;
  };
  Key init;
  init.intermediate = false;
  init.v = v0;
  init.tag = 0;
  init.u = v0;
  init.ev = init.ev2 = -1;
  for (int i = 1; i <= P; ++i)
    init.q.push_back(out.devAutomata[i - 1].step(
        out.devAutomata[i - 1].initial,
        out.devAutomata[i - 1].pack(v0, v0)));
  init.c = out.hasConstraint
               ? out.constraintAutomaton.step(out.constraintAutomaton.initial, v0)
               : -1;
  out.initial = get(init);
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    Key k;
    {
      const auto& n = out.nodes[id];
      k = Key{n.intermediate, n.v, n.tag, n.u, n.c, n.ev, n.ev2, n.q};
    }
    std::vector<int> targets;
    if (!k.intermediate) {
      // The first prover proposes an edge of the v component.
      for (int vp : g.arena.successors(k.v)) {
        Key nxt = k;
        nxt.intermediate = true;
        nxt.ev = k.v;
        nxt.ev2 = vp;
        targets.push_back(get(nxt));
      }
    } else {
      // The u component moves: follow the proposal or (first time) deviate.
      for (int up : g.arena.successors(k.u)) {
        Key nxt;
        nxt.intermediate = false;
        nxt.v = k.ev2;
        nxt.u = up;
        nxt.tag = k.tag != 0 ? k.tag : (up == k.ev2 ? 0 : g.arena.owner(k.u));
        nxt.ev = nxt.ev2 = -1;
        nxt.q = k.q;
        for (int i = 1; i <= P; ++i)
          nxt.q[i - 1] = out.devAutomata[i - 1].step(
              k.q[i - 1], out.devAutomata[i - 1].pack(k.ev2, up));
        nxt.c = out.hasConstraint ? out.constraintAutomaton.step(k.c, k.ev2) : -1;
        targets.push_back(get(nxt));
      }
    }
    out.succ[id] = std::move(targets);
  }
  // Rabin condition. The acceptance pair (or its constrained refinement)
  // rewards deviation-free plays; per player and even priority level, a
  // deviation pair rewards plays where that player deviated without strict
  // profit. Intermediate nodes belong to no pair.
  int N = static_cast<int>(out.nodes.size());
  out.rabin.owner.resize(N);
  out.rabin.succ = out.succ;
  for (int id = 0; id < N; ++id)
    out.rabin.owner[id] =
        out.nodes[id].owner == P1CP2Game::Owner::C ? Side::Odd : Side::Even;
  auto p1 = [&](int id) { return !out.nodes[id].intermediate; };
  if (!out.hasConstraint) {
    std::vector<char> E(N, 0), F(N, 0);
    for (int id = 0; id < N; ++id)
      if (p1(id) && out.nodes[id].tag == 0) F[id] = 1;
    out.rabin.pairs.emplace_back(std::move(E), std::move(F));
  } else {
    int maxp = out.constraintAutomaton.max_priority(0);
    for (int p = 0; p <= maxp; p += 2) {
      std::vector<char> E(N, 0), F(N, 0);
      bool realized = false;
      for (int id = 0; id < N; ++id) {
        if (!p1(id)) continue;
        int gamma = out.constraintAutomaton.conditions[0][out.nodes[id].c];
        if (out.nodes[id].tag != 0 || gamma > p) E[id] = 1;
        if (out.nodes[id].tag == 0 && gamma == p) {
          F[id] = 1;
          realized = true;
        }
      }
      if (realized) out.rabin.pairs.emplace_back(std::move(E), std::move(F));
    }
  }
  for (int j = 1; j <= P; ++j) {
    const Gpa& d = out.devAutomata[j - 1];
    int maxp = d.max_priority(0);
    for (int p = 0; p <= maxp; p += 2) {
      std::vector<char> E(N, 0), F(N, 0);
      bool realized = false;
      for (int id = 0; id < N; ++id) {
        if (!p1(id)) continue;
        int beta = d.conditions[0][out.nodes[id].q[j - 1]];
        if (out.nodes[id].tag != j || beta > p) E[id] = 1;
        if (out.nodes[id].tag == j && beta == p) {
          F[id] = 1;
          realized = true;
        }
      }
      if (realized) out.rabin.pairs.emplace_back(std::move(E), std::move(F));
    }
  }
  return out;
}

// -------------------------------------------------------------------------
// oracle_search: exhaustive enumeration of Mealy-machine profiles up to a
// memory bound, with an exact profitable-deviation test per profile (the
// deviation search covers every finite-memory deviation, not only the
// bounded ones, via a product-graph cycle search).
// -------------------------------------------------------------------------
struct OracleReport {
  std::vector<std::map<int, MealyMachine>> neProfiles;
  struct Refutation {
    std::map<int, MealyMachine> profile;
    int deviator = 0;
    Lasso witness;
  };
  std::vector<Refutation> refutations;  // stored up to refutation_cap
  long long profilesTested = 0;
  long long refuted = 0;
};

namespace detail {

// Flat machine representation for fast enumeration.
struct FlatMachine {
  int memory = 1;
  std::vector<int> update;  // memory * V entries
  std::vector<int> move;    // memory * V entries, -1 where not owned
};

inline MealyMachine to_mealy(const Arena& a, int player, const FlatMachine& f) {
  MealyMachine m;
  m.player = player;
  m.memory = f.memory;
  m.initial = 0;
  int V = a.size();
  for (int s = 0; s < f.memory; ++s)
    for (int v = 0; v < V; ++v) {
      m.update[{s, v}] = f.update[s * V + v];
      if (f.move[s * V + v] >= 0) m.next_move[{s, v}] = f.move[s * V + v];
    }
  return m;
}

// All machines of a player with exactly `memory` states (full tables).
inline void enumerate_flat(const Arena& a, int player, int memory,
                           const std::function<void(const FlatMachine&)>& emit) {
  int V = a.size();
  std::vector<int> owned;
  for (int v = 0; v < V; ++v)
    if (a.owner(v) == player) owned.push_back(v);
  FlatMachine f;
  f.memory = memory;
  f.update.assign(static_cast<size_t>(memory) * V, 0);
  f.move.assign(static_cast<size_t>(memory) * V, -1);
  // Odometer over all update entries and all owned-move entries.
  struct Slot { bool is_move; int idx; int limit; };
  std::vector<Slot> slots;
  for (int s = 0; s < memory; ++s)
    for (int v = 0; v < V; ++v) slots.push_back({false, s * V + v, memory});
  for (int s = 0; s < memory; ++s)
    for (int v : owned)
      slots.push_back({true, s * V + v, static_cast<int>(a.successors(v).size())});
  std::vector<int> digit(slots.size(), 0);
  auto apply = [&]() {
    for (size_t t = 0; t < slots.size(); ++t) {
      if (slots[t].is_move) {
        int v = slots[t].idx % V;
        f.move[slots[t].idx] = a.successors(v)[digit[t]];
      } else {
        f.update[slots[t].idx] = digit[t];
      }
    }
  };
  for (;;) {
    apply();
    emit(f);
    size_t t = 0;
    for (; t < slots.size(); ++t) {
      if (++digit[t] < slots[t].limit) break;
      digit[t] = 0;
    }
    if (t == slots.size()) break;
  }
}

// Exact profitable-deviation check for one player against the rest of a
// flat profile: a profitable deviation exists iff the product of the
// "plays consistent with the others" graph and the DPA for "strictly
// preferred to rho" has a reachable even-dominated cycle.
inline std::optional<Lasso> profitable_deviation(
    const Arena& a, const std::vector<FlatMachine>& flat, int i, int v0,
    const Gpa& pref_dpa, const Lasso& rho) {
  Gpa better = fix_track(pref_dpa, 1, rho);  // single condition, DPA shape
  int V = a.size();
  int P = static_cast<int>(flat.size());
  struct Key {
    int v;
    std::vector<int> mems;
    int q;
    bool operator<(const Key& o) const {
      return std::tie(v, mems, q) < std::tie(o.v, o.mems, o.q);
    }
  };
  std::map<Key, int> index;
  std::vector<Key> keys;
  std::vector<std::vector<int>> succ;
  auto get = [&](const Key& k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(keys.size());
    index.emplace(k, id);
    keys.push_back(k);
    succ.emplace_back();
    return id;
  };
  Key init{v0, std::vector<int>(P, 0), better.step(better.initial, v0)};
  int root = get(init);
  for (size_t at = 0; at < keys.size(); ++at) {
    Key k = keys[at];
    std::vector<int> mems2 = k.mems;
    for (int p = 0; p < P; ++p) mems2[p] = flat[p].update[k.mems[p] * V + k.v];
    int owner = a.owner(k.v);
    std::vector<int> moves;
    if (owner == i)
      moves = a.successors(k.v);
    else
      moves = {flat[owner - 1].move[k.mems[owner - 1] * V + k.v]};
    std::vector<int> targets;
    for (int w : moves) targets.push_back(get({w, mems2, better.step(k.q, w)}));
    succ[at] = std::move(targets);
  }
  // Reachable even-dominated cycle in the product; all states reachable by
  // construction. For each even target priority p, look for a cycle within
  // {prio <= p} through a priority-p state.
  int n = static_cast<int>(keys.size());
  auto prio = [&](int s) { return better.conditions[0][keys[s].q]; };
  int maxp = 0;
  for (int s = 0; s < n; ++s) maxp = std::max(maxp, prio(s));
  for (int p = 0; p <= maxp; p += 2) {
    for (int s = 0; s < n; ++s) {
      if (prio(s) != p) continue;
      // Self-reach within {prio <= p}.
      std::vector<int> prev(n, -2);
      std::deque<int> bfs;
      for (int w : succ[s])
        if (prio(w) <= p && prev[w] == -2) {
          prev[w] = s == w ? -3 : s;
          bfs.push_back(w);
        }
      while (!bfs.empty()) {
        int x = bfs.front();
        bfs.pop_front();
        for (int w : succ[x])
          if (prio(w) <= p && prev[w] == -2) {
            prev[w] = x;
            bfs.push_back(w);
          }
      }
      if (prev[s] == -2) continue;
      // Reconstruct: path root -> s (arbitrary), then s -> s.
      std::vector<int> cyc;
      for (int x = s; ; ) {
        cyc.push_back(x);
        if (prev[x] == -3 || prev[x] == s) break;
        x = prev[x];
        if (x == s) break;
      }
      std::reverse(cyc.begin(), cyc.end());
      std::vector<int> pre(n, -1);
      std::vector<char> seen(n, 0);
      std::deque<int> q2{root};
      seen[root] = 1;
      while (!q2.empty()) {
        int x = q2.front();
        q2.pop_front();
        for (int w : succ[x])
          if (!seen[w]) {
            seen[w] = 1;
            pre[w] = x;
            q2.push_back(w);
          }
      }
      std::vector<int> path;
      for (int x = s; x != -1; x = pre[x]) path.push_back(x);
      std::reverse(path.begin(), path.end());
      Lasso y;
      for (int x : path) y.prefix.push_back(keys[x].v);
      y.prefix.pop_back();  // s itself starts the cycle
      y.cycle.push_back(keys[s].v);
      for (size_t t = 0; t + 1 < cyc.size(); ++t) y.cycle.push_back(keys[cyc[t]].v);
      return normalize_lasso(y);
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline OracleReport oracle_search(const Game& g, int v0, int memoryBound,
                                  long long profileCap = 100000,
                                  size_t refutationCap = 1000) {
  g.validate();
  int P = g.arena.players();
  std::vector<Gpa> pref_dpas;
  for (int i = 1; i <= P; ++i) pref_dpas.push_back(to_dpa(g.preferences.at(i)));
  // Per-player machine lists (exact memory 1..bound, full tables).
  std::vector<std::vector<detail::FlatMachine>> machines(P);
  long long total = 1;
  for (int p = 1; p <= P; ++p) {
    for (int mem = 1; mem <= memoryBound; ++mem)
      detail::enumerate_flat(g.arena, p, mem, [&](const detail::FlatMachine& f) {
        machines[p - 1].push_back(f);
        if (static_cast<long long>(machines[p - 1].size()) > profileCap)
          throw cap_exceeded("oracle machine enumeration cap exceeded");
      });
    total *= static_cast<long long>(machines[p - 1].size());
    if (total > profileCap) throw cap_exceeded("oracle profile cap exceeded");
  }
  OracleReport report;
  std::vector<size_t> pick(P, 0);
  // Verdict cache: keyed by the outcome plus the deviation-relevant part of
  // the profile (everyone's full tables matter for consistency, except that
  // in one-player games only the outcome matters).
  std::map<Lasso, std::pair<bool, std::pair<int, Lasso>>> solo_cache;
  int V = g.arena.size();
  std::vector<int> mems(P), arrive(P);
  for (;;) {
    std::vector<const detail::FlatMachine*> flat(P);
    for (int p = 0; p < P; ++p) flat[p] = &machines[p][pick[p]];
    ++report.profilesTested;
    // Outcome by flat simulation.
    Lasso rho;
    {
      std::map<std::pair<int, std::vector<int>>, int> seen;
      std::vector<int> word;
      std::fill(mems.begin(), mems.end(), 0);
      int v = v0;
      for (;;) {
        auto key = std::make_pair(v, mems);
        auto it = seen.find(key);
        if (it != seen.end()) {
          rho.prefix.assign(word.begin(), word.begin() + it->second);
          rho.cycle.assign(word.begin() + it->second, word.end());
          rho = normalize_lasso(rho);
          break;
        }
        seen[key] = static_cast<int>(word.size());
        word.push_back(v);
        int owner = g.arena.owner(v);
        int next = flat[owner - 1]->move[mems[owner - 1] * V + v];
        for (int p = 0; p < P; ++p) mems[p] = flat[p]->update[mems[p] * V + v];
        v = next;
      }
    }
    bool is_ne = true;
    int deviator = 0;
    Lasso witness;
    bool cached = false;
    if (P == 1) {
      auto it = solo_cache.find(rho);
      if (it != solo_cache.end()) {
        is_ne = it->second.first;
        deviator = it->second.second.first;
        witness = it->second.second.second;
        cached = true;
      }
    }
    if (!cached) {
      std::vector<detail::FlatMachine> flats;
      for (int p = 0; p < P; ++p) flats.push_back(*flat[p]);
      for (int i = 1; i <= P && is_ne; ++i) {
        auto dev = detail::profitable_deviation(g.arena, flats, i, v0,
                                                pref_dpas[i - 1], rho);
        if (dev) {
          if (!accepts(g.preferences.at(i), rho, *dev).accepted)
            throw std::logic_error("oracle deviation fails the preference re-check");
          is_ne = false;
          deviator = i;
          witness = *dev;
        }
      }
      if (P == 1) solo_cache[rho] = {is_ne, {deviator, witness}};
    }
    if (is_ne) {
      std::map<int, MealyMachine> profile;
      for (int p = 1; p <= P; ++p)
        profile[p] = detail::to_mealy(g.arena, p, *flat[p - 1]);
      report.neProfiles.push_back(std::move(profile));
    } else {
      ++report.refuted;
      if (report.refutations.size() < refutationCap) {
        OracleReport::Refutation r;
        for (int p = 1; p <= P; ++p)
          r.profile[p] = detail::to_mealy(g.arena, p, *flat[p - 1]);
        r.deviator = deviator;
        r.witness = witness;
        report.refutations.push_back(std::move(r));
      }
    }
    int p = 0;
    for (; p < P; ++p) {
      if (++pick[p] < machines[p].size()) break;
      pick[p] = 0;
    }
    if (p == P) break;
  }
  return report;
}

}  // namespace ngg
