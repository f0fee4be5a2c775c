// Automata over 1- and 2-track vertex alphabets with positive Boolean
// combinations of max-parity (even wins) conditions: membership, product,
// complement, projection, emptiness, universality.
#pragma once

#include <cassert>
#include <deque>
#include <functional>
#include <optional>

#include "ngg/core.hpp"

namespace ngg {

// -------------------------------------------------------------------------
// Positive Boolean formula (AND/OR tree, no negation) over condition indices.
// -------------------------------------------------------------------------
struct Formula {
  enum class Kind { Leaf, And, Or };
  Kind kind = Kind::Leaf;
  int cond = 0;                 // Leaf only
  std::vector<Formula> kids;    // And/Or only

  static Formula leaf(int c) {
    Formula f;
    f.kind = Kind::Leaf;
    f.cond = c;
    return f;
  }
  static Formula node(Kind k, std::vector<Formula> kids) {
    if (kids.size() == 1) return kids.front();
    Formula f;
    f.kind = k;
    f.kids = std::move(kids);
    return f;
  }
  static Formula all_of(std::vector<Formula> kids) { return node(Kind::And, std::move(kids)); }
  static Formula any_of(std::vector<Formula> kids) { return node(Kind::Or, std::move(kids)); }

  bool eval(const std::vector<bool>& truth) const {
    switch (kind) {
      case Kind::Leaf:
        return truth.at(cond);
      case Kind::And:
        for (const auto& k : kids)
          if (!k.eval(truth)) return false;
        return true;
      case Kind::Or:
        for (const auto& k : kids)
          if (k.eval(truth)) return true;
        return false;
    }
    return false;
  }

  Formula dual() const {
    Formula f = *this;
    if (kind == Kind::And) f.kind = Kind::Or;
    else if (kind == Kind::Or) f.kind = Kind::And;
    for (auto& k : f.kids) k = k.dual();
    return f;
  }

  Formula shifted(int offset) const {
    Formula f = *this;
    if (kind == Kind::Leaf) f.cond += offset;
    for (auto& k : f.kids) k = k.shifted(offset);
    return f;
  }

  // Replaces leaf i by subst[i].
  Formula substituted(const std::vector<Formula>& subst) const {
    if (kind == Kind::Leaf) return subst.at(cond);
    Formula f = *this;
    for (auto& k : f.kids) k = k.substituted(subst);
    return f;
  }

  void collect_conds(std::set<int>& out) const {
    if (kind == Kind::Leaf) out.insert(cond);
    for (const auto& k : kids) k.collect_conds(out);
  }

  std::string str() const {
    if (kind == Kind::Leaf) return "c" + std::to_string(cond);
    std::string s = kind == Kind::And ? "AND(" : "OR(";
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ",";
      s += kids[i].str();
    }
    return s + ")";
  }
};

// Minimal satisfying condition sets of a positive formula, by subset
// enumeration (formulas in this artifact have few conditions).
inline std::vector<std::vector<int>> minimal_satisfying_sets(const Formula& f,
                                                             int num_conds) {
  if (num_conds > 20) throw cap_exceeded("formula with too many conditions");
  std::vector<std::vector<int>> minimal;
  std::vector<uint32_t> minimal_masks;
  for (uint32_t mask = 0; mask < (1u << num_conds); ++mask) {
    std::vector<bool> truth(num_conds);
    for (int j = 0; j < num_conds; ++j) truth[j] = (mask >> j) & 1;
    if (!f.eval(truth)) continue;
    bool dominated = false;
    for (uint32_t m : minimal_masks)
      if ((m & mask) == m) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    minimal_masks.push_back(mask);
    std::vector<int> set;
    for (int j = 0; j < num_conds; ++j)
      if ((mask >> j) & 1) set.push_back(j);
    minimal.push_back(std::move(set));
  }
  return minimal;
}

// -------------------------------------------------------------------------
// GeneralizedParityAutomaton. Letters are dense integers; a 2-track letter
// packs (a, b) as a * base2 + b, where a ranges over [0, base1) and b over
// [0, base2). A run is accepting iff the formula holds with condition j
// true exactly when the maximum condition-j priority visited infinitely
// often is even.
// -------------------------------------------------------------------------
struct Gpa {
  int tracks = 1;
  int base1 = 0;
  int base2 = 0;  // 0 when tracks == 1
  int initial = 0;
  bool deterministic = true;
  // delta[state][letter] = sorted successor list (singleton when deterministic).
  std::vector<std::vector<std::vector<int>>> delta;
  // conditions[j][state] = priority of state under condition j.
  std::vector<std::vector<int>> conditions;
  Formula formula = Formula::leaf(0);

  int num_states() const { return static_cast<int>(delta.size()); }
  int num_conditions() const { return static_cast<int>(conditions.size()); }
  int alphabet_size() const { return tracks == 1 ? base1 : base1 * base2; }
  int pack(int a, int b) const { return a * base2 + b; }

  int step(int q, int letter) const {
    const auto& s = delta[q][letter];
    if (s.size() != 1) throw input_error("automaton is not deterministic/complete");
    return s[0];
  }

  bool is_complete_deterministic() const {
    for (const auto& row : delta)
      for (const auto& cell : row)
        if (cell.size() != 1) return false;
    return true;
  }

  void check_dpa_shape(const char* op) const {
    if (!deterministic || !is_complete_deterministic())
      throw input_error(std::string(op) + " requires a deterministic complete automaton");
  }

  int max_priority(int cond) const {
    int m = 0;
    for (int p : conditions[cond]) m = std::max(m, p);
    return m;
  }
};

// Adds a rejecting sink (fresh odd priority per condition) for missing
// (state, letter) entries; no-op if already complete.
inline Gpa auto_complete(Gpa a) {
  bool missing = false;
  for (const auto& row : a.delta)
    for (const auto& cell : row)
      if (cell.empty()) missing = true;
  if (!missing) return a;
  int sink = a.num_states();
  a.delta.emplace_back(a.alphabet_size());
  for (int l = 0; l < a.alphabet_size(); ++l) a.delta[sink][l] = {sink};
  for (auto& cond : a.conditions) {
    int odd = 1;  // a fresh odd priority dominating nothing even is enough:
    // the sink is absorbing, so only its own priority recurs there; any odd
    // value makes every run through the sink rejecting for this condition.
    cond.push_back(odd);
  }
  for (int q = 0; q < sink; ++q)
    for (int l = 0; l < a.alphabet_size(); ++l)
      if (a.delta[q][l].empty()) a.delta[q][l] = {sink};
  return a;
}

// Compresses each condition's priorities to a dense range, preserving
// parity and relative order (keeps index-appearance records small).
inline void compress_priorities(Gpa& a) {
  for (auto& cond : a.conditions) {
    std::set<int> used(cond.begin(), cond.end());
    std::map<int, int> remap;
    int cur = -1;
    for (int p : used) {
      if (cur < 0)
        cur = p % 2;
      else if (cur % 2 != p % 2)
        ++cur;
      remap[p] = cur;
    }
    for (int& p : cond) p = remap[p];
  }
}

namespace detail {

// Recursive alternating-chain relabeling of one condition on the subgraph
// induced by `members`: every cycle keeps the parity of its maximum
// priority, using the fewest priority levels. Returns the new top priority
// assigned inside, or -1 when the subgraph has no cycle.
inline int relabel_component(const Gpa& a, std::vector<int>& prios,
                             std::vector<int>& out, const std::vector<int>& members);

inline int relabel_subgraph(const Gpa& a, std::vector<int>& prios,
                            std::vector<int>& out, const std::vector<char>& in_set) {
  // Decompose into SCCs (iterative Tarjan restricted to in_set), recurse
  // into each nontrivial one; trivial states get priority 0.
  int n = a.num_states();
  std::vector<int> comp(n, -1), low(n), num(n, -1), stk;
  std::vector<char> on(n, 0);
  int counter = 0, comps = 0;
  struct Frame { int q; int l; size_t k; };
  for (int root = 0; root < n; ++root) {
    if (!in_set[root] || num[root] != -1) continue;
    std::vector<Frame> st{{root, 0, 0}};
    num[root] = low[root] = counter++;
    stk.push_back(root);
    on[root] = 1;
    while (!st.empty()) {
      Frame& f = st.back();
      int q = f.q;
      bool descended = false;
      while (f.l < a.alphabet_size()) {
        const auto& cell = a.delta[q][f.l];
        if (f.k >= cell.size()) {
          ++f.l;
          f.k = 0;
          continue;
        }
        int w = cell[f.k++];
        if (!in_set[w]) continue;
        if (num[w] == -1) {
          st.push_back({w, 0, 0});
          num[w] = low[w] = counter++;
          stk.push_back(w);
          on[w] = 1;
          descended = true;
          break;
        } else if (on[w]) {
          low[q] = std::min(low[q], num[w]);
        }
      }
      if (descended) continue;
      if (low[q] == num[q]) {
        for (;;) {
          int w = stk.back();
          stk.pop_back();
          on[w] = 0;
          comp[w] = comps;
          if (w == q) break;
        }
        ++comps;
      }
      st.pop_back();
      if (!st.empty()) low[st.back().q] = std::min(low[st.back().q], low[q]);
    }
  }
  std::vector<std::vector<int>> members(comps);
  for (int q = 0; q < n; ++q)
    if (in_set[q]) members[comp[q]].push_back(q);
  int top = -1;
  for (const auto& m : members) {
    bool nontrivial = m.size() > 1;
    if (!nontrivial) {
      int q = m[0];
      for (int l = 0; l < a.alphabet_size() && !nontrivial; ++l)
        for (int w : a.delta[q][l]) nontrivial = nontrivial || w == q;
    }
    if (!nontrivial) {
      out[m[0]] = 0;
      continue;
    }
    top = std::max(top, relabel_component(a, prios, out, m));
  }
  return top;
}

inline int relabel_component(const Gpa& a, std::vector<int>& prios,
                             std::vector<int>& out, const std::vector<int>& members) {
  int p = prios[members[0]];
  for (int q : members) p = std::max(p, prios[q]);
  std::vector<char> rest(a.num_states(), 0);
  std::vector<int> peak;
  for (int q : members) {
    if (prios[q] == p)
      peak.push_back(q);
    else
      rest[q] = 1;
  }
  int d = relabel_subgraph(a, prios, out, rest);
  int np = d < 0 ? p % 2 : (d % 2 == p % 2 ? d : d + 1);
  for (int q : peak) out[q] = np;
  return np;
}

}  // namespace detail

// Exact priority reduction: relabels each condition with the minimal number
// of priority levels such that every cycle keeps the parity of its maximum
// priority. States on no cycle get priority 0 (irrelevant to any run's
// limit behavior).
inline void reduce_priorities(Gpa& a) {
  std::vector<char> all(a.num_states(), 1);
  for (auto& cond : a.conditions) {
    std::vector<int> out(a.num_states(), 0);
    detail::relabel_subgraph(a, cond, out, all);
    cond = std::move(out);
  }
}

// Bisimulation quotient for deterministic, complete automata: merges states
// with identical condition priorities and bisimilar successors. Exact for
// state-based acceptance (merged states produce identical priority
// sequences on every word), so the language is preserved. Nondeterministic
// or incomplete automata are returned unchanged.
inline Gpa quotient_bisim(const Gpa& a) {
  if (!a.is_complete_deterministic()) return a;
  int n = a.num_states();
  int sigma = a.alphabet_size();
  std::vector<int> block(n);
  {
    std::map<std::vector<int>, int> key;
    for (int q = 0; q < n; ++q) {
      std::vector<int> prios;
      for (const auto& cond : a.conditions) prios.push_back(cond[q]);
      block[q] = key.emplace(std::move(prios), static_cast<int>(key.size())).first->second;
    }
  }
  for (;;) {
    std::map<std::vector<int>, int> key;
    std::vector<int> next(n);
    for (int q = 0; q < n; ++q) {
      std::vector<int> sig{block[q]};
      for (int l = 0; l < sigma; ++l) sig.push_back(block[a.delta[q][l][0]]);
      next[q] = key.emplace(std::move(sig), static_cast<int>(key.size())).first->second;
    }
    bool stable = next == block;
    block = std::move(next);
    if (stable) break;
  }
  int blocks = *std::max_element(block.begin(), block.end()) + 1;
  if (blocks == n) return a;
  Gpa out;
  out.tracks = a.tracks;
  out.base1 = a.base1;
  out.base2 = a.base2;
  out.deterministic = true;
  out.formula = a.formula;
  out.initial = block[a.initial];
  out.delta.assign(blocks, std::vector<std::vector<int>>(sigma));
  out.conditions.assign(a.num_conditions(), std::vector<int>(blocks));
  for (int q = 0; q < n; ++q) {
    for (int l = 0; l < sigma; ++l) out.delta[block[q]][l] = {block[a.delta[q][l][0]]};
    for (int j = 0; j < a.num_conditions(); ++j)
      out.conditions[j][block[q]] = a.conditions[j][q];
  }
  return out;
}

inline Gpa complement(Gpa a) {
  a.check_dpa_shape("complement");
  a.formula = a.formula.dual();
  for (auto& cond : a.conditions)
    for (int& p : cond) ++p;
  return a;
}

inline Gpa swap_tracks(const Gpa& a) {
  if (a.tracks != 2) throw input_error("swap_tracks requires a 2-track automaton");
  Gpa out = a;
  std::swap(out.base1, out.base2);
  for (int q = 0; q < a.num_states(); ++q)
    for (int x = 0; x < a.base1; ++x)
      for (int y = 0; y < a.base2; ++y)
        out.delta[q][y * out.base2 + x] = a.delta[q][x * a.base2 + y];
  return out;
}

// Lifts a 1-track automaton to 2 tracks, reading only the given track.
inline Gpa lift_to_pair(const Gpa& a, int track, int other_base) {
  if (a.tracks != 1) throw input_error("lift_to_pair requires a 1-track automaton");
  Gpa out = a;
  out.tracks = 2;
  if (track == 1) {
    out.base1 = a.base1;
    out.base2 = other_base;
  } else {
    out.base1 = other_base;
    out.base2 = a.base1;
  }
  for (int q = 0; q < a.num_states(); ++q) {
    out.delta[q].assign(out.alphabet_size(), {});
    for (int x = 0; x < out.base1; ++x)
      for (int y = 0; y < out.base2; ++y)
        out.delta[q][out.pack(x, y)] = a.delta[q][track == 1 ? x : y];
  }
  return out;
}

// The identity relation {(x, x)} as a 2-state DPA.
inline Gpa diagonal_relation(int base) {
  Gpa a;
  a.tracks = 2;
  a.base1 = a.base2 = base;
  a.delta.assign(2, std::vector<std::vector<int>>(base * base));
  for (int x = 0; x < base; ++x)
    for (int y = 0; y < base; ++y) {
      a.delta[0][a.pack(x, y)] = {x == y ? 0 : 1};
      a.delta[1][a.pack(x, y)] = {1};
    }
  a.conditions = {{0, 1}};
  a.formula = Formula::leaf(0);
  return a;
}

// Keeps only diagonal letters (a, a), relabelled to a (1-track result).
inline Gpa restrict_to_diagonal(const Gpa& a) {
  if (a.tracks != 2 || a.base1 != a.base2)
    throw input_error("diagonal restriction requires a square 2-track automaton");
  Gpa out = a;
  out.tracks = 1;
  out.base2 = 0;
  for (int q = 0; q < a.num_states(); ++q) {
    out.delta[q].assign(a.base1, {});
    for (int x = 0; x < a.base1; ++x) out.delta[q][x] = a.delta[q][a.pack(x, x)];
  }
  return out;
}

// Projection to one track; the result is nondeterministic in general.
inline Gpa project(const Gpa& a, int track) {
  if (a.tracks != 2) throw input_error("project requires a 2-track automaton");
  Gpa out = a;
  out.tracks = 1;
  out.base1 = track == 1 ? a.base1 : a.base2;
  out.base2 = 0;
  out.deterministic = false;
  for (int q = 0; q < a.num_states(); ++q) {
    out.delta[q].assign(out.base1, {});
    for (int x = 0; x < a.base1; ++x)
      for (int y = 0; y < a.base2; ++y) {
        int kept = track == 1 ? x : y;
        auto& cell = out.delta[q][kept];
        for (int s : a.delta[q][a.pack(x, y)]) cell.push_back(s);
      }
    for (auto& cell : out.delta[q]) {
      std::sort(cell.begin(), cell.end());
      cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
    }
  }
  return out;
}

// -------------------------------------------------------------------------
// combine: synchronized product of deterministic parts; the result's
// conditions are the concatenation of the parts' conditions, and the given
// formula over part indices is expanded with each part's own formula.
// -------------------------------------------------------------------------
inline Gpa combine(const std::vector<Gpa>& parts, const Formula& formula) {
  if (parts.empty()) throw input_error("combine requires at least one part");
  for (const auto& p : parts) {
    p.check_dpa_shape("combine");
    if (p.tracks != parts[0].tracks || p.base1 != parts[0].base1 ||
        p.base2 != parts[0].base2)
      throw input_error("combine parts must share alphabet");
  }
  Gpa out;
  out.tracks = parts[0].tracks;
  out.base1 = parts[0].base1;
  out.base2 = parts[0].base2;
  out.deterministic = true;
  int n = static_cast<int>(parts.size());
  int sigma = out.alphabet_size();

  std::map<std::vector<int>, int> index;
  std::vector<std::vector<int>> tuples;
  std::vector<int> init(n);
  for (int i = 0; i < n; ++i) init[i] = parts[i].initial;
  index[init] = 0;
  tuples.push_back(init);
  out.initial = 0;
  std::deque<int> work{0};
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    std::vector<int> tup = tuples[id];
    if (static_cast<int>(out.delta.size()) <= id) out.delta.resize(id + 1);
    out.delta[id].assign(sigma, {});
    for (int l = 0; l < sigma; ++l) {
      std::vector<int> nxt(n);
      for (int i = 0; i < n; ++i) nxt[i] = parts[i].step(tup[i], l);
      auto it = index.find(nxt);
      int nid;
      if (it == index.end()) {
        nid = static_cast<int>(tuples.size());
        index[nxt] = nid;
        tuples.push_back(nxt);
        work.push_back(nid);
      } else {
        nid = it->second;
      }
      out.delta[id][l] = {nid};
    }
  }
  out.delta.resize(tuples.size());

  int total_conds = 0;
  std::vector<int> offset(n);
  for (int i = 0; i < n; ++i) {
    offset[i] = total_conds;
    total_conds += parts[i].num_conditions();
  }
  out.conditions.assign(total_conds, std::vector<int>(tuples.size(), 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < parts[i].num_conditions(); ++j)
      for (size_t s = 0; s < tuples.size(); ++s)
        out.conditions[offset[i] + j][s] = parts[i].conditions[j][tuples[s][i]];
  std::vector<Formula> subst;
  for (int i = 0; i < n; ++i) subst.push_back(parts[i].formula.shifted(offset[i]));
  out.formula = formula.substituted(subst);
  return out;
}

// -------------------------------------------------------------------------
// Emptiness: a reachable cycle realizing an even maximum for every
// condition of some minimal satisfying set. Returns a packed-letter lasso
// witness when nonempty.
// -------------------------------------------------------------------------
struct EmptinessResult {
  bool empty = true;
  std::optional<Lasso> witness;                 // packed letters
  std::vector<int> witness_cycle_priorities;    // per condition, max on cycle
};

namespace detail {

// Tarjan SCCs over an implicit subgraph (allowed states only).
inline std::vector<int> scc_of(const Gpa& a, const std::vector<char>& allowed) {
  int n = a.num_states();
  std::vector<int> comp(n, -1), low(n), num(n, -1), stk;
  std::vector<char> on(n, 0);
  int counter = 0, comps = 0;
  // Iterative Tarjan.
  struct Frame { int v; size_t li; size_t si; };
  for (int root = 0; root < n; ++root) {
    if (!allowed[root] || num[root] != -1) continue;
    std::vector<Frame> stack{{root, 0, 0}};
    num[root] = low[root] = counter++;
    stk.push_back(root);
    on[root] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      int v = f.v;
      bool descended = false;
      while (f.li < a.delta[v].size()) {
        const auto& cell = a.delta[v][f.li];
        if (f.si >= cell.size()) {
          ++f.li;
          f.si = 0;
          continue;
        }
        int w = cell[f.si++];
        if (!allowed[w]) continue;
        if (num[w] == -1) {
          stack.push_back({w, 0, 0});
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
      stack.pop_back();
      if (!stack.empty()) low[stack.back().v] = std::min(low[stack.back().v], low[v]);
    }
  }
  return comp;
}

// BFS path (letters) from one of `from` to `to`, within allowed states.
// Returns {letters, reached state}; empty path if from contains to.
inline bool bfs_path(const Gpa& a, const std::vector<char>& allowed, int from,
                     const std::function<bool(int)>& is_goal,
                     std::vector<int>* letters, int* reached) {
  std::vector<int> prev_state(a.num_states(), -1), prev_letter(a.num_states(), -1);
  std::deque<int> q;
  std::vector<char> seen(a.num_states(), 0);
  if (is_goal(from)) {
    letters->clear();
    *reached = from;
    return true;
  }
  q.push_back(from);
  seen[from] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int l = 0; l < a.alphabet_size(); ++l)
      for (int w : a.delta[v][l]) {
        if (!allowed[w] || seen[w]) continue;
        seen[w] = 1;
        prev_state[w] = v;
        prev_letter[w] = l;
        if (is_goal(w)) {
          std::vector<int> rev;
          for (int x = w; x != from; x = prev_state[x]) rev.push_back(prev_letter[x]);
          letters->assign(rev.rbegin(), rev.rend());
          *reached = w;
          return true;
        }
        q.push_back(w);
      }
  }
  return false;
}

}  // namespace detail

inline EmptinessResult is_empty(const Gpa& a) {
  EmptinessResult res;
  int n = a.num_states();
  // Reachable states.
  std::vector<char> reach(n, 0);
  {
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
  }
  auto sets = minimal_satisfying_sets(a.formula, a.num_conditions());
  for (const auto& T : sets) {
    // Enumerate even target-priority vectors over T.
    std::vector<int> maxp;
    for (int j : T) maxp.push_back(a.max_priority(j));
    std::vector<int> vec(T.size(), 0);
    for (;;) {
      // Restrict to states with priority <= target for every j in T.
      std::vector<char> allowed = reach;
      for (int q = 0; q < n; ++q) {
        if (!allowed[q]) continue;
        for (size_t t = 0; t < T.size(); ++t)
          if (a.conditions[T[t]][q] > vec[t]) {
            allowed[q] = 0;
            break;
          }
      }
      std::vector<int> comp = detail::scc_of(a, allowed);
      int comps = 0;
      for (int q = 0; q < n; ++q)
        if (allowed[q]) comps = std::max(comps, comp[q] + 1);
      // Does some SCC have an internal edge and realize every target?
      std::vector<char> has_edge(comps, 0);
      std::vector<std::vector<char>> realizes(comps, std::vector<char>(T.size(), 0));
      for (int q = 0; q < n; ++q) {
        if (!allowed[q]) continue;
        for (const auto& cell : a.delta[q])
          for (int w : cell)
            if (allowed[w] && comp[w] == comp[q]) has_edge[comp[q]] = 1;
        for (size_t t = 0; t < T.size(); ++t)
          if (a.conditions[T[t]][q] == vec[t]) realizes[comp[q]][t] = 1;
      }
      for (int c = 0; c < comps; ++c) {
        if (!has_edge[c]) continue;
        bool all = true;
        for (size_t t = 0; t < T.size(); ++t) all = all && realizes[c][t];
        if (!all) continue;
        // Build witness: path from initial into the SCC, then a cycle
        // through one realizing state per condition.
        auto in_scc = [&](int q) { return allowed[q] && comp[q] == c; };
        std::vector<char> scc_allowed(n, 0);
        for (int q = 0; q < n; ++q) scc_allowed[q] = in_scc(q) ? 1 : 0;
        std::vector<int> prefix;
        int anchor = -1;
        bool ok = detail::bfs_path(a, reach, a.initial, in_scc, &prefix, &anchor);
        assert(ok);
        (void)ok;
        std::vector<int> cycle;
        int cur = anchor;
        for (size_t t = 0; t < T.size(); ++t) {
          std::vector<int> leg;
          int hit = -1;
          detail::bfs_path(
              a, scc_allowed, cur,
              [&](int q) { return a.conditions[T[t]][q] == vec[t]; }, &leg, &hit);
          cycle.insert(cycle.end(), leg.begin(), leg.end());
          cur = hit;
        }
        {
          std::vector<int> leg;
          int hit = -1;
          detail::bfs_path(a, scc_allowed, cur, [&](int q) { return q == anchor; },
                           &leg, &hit);
          cycle.insert(cycle.end(), leg.begin(), leg.end());
          cur = hit;
        }
        if (cycle.empty()) {
          // All realizing states coincide with the anchor; take any
          // internal edge and come back.
          for (int l = 0; l < a.alphabet_size() && cycle.empty(); ++l)
            for (int w : a.delta[anchor][l])
              if (scc_allowed[w]) {
                std::vector<int> leg;
                int hit = -1;
                detail::bfs_path(a, scc_allowed, w,
                                 [&](int q) { return q == anchor; }, &leg, &hit);
                cycle.push_back(l);
                cycle.insert(cycle.end(), leg.begin(), leg.end());
                break;
              }
        }
        Lasso w;
        w.prefix = prefix;
        w.cycle = cycle;
        res.empty = false;
        res.witness = normalize_lasso(w);
        // Report the targeted per-condition maxima (-1 = unconstrained).
        res.witness_cycle_priorities.assign(a.num_conditions(), -1);
        for (size_t t = 0; t < T.size(); ++t)
          res.witness_cycle_priorities[T[t]] = vec[t];
        return res;
      }
      // Next vector.
      size_t t = 0;
      for (; t < T.size(); ++t) {
        vec[t] += 2;
        if (vec[t] <= maxp[t]) break;
        vec[t] = 0;
      }
      if (t == T.size()) break;
    }
  }
  return res;
}

// -------------------------------------------------------------------------
// Membership.
// -------------------------------------------------------------------------
struct AcceptanceVerdict {
  bool accepted = false;
  std::vector<int> witness_cycle_priorities;  // per condition, max on cycle
};

inline AcceptanceVerdict accepts_letters(const Gpa& a, const Lasso& input) {
  for (int l : input.prefix)
    if (l < 0 || l >= a.alphabet_size()) throw input_error("letter outside alphabet");
  for (int l : input.cycle)
    if (l < 0 || l >= a.alphabet_size()) throw input_error("letter outside alphabet");
  AcceptanceVerdict v;
  if (a.deterministic && a.is_complete_deterministic()) {
    int q = a.initial;
    for (int l : input.prefix) q = a.step(q, l);
    // Iterate the cycle until the state at the cycle seam repeats.
    std::map<int, int> seen;  // state at seam -> iteration
    std::vector<int> seam_states;
    std::vector<std::vector<int>> visited;  // states entered per iteration
    while (!seen.count(q)) {
      seen[q] = static_cast<int>(seam_states.size());
      seam_states.push_back(q);
      visited.emplace_back();
      for (int l : input.cycle) {
        q = a.step(q, l);
        visited.back().push_back(q);
      }
    }
    int from = seen[q];
    v.witness_cycle_priorities.assign(a.num_conditions(), -1);
    std::vector<bool> truth(a.num_conditions());
    for (int j = 0; j < a.num_conditions(); ++j) {
      int m = -1;
      for (size_t it = from; it < visited.size(); ++it)
        for (int s : visited[it]) m = std::max(m, a.conditions[j][s]);
      v.witness_cycle_priorities[j] = m;
      truth[j] = m >= 0 && m % 2 == 0;
    }
    v.accepted = a.formula.eval(truth);
    return v;
  }
  // Nondeterministic: product with the input lasso and test emptiness.
  Gpa prod;
  prod.tracks = 1;
  prod.base1 = 1;
  prod.deterministic = false;
  int L = input.length();
  int pre = static_cast<int>(input.prefix.size());
  auto id = [&](int pos, int q) { return pos * a.num_states() + q; };
  prod.delta.assign(static_cast<size_t>(L) * a.num_states(),
                    std::vector<std::vector<int>>(1));
  for (int pos = 0; pos < L; ++pos) {
    int letter = input.at(pos);
    int nxt = pos + 1 < L ? pos + 1 : pre;
    for (int q = 0; q < a.num_states(); ++q)
      for (int s : a.delta[q][letter]) prod.delta[id(pos, q)][0].push_back(id(nxt, s));
  }
  prod.initial = id(0, a.initial);
  prod.conditions.assign(a.num_conditions(),
                         std::vector<int>(prod.num_states(), 0));
  for (int j = 0; j < a.num_conditions(); ++j)
    for (int pos = 0; pos < L; ++pos)
      for (int q = 0; q < a.num_states(); ++q)
        prod.conditions[j][id(pos, q)] = a.conditions[j][q];
  prod.formula = a.formula;
  EmptinessResult e = is_empty(prod);
  v.accepted = !e.empty;
  v.witness_cycle_priorities = e.witness_cycle_priorities;
  return v;
}

inline AcceptanceVerdict accepts(const Gpa& a, const Lasso& w) {
  if (a.tracks != 1) throw input_error("1-track input for a 2-track automaton");
  return accepts_letters(a, w);
}

inline AcceptanceVerdict accepts(const Gpa& a, const Lasso& x, const Lasso& y) {
  if (a.tracks != 2) throw input_error("2-track input for a 1-track automaton");
  if (a.base1 != a.base2)
    throw input_error("pair acceptance requires equal track bases");
  return accepts_letters(a, zip_lassos(x, y, a.base2));
}

// -------------------------------------------------------------------------
// Universality = emptiness of the complement.
// -------------------------------------------------------------------------
struct UniversalityResult {
  bool universal = true;
  std::optional<Lasso> counterexample;  // packed letters
};

inline UniversalityResult is_universal(const Gpa& a) {
  a.check_dpa_shape("is_universal");
  EmptinessResult e = is_empty(complement(a));
  UniversalityResult u;
  u.universal = e.empty;
  u.counterexample = e.witness;
  return u;
}

}  // namespace ngg
