// Arenas, lassos, Mealy-machine strategies and play computation for
// multi-player turn-based games on finite graphs.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ngg {

// Thrown on malformed inputs (bad arenas, inconsistent profiles, ...).
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a configurable resource cap is exceeded.
struct cap_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -------------------------------------------------------------------------
// Arena: finite directed graph with a total successor relation and a
// player-ownership partition. Vertices are interned strings addressed by
// dense integer ids; players are 1-based integers.
// -------------------------------------------------------------------------
class Arena {
 public:
  Arena() = default;

  int add_vertex(const std::string& name, int owner_player) {
    if (index_.count(name)) throw input_error("duplicate vertex: " + name);
    int id = static_cast<int>(names_.size());
    index_[name] = id;
    names_.push_back(name);
    owner_.push_back(owner_player);
    succ_.emplace_back();
    pred_.emplace_back();
    num_players_ = std::max(num_players_, owner_player);
    return id;
  }

  void add_edge(int from, int to) {
    check_vertex(from);
    check_vertex(to);
    if (std::find(succ_[from].begin(), succ_[from].end(), to) != succ_[from].end())
      return;  // ignore duplicates
    succ_[from].push_back(to);
    pred_[to].push_back(from);
  }

  void set_players(int n) { num_players_ = std::max(num_players_, n); }

  // Sorts adjacency (deterministic iteration order) and checks totality.
  void validate() const {
    for (int v = 0; v < size(); ++v) {
      if (succ_[v].empty())
        throw input_error("vertex without successor: " + names_[v]);
      if (owner_[v] < 1 || owner_[v] > num_players_)
        throw input_error("vertex with out-of-range owner: " + names_[v]);
    }
  }

  void finalize() {
    for (auto& s : succ_) std::sort(s.begin(), s.end());
    for (auto& p : pred_) std::sort(p.begin(), p.end());
    validate();
  }

  int size() const { return static_cast<int>(names_.size()); }
  int players() const { return num_players_; }
  int owner(int v) const { return owner_[v]; }
  const std::string& name(int v) const { return names_[v]; }
  const std::vector<int>& successors(int v) const { return succ_[v]; }
  const std::vector<int>& predecessors(int v) const { return pred_[v]; }

  bool has_edge(int from, int to) const {
    const auto& s = succ_[from];
    return std::binary_search(s.begin(), s.end(), to);
  }

  int vertex(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw input_error("unknown vertex: " + name);
    return it->second;
  }

  bool has_vertex(const std::string& name) const { return index_.count(name) != 0; }

  std::vector<int> vertices_of(int player) const {
    std::vector<int> out;
    for (int v = 0; v < size(); ++v)
      if (owner_[v] == player) out.push_back(v);
    return out;
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= size()) throw input_error("vertex id out of range");
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> owner_;                // 1-based player ids
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
  int num_players_ = 0;
};

// -------------------------------------------------------------------------
// Lasso: ultimately periodic word prefix . cycle^omega over integer letters
// (vertex ids, or packed automaton letters). Kept in the unique normal
// form of minimal total length: minimal period plus maximal absorption of
// the prefix tail into the cycle.
// -------------------------------------------------------------------------
struct Lasso {
  std::vector<int> prefix;
  std::vector<int> cycle;

  bool operator==(const Lasso& o) const {
    return prefix == o.prefix && cycle == o.cycle;
  }
  bool operator<(const Lasso& o) const {
    return std::tie(prefix, cycle) < std::tie(o.prefix, o.cycle);
  }

  int length() const { return static_cast<int>(prefix.size() + cycle.size()); }

  // Letter at position k (0-based) of the infinite unfolding.
  int at(size_t k) const {
    if (k < prefix.size()) return prefix[k];
    return cycle[(k - prefix.size()) % cycle.size()];
  }

  std::vector<int> unfold(size_t n) const {
    std::vector<int> out;
    out.reserve(n);
    for (size_t k = 0; k < n; ++k) out.push_back(at(k));
    return out;
  }

  // The suffix starting at position n, as a lasso (re-rooting / rotation).
  Lasso suffix(size_t n) const;
};

inline Lasso normalize_lasso(Lasso l) {
  if (l.cycle.empty()) throw input_error("lasso with empty cycle");
  // Minimal period of the cycle.
  size_t n = l.cycle.size();
  for (size_t p = 1; p <= n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (size_t k = p; k < n && ok; ++k) ok = l.cycle[k] == l.cycle[k - p];
    if (ok) {
      l.cycle.resize(p);
      break;
    }
  }
  // Absorb the prefix tail into the cycle: mu a (nu) with last(nu) == a
  // denotes the same word as mu (rot-right nu).
  while (!l.prefix.empty() && l.prefix.back() == l.cycle.back()) {
    l.prefix.pop_back();
    l.cycle.insert(l.cycle.begin(), l.cycle.back());
    l.cycle.pop_back();
  }
  // Minimal period plus maximal absorption yields the unique minimal-length
  // representation of this ultimately periodic word.
  return l;
}

inline Lasso Lasso::suffix(size_t n) const {
  Lasso out;
  for (size_t k = n; k < prefix.size(); ++k) out.prefix.push_back(prefix[k]);
  size_t start = n > prefix.size() ? (n - prefix.size()) % cycle.size() : 0;
  for (size_t k = 0; k < cycle.size(); ++k)
    out.cycle.push_back(cycle[(start + k) % cycle.size()]);
  return normalize_lasso(out);
}

// Zips two lassos into one over packed pair letters (a * base + b).
inline Lasso zip_lassos(const Lasso& x, const Lasso& y, int base) {
  Lasso out;
  size_t pre = std::max(x.prefix.size(), y.prefix.size());
  size_t per = std::lcm(x.cycle.size(), y.cycle.size());
  for (size_t k = 0; k < pre; ++k) out.prefix.push_back(x.at(k) * base + y.at(k));
  for (size_t k = pre; k < pre + per; ++k)
    out.cycle.push_back(x.at(k) * base + y.at(k));
  return normalize_lasso(out);
}

// Splits a packed pair-letter lasso back into its two tracks.
inline std::pair<Lasso, Lasso> unzip_lasso(const Lasso& z, int base) {
  Lasso x, y;
  for (int l : z.prefix) {
    x.prefix.push_back(l / base);
    y.prefix.push_back(l % base);
  }
  for (int l : z.cycle) {
    x.cycle.push_back(l / base);
    y.cycle.push_back(l % base);
  }
  return {normalize_lasso(x), normalize_lasso(y)};
}

// Checks that consecutive letters (including the wrap and the seam) are
// edges of the arena.
inline bool lasso_is_play(const Arena& a, const Lasso& l) {
  if (l.cycle.empty()) return false;
  std::vector<int> w = l.prefix;
  w.insert(w.end(), l.cycle.begin(), l.cycle.end());
  for (int v : w)
    if (v < 0 || v >= a.size()) return false;
  for (size_t k = 0; k + 1 < w.size(); ++k)
    if (!a.has_edge(w[k], w[k + 1])) return false;
  return a.has_edge(w.back(), l.cycle.front());
}

// -------------------------------------------------------------------------
// MealyMachine: finite-memory strategy. update : M x V -> M (entries left
// unset keep the memory unchanged); nextMove : M x V_i -> V.
// -------------------------------------------------------------------------
struct MealyMachine {
  int player = 0;
  int memory = 1;   // number of memory states, ids 0..memory-1
  int initial = 0;
  std::map<std::pair<int, int>, int> update;    // (m, v) -> m'
  std::map<std::pair<int, int>, int> next_move; // (m, v) -> v'

  int step_memory(int m, int v) const {
    auto it = update.find({m, v});
    return it == update.end() ? m : it->second;
  }

  int move(int m, int v) const {
    auto it = next_move.find({m, v});
    if (it == next_move.end())
      throw input_error("mealy machine has no move for an owned vertex");
    return it->second;
  }

  bool has_move(int m, int v) const { return next_move.count({m, v}) != 0; }
};

// Builds the machine that replays a given lasso: memory = position in the
// lasso, advanced on every step; when the observed vertex matches the
// expected one, the machine proposes the lasso's next vertex, otherwise the
// least successor (off-path behavior, unreachable when used as intended).
inline MealyMachine machine_from_lasso(const Arena& a, int player, const Lasso& l) {
  MealyMachine m;
  m.player = player;
  int L = l.length();
  m.memory = L;
  m.initial = 0;
  for (int k = 0; k < L; ++k) {
    int nxt = k + 1 < L ? k + 1 : static_cast<int>(l.prefix.size());
    for (int v = 0; v < a.size(); ++v) {
      m.update[{k, v}] = nxt;
      if (a.owner(v) == player) {
        int want = l.at(k) == v ? l.at(k + 1) : a.successors(v).front();
        if (!a.has_edge(v, want)) want = a.successors(v).front();
        m.next_move[{k, v}] = want;
      }
    }
  }
  return m;
}

// -------------------------------------------------------------------------
// outcome_of_profile: the unique play consistent with one machine per
// player, detected as a lasso once the (vertex, memory vector) pair repeats.
// -------------------------------------------------------------------------
inline Lasso outcome_of_profile(const Arena& a,
                                const std::map<int, MealyMachine>& profile,
                                int v0) {
  if (v0 < 0 || v0 >= a.size()) throw input_error("initial vertex out of range");
  for (int p = 1; p <= a.players(); ++p)
    if (!profile.count(p)) throw input_error("profile missing a machine for player " + std::to_string(p));

  std::vector<int> mem(a.players());
  for (int p = 1; p <= a.players(); ++p) mem[p - 1] = profile.at(p).initial;

  std::map<std::pair<int, std::vector<int>>, int> seen;  // state -> position
  std::vector<int> word;
  int v = v0;
  for (;;) {
    auto key = std::make_pair(v, mem);
    auto it = seen.find(key);
    if (it != seen.end()) {
      Lasso l;
      l.prefix.assign(word.begin(), word.begin() + it->second);
      l.cycle.assign(word.begin() + it->second, word.end());
      return normalize_lasso(l);
    }
    seen[key] = static_cast<int>(word.size());
    word.push_back(v);
    int owner = a.owner(v);
    int next = profile.at(owner).move(mem[owner - 1], v);
    if (!a.has_edge(v, next))
      throw input_error("machine move is not an edge: " + a.name(v) + " -> " + a.name(next));
    for (int p = 1; p <= a.players(); ++p)
      mem[p - 1] = profile.at(p).step_memory(mem[p - 1], v);
    v = next;
  }
}

}  // namespace ngg
