// Text formats: arenas, Mealy machines, lasso literals, parity automata
// (with target-macro edge labels), parity games, and game files bundling an
// arena with per-player objective expressions. Line-oriented, '#' starts a
// comment, parse errors carry line numbers.
#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ngg/nash.hpp"
#include "ngg/paritysolve.hpp"
#include "ngg/relprops.hpp"

namespace ngg::io {

namespace detail {

struct Row {
  int line = 0;
  std::vector<std::string> tokens;
};

inline std::vector<Row> tokenize(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Row row;
    row.line = no;
    std::string tok;
    while (ls >> tok) row.tokens.push_back(tok);
    if (!row.tokens.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw input_error("line " + std::to_string(line) + ": " + msg);
}

inline int parse_int(const Row& row, const std::string& tok) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(row.line, "expected a number, got '" + tok + "'");
  }
}

}  // namespace detail

// -------------------------------------------------------------------------
// Arena files: `arena`; `player <k>`; `vertex <id> owner <k>`; `edge <a> <b>`.
// -------------------------------------------------------------------------
inline Arena parse_arena_rows(const std::vector<detail::Row>& rows, size_t from,
                              size_t to, const char* header) {
  using detail::fail;
  if (from >= to || rows[from].tokens[0] != header)
    fail(from < to ? rows[from].line : 1,
         std::string("expected '") + header + "' header");
  Arena a;
  struct Edge { int line; std::string from, to; };
  std::vector<Edge> edges;
  for (size_t r = from + 1; r < to; ++r) {
    const auto& row = rows[r];
    const auto& t = row.tokens;
    if (t[0] == "player") {
      if (t.size() != 2) fail(row.line, "player line needs a count");
      a.set_players(detail::parse_int(row, t[1]));
    } else if (t[0] == "vertex") {
      if (t.size() != 4 || t[2] != "owner")
        fail(row.line, "vertex line needs '<id> owner <player>'");
      a.add_vertex(t[1], detail::parse_int(row, t[3]));
    } else if (t[0] == "edge") {
      if (t.size() != 3) fail(row.line, "edge line needs two vertices");
      edges.push_back({row.line, t[1], t[2]});
    } else {
      fail(row.line, "unknown directive '" + t[0] + "'");
    }
  }
  for (const auto& e : edges) {
    if (!a.has_vertex(e.from) || !a.has_vertex(e.to))
      fail(e.line, "edge uses an undeclared vertex");
    a.add_edge(a.vertex(e.from), a.vertex(e.to));
  }
  try {
    a.finalize();
  } catch (const input_error& err) {
    fail(rows[from].line, err.what());
  }
  return a;
}

inline Arena parse_arena(const std::string& text) {
  auto rows = detail::tokenize(text);
  if (rows.empty()) detail::fail(1, "empty arena file");
  return parse_arena_rows(rows, 0, rows.size(), "arena");
}

inline void serialize_arena_body(std::ostringstream& out, const Arena& a) {
  out << "player " << a.players() << "\n";
  for (int v = 0; v < a.size(); ++v)
    out << "vertex " << a.name(v) << " owner " << a.owner(v) << "\n";
  for (int v = 0; v < a.size(); ++v)
    for (int w : a.successors(v)) out << "edge " << a.name(v) << " " << a.name(w) << "\n";
}

inline std::string serialize_arena(const Arena& a) {
  std::ostringstream out;
  out << "arena\n";
  serialize_arena_body(out, a);
  return out.str();
}

// -------------------------------------------------------------------------
// Lasso literals: `v0 v3 ; v1 v0 v2` (prefix `;` cycle).
// -------------------------------------------------------------------------
inline Lasso parse_lasso(const std::string& text, const Arena& a) {
  std::istringstream in(text);
  std::string tok;
  Lasso l;
  bool in_cycle = false;
  while (in >> tok) {
    if (tok == ";") {
      if (in_cycle) throw input_error("lasso literal has two ';' separators");
      in_cycle = true;
      continue;
    }
    if (!a.has_vertex(tok)) throw input_error("unknown vertex in lasso: " + tok);
    (in_cycle ? l.cycle : l.prefix).push_back(a.vertex(tok));
  }
  if (!in_cycle) throw input_error("lasso literal needs a ';' separator");
  if (l.cycle.empty()) throw input_error("lasso literal needs a nonempty cycle");
  return normalize_lasso(l);
}

inline std::string serialize_lasso(const Lasso& l, const Arena& a) {
  std::ostringstream out;
  for (int v : l.prefix) out << a.name(v) << " ";
  out << ";";
  for (int v : l.cycle) out << " " << a.name(v);
  return out.str();
}

// -------------------------------------------------------------------------
// Mealy files: `mealy player <k>`; `state <m> [initial]`;
// `update <m> <v> <m'>`; `move <m> <v> <v'>`.
// -------------------------------------------------------------------------
inline MealyMachine parse_mealy(const std::string& text, const Arena& a) {
  using detail::fail;
  auto rows = detail::tokenize(text);
  if (rows.empty() || rows[0].tokens[0] != "mealy" || rows[0].tokens.size() != 3 ||
      rows[0].tokens[1] != "player")
    fail(rows.empty() ? 1 : rows[0].line, "expected 'mealy player <k>' header");
  MealyMachine m;
  m.player = detail::parse_int(rows[0], rows[0].tokens[2]);
  std::map<std::string, int> states;
  bool have_initial = false;
  auto state_id = [&](const detail::Row& row, const std::string& s) {
    auto it = states.find(s);
    if (it == states.end()) fail(row.line, "undeclared state '" + s + "'");
    return it->second;
  };
  auto vertex_id = [&](const detail::Row& row, const std::string& s) {
    if (!a.has_vertex(s)) fail(row.line, "unknown vertex '" + s + "'");
    return a.vertex(s);
  };
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto& t = row.tokens;
    if (t[0] == "state") {
      if (t.size() < 2 || t.size() > 3 || (t.size() == 3 && t[2] != "initial"))
        fail(row.line, "state line needs '<m> [initial]'");
      if (states.count(t[1])) fail(row.line, "duplicate state '" + t[1] + "'");
      int id = static_cast<int>(states.size());
      states[t[1]] = id;
      if (t.size() == 3) {
        if (have_initial) fail(row.line, "second initial state");
        have_initial = true;
        m.initial = id;
      }
    } else if (t[0] == "update") {
      if (t.size() != 4) fail(row.line, "update line needs '<m> <v> <m'>'");
      m.update[{state_id(row, t[1]), vertex_id(row, t[2])}] = state_id(row, t[3]);
    } else if (t[0] == "move") {
      if (t.size() != 4) fail(row.line, "move line needs '<m> <v> <v'>'");
      m.next_move[{state_id(row, t[1]), vertex_id(row, t[2])}] = vertex_id(row, t[3]);
    } else {
      fail(row.line, "unknown directive '" + t[0] + "'");
    }
  }
  if (states.empty()) fail(rows[0].line, "machine needs at least one state");
  if (!have_initial) fail(rows[0].line, "machine needs an initial state");
  m.memory = static_cast<int>(states.size());
  return m;
}

inline std::string serialize_mealy(const MealyMachine& m, const Arena& a) {
  std::ostringstream out;
  out << "mealy player " << m.player << "\n";
  for (int s = 0; s < m.memory; ++s) {
    out << "state m" << s;
    if (s == m.initial) out << " initial";
    out << "\n";
  }
  for (const auto& [key, to] : m.update)
    out << "update m" << key.first << " " << a.name(key.second) << " m" << to << "\n";
  for (const auto& [key, to] : m.next_move)
    out << "move m" << key.first << " " << a.name(key.second) << " " << a.name(to) << "\n";
  return out.str();
}

// -------------------------------------------------------------------------
// Automaton files:
//   `gpa tracks <1|2> [nondet]`
//   `alphabet <ids…>`
//   `target <ids…>`          (optional; referent of the T / !T macros)
//   `state <q> [initial] prio <p0> [<p1> …]`
//   `trans <q> <letter> <q'>`   letter: `<id>` or `(<l>,<r>)` where each
//                               component is an id, `T`, `!T`, or `*`;
//                               macro letters fill only still-unassigned
//                               deterministic slots, so specific labels
//                               should come first
//   `formula <AND/OR expression over c0..ck>`
// -------------------------------------------------------------------------
struct GpaFile {
  Gpa automaton;
  std::vector<std::string> letters;  // names of the base alphabet
  std::vector<int> targets;          // referent of the T macro (may be empty)
};

namespace detail {

inline Formula parse_formula(const std::string& text, int num_conds, int line) {
  size_t pos = 0;
  auto skip = [&]() { while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos; };
  std::function<Formula()> expr = [&]() -> Formula {
    skip();
    if (pos >= text.size()) fail(line, "truncated formula");
    if (text.compare(pos, 4, "AND(") == 0 || text.compare(pos, 3, "OR(") == 0) {
      bool is_and = text[pos] == 'A';
      pos += is_and ? 4 : 3;
      std::vector<Formula> kids;
      for (;;) {
        kids.push_back(expr());
        skip();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        if (pos < text.size() && text[pos] == ')') {
          ++pos;
          break;
        }
        fail(line, "expected ',' or ')' in formula");
      }
      return is_and ? Formula::all_of(std::move(kids)) : Formula::any_of(std::move(kids));
    }
    if (text[pos] == 'c') {
      size_t start = ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == start) fail(line, "expected a condition index after 'c'");
      int c = std::stoi(text.substr(start, pos - start));
      if (c < 0 || c >= num_conds) fail(line, "condition index out of range");
      return Formula::leaf(c);
    }
    fail(line, "unexpected character in formula");
  };
  Formula f = expr();
  skip();
  if (pos != text.size()) fail(line, "trailing characters in formula");
  return f;
}

}  // namespace detail

inline GpaFile parse_gpa(const std::string& text) {
  using detail::fail;
  auto rows = detail::tokenize(text);
  if (rows.empty() || rows[0].tokens[0] != "gpa" || rows[0].tokens.size() < 3 ||
      rows[0].tokens[1] != "tracks")
    fail(rows.empty() ? 1 : rows[0].line, "expected 'gpa tracks <1|2>' header");
  GpaFile out;
  Gpa& a = out.automaton;
  a.tracks = detail::parse_int(rows[0], rows[0].tokens[2]);
  if (a.tracks != 1 && a.tracks != 2) fail(rows[0].line, "tracks must be 1 or 2");
  bool declared_nondet = rows[0].tokens.size() > 3 && rows[0].tokens[3] == "nondet";
  if (rows[0].tokens.size() > 4 ||
      (rows[0].tokens.size() == 4 && !declared_nondet))
    fail(rows[0].line, "unexpected token after header");
  std::map<std::string, int> letters;
  std::map<std::string, int> states;
  std::vector<std::vector<int>> prios;  // per state
  int initial = -1;
  struct Trans { int line; std::string from, letter, to; };
  std::vector<Trans> transitions;
  std::string formula_text;
  int formula_line = 0;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto& t = row.tokens;
    if (t[0] == "alphabet") {
      if (!out.letters.empty()) fail(row.line, "duplicate alphabet line");
      for (size_t k = 1; k < t.size(); ++k) {
        if (letters.count(t[k])) fail(row.line, "duplicate letter '" + t[k] + "'");
        letters[t[k]] = static_cast<int>(out.letters.size());
        out.letters.push_back(t[k]);
      }
      if (out.letters.empty()) fail(row.line, "alphabet line needs letters");
    } else if (t[0] == "target") {
      for (size_t k = 1; k < t.size(); ++k) {
        auto it = letters.find(t[k]);
        if (it == letters.end()) fail(row.line, "target letter not in alphabet");
        out.targets.push_back(it->second);
      }
    } else if (t[0] == "state") {
      size_t p = 1;
      if (p >= t.size()) fail(row.line, "state line needs a name");
      std::string name = t[p++];
      if (states.count(name)) fail(row.line, "duplicate state '" + name + "'");
      int id = static_cast<int>(states.size());
      states[name] = id;
      if (p < t.size() && t[p] == "initial") {
        if (initial >= 0) fail(row.line, "second initial state");
        initial = id;
        ++p;
      }
      if (p >= t.size() || t[p] != "prio")
        fail(row.line, "state line needs 'prio <p0> …'");
      ++p;
      std::vector<int> pr;
      for (; p < t.size(); ++p) pr.push_back(detail::parse_int(row, t[p]));
      if (pr.empty()) fail(row.line, "state line needs at least one priority");
      if (!prios.empty() && prios[0].size() != pr.size())
        fail(row.line, "states disagree on the number of conditions");
      prios.push_back(std::move(pr));
    } else if (t[0] == "trans") {
      if (t.size() < 4) fail(row.line, "trans line needs '<q> <letter> <q'>'");
      std::string letter;
      for (size_t k = 2; k + 1 < t.size(); ++k) letter += t[k];
      transitions.push_back({row.line, t[1], letter, t.back()});
    } else if (t[0] == "formula") {
      formula_text.clear();
      for (size_t k = 1; k < t.size(); ++k) formula_text += t[k];
      formula_line = row.line;
    } else {
      fail(row.line, "unknown directive '" + t[0] + "'");
    }
  }
  if (out.letters.empty()) fail(rows[0].line, "missing alphabet line");
  if (states.empty()) fail(rows[0].line, "automaton needs at least one state");
  if (initial < 0) fail(rows[0].line, "automaton needs an initial state");
  int base = static_cast<int>(out.letters.size());
  a.base1 = base;
  a.base2 = a.tracks == 2 ? base : 0;
  a.initial = initial;
  a.delta.assign(states.size(), std::vector<std::vector<int>>(a.alphabet_size()));
  int num_conds = static_cast<int>(prios[0].size());
  a.conditions.assign(num_conds, std::vector<int>(states.size()));
  for (const auto& [name, id] : states)
    for (int j = 0; j < num_conds; ++j) a.conditions[j][id] = prios[id][j];
  // Expand a letter component to the set of base letters it denotes.
  auto expand = [&](const Trans& tr, const std::string& comp) {
    std::vector<int> set;
    if (comp == "*") {
      for (int l = 0; l < base; ++l) set.push_back(l);
    } else if (comp == "T" || comp == "!T") {
      std::vector<char> in_t(base, 0);
      for (int l : out.targets) in_t[l] = 1;
      for (int l = 0; l < base; ++l)
        if (in_t[l] == (comp == "T")) set.push_back(l);
    } else {
      auto it = letters.find(comp);
      if (it == letters.end()) fail(tr.line, "unknown letter '" + comp + "'");
      set.push_back(it->second);
    }
    return set;
  };
  for (const auto& tr : transitions) {
    auto fs = states.find(tr.from);
    auto ts = states.find(tr.to);
    if (fs == states.end() || ts == states.end())
      fail(tr.line, "transition uses an undeclared state");
    bool macro = tr.letter.find('*') != std::string::npos ||
                 tr.letter.find('T') != std::string::npos;
    std::vector<int> packed;
    if (a.tracks == 1) {
      for (int l : expand(tr, tr.letter)) packed.push_back(l);
    } else {
      if (tr.letter.size() < 5 || tr.letter.front() != '(' || tr.letter.back() != ')')
        fail(tr.line, "2-track letter must look like '(<l>,<r>)'");
      std::string body = tr.letter.substr(1, tr.letter.size() - 2);
      auto comma = body.find(',');
      if (comma == std::string::npos) fail(tr.line, "2-track letter needs a ','");
      for (int l : expand(tr, body.substr(0, comma)))
        for (int rix : expand(tr, body.substr(comma + 1)))
          packed.push_back(a.pack(l, rix));
    }
    for (int letter : packed) {
      auto& cell = a.delta[fs->second][letter];
      if (!cell.empty()) {
        if (declared_nondet) {
          if (std::find(cell.begin(), cell.end(), ts->second) == cell.end())
            cell.push_back(ts->second);
          continue;
        }
        if (macro) continue;  // macros fill only unassigned slots
        fail(tr.line, "duplicate transition for a letter");
      }
      cell.push_back(ts->second);
    }
  }
  for (auto& row : a.delta)
    for (auto& cell : row) std::sort(cell.begin(), cell.end());
  a.deterministic = !declared_nondet;
  if (formula_text.empty()) {
    if (num_conds != 1)
      fail(rows[0].line, "multi-condition automaton needs a formula line");
    a.formula = Formula::leaf(0);
  } else {
    a.formula = detail::parse_formula(formula_text, num_conds, formula_line);
  }
  return out;
}

inline std::string serialize_gpa(const GpaFile& f) {
  const Gpa& a = f.automaton;
  std::ostringstream out;
  out << "gpa tracks " << a.tracks << (a.deterministic ? "" : " nondet") << "\n";
  out << "alphabet";
  for (const auto& l : f.letters) out << " " << l;
  out << "\n";
  if (!f.targets.empty()) {
    out << "target";
    for (int t : f.targets) out << " " << f.letters[t];
    out << "\n";
  }
  for (int q = 0; q < a.num_states(); ++q) {
    out << "state q" << q;
    if (q == a.initial) out << " initial";
    out << " prio";
    for (int j = 0; j < a.num_conditions(); ++j) out << " " << a.conditions[j][q];
    out << "\n";
  }
  for (int q = 0; q < a.num_states(); ++q)
    for (int l = 0; l < a.alphabet_size(); ++l)
      for (int to : a.delta[q][l]) {
        out << "trans q" << q << " ";
        if (a.tracks == 1)
          out << f.letters[l];
        else
          out << "(" << f.letters[l / a.base2] << "," << f.letters[l % a.base2] << ")";
        out << " q" << to << "\n";
      }
  out << "formula " << a.formula.str() << "\n";
  return out.str();
}

// -------------------------------------------------------------------------
// Parity game files: `pgame`; `vertex <id> owner <even|odd> prio <p>`;
// `edge <a> <b>`.
// -------------------------------------------------------------------------
inline ParityGame parse_pgame(const std::string& text) {
  using detail::fail;
  auto rows = detail::tokenize(text);
  if (rows.empty() || rows[0].tokens[0] != "pgame")
    fail(rows.empty() ? 1 : rows[0].line, "expected 'pgame' header");
  ParityGame g;
  std::map<std::string, int> index;
  struct Edge { int line; std::string from, to; };
  std::vector<Edge> edges;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto& t = row.tokens;
    if (t[0] == "vertex") {
      if (t.size() != 6 || t[2] != "owner" || t[4] != "prio")
        fail(row.line, "vertex line needs '<id> owner <even|odd> prio <p>'");
      if (index.count(t[1])) fail(row.line, "duplicate vertex '" + t[1] + "'");
      Side s;
      if (t[3] == "even") s = Side::Even;
      else if (t[3] == "odd") s = Side::Odd;
      else fail(row.line, "owner must be 'even' or 'odd'");
      index[t[1]] = g.add_vertex(s, detail::parse_int(row, t[5]));
      g.names.push_back(t[1]);
    } else if (t[0] == "edge") {
      if (t.size() != 3) fail(row.line, "edge line needs two vertices");
      edges.push_back({row.line, t[1], t[2]});
    } else {
      fail(row.line, "unknown directive '" + t[0] + "'");
    }
  }
  for (const auto& e : edges) {
    if (!index.count(e.from) || !index.count(e.to))
      fail(e.line, "edge uses an undeclared vertex");
    g.succ[index.at(e.from)].push_back(index.at(e.to));
  }
  try {
    g.validate();
  } catch (const input_error& err) {
    fail(rows[0].line, err.what());
  }
  return g;
}

inline std::string serialize_pgame(const ParityGame& g) {
  std::ostringstream out;
  out << "pgame\n";
  auto name = [&](int v) {
    return v < static_cast<int>(g.names.size()) ? g.names[v]
                                                : "n" + std::to_string(v);
  };
  for (int v = 0; v < g.size(); ++v)
    out << "vertex " << name(v) << " owner "
        << (g.owner[v] == Side::Even ? "even" : "odd") << " prio " << g.priority[v]
        << "\n";
  for (int v = 0; v < g.size(); ++v)
    for (int w : g.succ[v]) out << "edge " << name(v) << " " << name(w) << "\n";
  return out.str();
}

// -------------------------------------------------------------------------
// Objective expressions: `reach(T={v1,v2})`, `buechi(T={v1})`,
// `mincost(T={v1})`, `maxreward(T={v1})`, `lex(<e>,<e>,…)`,
// `count(<e>,<e>,…)`.
// -------------------------------------------------------------------------
inline ObjectiveSpec parse_objective(const std::string& text, const Arena& a) {
  size_t pos = 0;
  auto skip = [&]() { while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos; };
  auto error = [&](const std::string& msg) -> void {
    throw input_error("objective '" + text + "': " + msg);
  };
  std::function<ObjectiveSpec()> expr = [&]() -> ObjectiveSpec {
    skip();
    size_t start = pos;
    while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
    std::string name = text.substr(start, pos - start);
    skip();
    if (pos >= text.size() || text[pos] != '(') error("expected '(' after '" + name + "'");
    ++pos;
    ObjectiveSpec s;
    bool composite = false;
    if (name == "reach") s.kind = ObjectiveSpec::Kind::Reach;
    else if (name == "buechi") s.kind = ObjectiveSpec::Kind::Buechi;
    else if (name == "mincost") s.kind = ObjectiveSpec::Kind::MinCost;
    else if (name == "maxreward") s.kind = ObjectiveSpec::Kind::MaxReward;
    else if (name == "lex") { s.kind = ObjectiveSpec::Kind::Lex; composite = true; }
    else if (name == "count") { s.kind = ObjectiveSpec::Kind::Count; composite = true; }
    else error("unknown objective '" + name + "'");
    if (composite) {
      for (;;) {
        s.parts.push_back(expr());
        skip();
        if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
        break;
      }
    } else {
      skip();
      if (text.compare(pos, 3, "T={") != 0) error("expected 'T={…}'");
      pos += 3;
      for (;;) {
        skip();
        size_t vs = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != '}' &&
               !std::isspace(static_cast<unsigned char>(text[pos])))
          ++pos;
        std::string v = text.substr(vs, pos - vs);
        if (!v.empty()) {
          if (!a.has_vertex(v)) error("unknown vertex '" + v + "'");
          s.target.push_back(a.vertex(v));
        }
        skip();
        if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
        if (pos < text.size() && text[pos] == '}') { ++pos; break; }
        error("expected ',' or '}' in target set");
      }
    }
    skip();
    if (pos >= text.size() || text[pos] != ')') error("expected ')'");
    ++pos;
    return s;
  };
  ObjectiveSpec s = expr();
  skip();
  if (pos != text.size()) error("trailing characters");
  return s;
}

inline std::string objective_to_string(const ObjectiveSpec& s, const Arena& a) {
  using K = ObjectiveSpec::Kind;
  std::ostringstream out;
  switch (s.kind) {
    case K::Reach: out << "reach"; break;
    case K::Buechi: out << "buechi"; break;
    case K::MinCost: out << "mincost"; break;
    case K::MaxReward: out << "maxreward"; break;
    case K::Lex: out << "lex"; break;
    case K::Count: out << "count"; break;
  }
  out << "(";
  if (s.kind == K::Lex || s.kind == K::Count) {
    for (size_t k = 0; k < s.parts.size(); ++k) {
      if (k) out << ",";
      out << objective_to_string(s.parts[k], a);
    }
  } else {
    out << "T={";
    for (size_t k = 0; k < s.target.size(); ++k) {
      if (k) out << ",";
      out << a.name(s.target[k]);
    }
    out << "}";
  }
  out << ")";
  return out.str();
}

// -------------------------------------------------------------------------
// Game files: an arena plus per-player strict objectives.
//   `game`; arena body lines; `pref <k> <objective expression>`.
// -------------------------------------------------------------------------
struct GameFile {
  Game game;
  std::map<int, ObjectiveSpec> objectives;
};

inline GameFile parse_game(const std::string& text) {
  using detail::fail;
  auto rows = detail::tokenize(text);
  if (rows.empty() || rows[0].tokens[0] != "game")
    fail(rows.empty() ? 1 : rows[0].line, "expected 'game' header");
  // Split arena directives from preference lines.
  std::vector<detail::Row> arena_rows{rows[0]};
  arena_rows[0].tokens = {"arena"};
  struct Pref { int line; int player; std::string expr; };
  std::vector<Pref> prefs;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.tokens[0] == "pref") {
      if (row.tokens.size() < 3) fail(row.line, "pref line needs '<player> <objective>'");
      std::string expr;
      for (size_t k = 2; k < row.tokens.size(); ++k) expr += row.tokens[k];
      prefs.push_back({row.line, detail::parse_int(row, row.tokens[1]), expr});
    } else {
      arena_rows.push_back(row);
    }
  }
  GameFile out;
  out.game.arena = parse_arena_rows(arena_rows, 0, arena_rows.size(), "arena");
  for (const auto& p : prefs) {
    if (p.player < 1 || p.player > out.game.arena.players())
      fail(p.line, "pref line for an out-of-range player");
    if (out.objectives.count(p.player)) fail(p.line, "duplicate pref line");
    try {
      out.objectives[p.player] = parse_objective(p.expr, out.game.arena);
    } catch (const input_error& err) {
      fail(p.line, err.what());
    }
    out.game.preferences[p.player] =
        build_preference(out.objectives.at(p.player), out.game.arena.size());
  }
  for (int p = 1; p <= out.game.arena.players(); ++p)
    if (!out.objectives.count(p))
      fail(rows[0].line, "missing pref line for player " + std::to_string(p));
  return out;
}

inline std::string serialize_game(const GameFile& f) {
  std::ostringstream out;
  out << "game\n";
  serialize_arena_body(out, f.game.arena);
  for (const auto& [p, spec] : f.objectives)
    out << "pref " << p << " " << objective_to_string(spec, f.game.arena) << "\n";
  return out.str();
}

}  // namespace ngg::io
