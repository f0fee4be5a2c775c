// Command-line front end for the equilibrium-analysis library.
//
// Exit codes: 0 = decided true / property holds; 1 = decided false;
// 2 = usage or parse error; 3 = resource cap exceeded.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ngg/io.hpp"
#include "ngg/lattice.hpp"

using json = nlohmann::ordered_json;
using namespace ngg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Output {
  bool as_json = false;
  json report;
  std::ostringstream text;

  void emit() {
    if (as_json) {
      report["schema"] = 1;
      // Move schema to the front for readability.
      json ordered;
      ordered["schema"] = 1;
      for (auto& [k, v] : report.items())
        if (k != "schema") ordered[k] = std::move(v);
      std::cout << ordered.dump(2) << "\n";
    } else {
      std::cout << text.str();
    }
  }
};

json lasso_json(const Lasso& l, const Arena& a) {
  return io::serialize_lasso(l, a);
}

json machine_json(const MealyMachine& m, const Arena& a) {
  json j;
  j["player"] = m.player;
  j["memory"] = m.memory;
  j["text"] = io::serialize_mealy(m, a);
  return j;
}

// Derived total preorders for the lattice commands: x <= y iff not (y < x).
Game preorder_game(const io::GameFile& f) {
  Game g;
  g.arena = f.game.arena;
  for (const auto& [p, pref] : f.game.preferences)
    g.preferences[p] = derive(pref, DeriveMode::TotalStrictComplement);
  return g;
}

int default_bound(const Arena& a) { return 2 * a.size() + 2; }

struct Ctx {
  std::string game_path;
  std::string init = "";
  std::string outcome = "";
  std::vector<std::string> profile_paths;
  std::vector<std::string> constraints;
  std::string property = "";
  std::string mode = "independent";
  int player = 0;
  int bound = 0;
  int memory = 1;
  int jobs = 1;
  int max_length = 0;
  long long profile_cap = 100000;
  long long candidate_cap = 1000000;
  std::string out_path = "";
  std::string format = "text";
};

int init_vertex(const io::GameFile& f, const Ctx& c) {
  if (c.init.empty()) throw input_error("--init <vertex> is required");
  if (!f.game.arena.has_vertex(c.init))
    throw input_error("unknown initial vertex: " + c.init);
  return f.game.arena.vertex(c.init);
}

int cmd_check_ne(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  int v0 = init_vertex(f, c);
  std::map<int, MealyMachine> profile;
  for (const auto& p : c.profile_paths) {
    MealyMachine m = io::parse_mealy(slurp(p), f.game.arena);
    if (profile.count(m.player))
      throw input_error("two machines for player " + std::to_string(m.player));
    profile[m.player] = std::move(m);
  }
  NeVerdict v = check_ne(f.game, v0, profile);
  Lasso rho = outcome_of_profile(f.game.arena, profile, v0);
  out.report["command"] = "check-ne";
  out.report["outcome"] = lasso_json(rho, f.game.arena);
  out.report["isNE"] = v.isNE;
  out.text << "outcome: " << io::serialize_lasso(rho, f.game.arena) << "\n";
  if (v.isNE) {
    out.text << "NE: the profile is a Nash equilibrium\n";
    return 0;
  }
  out.report["deviator"] = v.deviator;
  out.report["deviationWitness"] = lasso_json(*v.deviationWitness, f.game.arena);
  out.text << "not an NE: player " << v.deviator << " improves via "
           << io::serialize_lasso(*v.deviationWitness, f.game.arena) << "\n";
  return 1;
}

int cmd_check_outcome(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  if (c.outcome.empty()) throw input_error("--outcome <lasso> is required");
  Lasso pi = io::parse_lasso(c.outcome, f.game.arena);
  OutcomeVerdict v = check_outcome(f.game, pi);
  out.report["command"] = "check-outcome";
  out.report["outcome"] = lasso_json(pi, f.game.arena);
  out.report["isNEOutcome"] = v.isNEOutcome;
  if (v.isNEOutcome) {
    out.text << "NE outcome: some equilibrium produces this play\n";
    return 0;
  }
  out.report["offender"] = v.offender;
  out.report["offendingPosition"] = v.offendingPosition;
  out.text << "not an NE outcome: player " << v.offender
           << " deviates profitably at position " << v.offendingPosition << "\n";
  return 1;
}

int cmd_exists_ne(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  int v0 = init_vertex(f, c);
  ExistsNeOptions opt;
  opt.max_total_length = c.max_length;
  opt.candidate_cap = c.candidate_cap;
  for (const auto& raw : c.constraints) {
    auto colon = raw.find(':');
    if (colon == std::string::npos)
      throw input_error("constraint must look like '<player>:<lasso>'");
    int p = std::stoi(raw.substr(0, colon));
    opt.constraints[p] = io::parse_lasso(raw.substr(colon + 1), f.game.arena);
  }
  ExistsNeResult r = exists_ne(f.game, v0, opt);
  out.report["command"] = "exists-ne";
  out.report["exists"] = r.exists;
  out.report["candidatesTried"] = r.candidates_tried;
  out.report["searchedLength"] = r.searched_length;
  out.report["exhausted"] = r.exhausted;
  if (r.exists) {
    out.report["outcome"] = lasso_json(r.ne->outcome, f.game.arena);
    json prof = json::object();
    for (const auto& [p, m] : r.ne->profile)
      prof[std::to_string(p)] = machine_json(m, f.game.arena);
    out.report["profile"] = prof;
    out.text << "NE exists with outcome "
             << io::serialize_lasso(r.ne->outcome, f.game.arena) << "\n";
    for (const auto& [p, m] : r.ne->profile)
      out.text << "player " << p << " machine (" << m.memory << " states):\n"
               << io::serialize_mealy(m, f.game.arena);
    return 0;
  }
  if (!r.exhausted) {
    out.text << "no NE found within the candidate cap (search incomplete)\n";
    throw cap_exceeded("candidate cap reached before the search space was exhausted");
  }
  out.text << "no NE (all plays up to length " << r.searched_length
           << " refuted)\n";
  return 1;
}

int cmd_checkrel(const Ctx& c, Output& out) {
  io::GpaFile f = io::parse_gpa(slurp(c.game_path));
  static const std::map<std::string, RelProperty> props = {
      {"reflexive", RelProperty::Reflexive},
      {"irreflexive", RelProperty::Irreflexive},
      {"transitive", RelProperty::Transitive},
      {"negtransitive", RelProperty::NegTransitive},
      {"total", RelProperty::Total},
      {"prefix-independent", RelProperty::PrefixIndependent},
      {"prefix-linear", RelProperty::PrefixLinear}};
  auto it = props.find(c.property);
  if (it == props.end())
    throw input_error("unknown property: " + c.property +
                      " (expected reflexive|irreflexive|transitive|negtransitive|"
                      "total|prefix-independent|prefix-linear)");
  PropertyVerdict v = check_property(f.automaton, it->second);
  out.report["command"] = "checkrel";
  out.report["property"] = c.property;
  out.report["holds"] = v.holds;
  if (v.holds) {
    out.text << c.property << ": holds\n";
    return 0;
  }
  auto word = [&](const Lasso& l) {
    std::string s;
    for (size_t k = 0; k < l.prefix.size(); ++k)
      s += (k ? " " : "") + f.letters[l.prefix[k]];
    s += s.empty() ? ";" : " ;";
    for (int x : l.cycle) s += " " + f.letters[x];
    return s;
  };
  json cex = json::array();
  out.text << c.property << ": fails\n";
  for (const auto& l : v.counterexample) {
    cex.push_back(word(l));
    out.text << "  witness word: " << word(l) << "\n";
  }
  out.report["counterexample"] = cex;
  if (!v.shift_word.empty()) {
    std::string u;
    for (size_t k = 0; k < v.shift_word.size(); ++k)
      u += (k ? " " : "") + f.letters[v.shift_word[k]];
    out.report["shiftWord"] = u;
    out.text << "  shift prefix: " << u << "\n";
  }
  return 1;
}

int cmd_build_pref(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  if (!f.game.preferences.count(c.player))
    throw input_error("no preference for player " + std::to_string(c.player));
  io::GpaFile g;
  g.automaton = f.game.preferences.at(c.player);
  for (int v = 0; v < f.game.arena.size(); ++v)
    g.letters.push_back(f.game.arena.name(v));
  std::string text = io::serialize_gpa(g);
  out.report["command"] = "build-pref";
  out.report["player"] = c.player;
  out.report["states"] = g.automaton.num_states();
  out.report["automaton"] = text;
  if (!c.out_path.empty()) {
    std::ofstream dst(c.out_path);
    if (!dst) throw input_error("cannot write file: " + c.out_path);
    dst << text;
    out.text << "wrote " << g.automaton.num_states() << "-state automaton to "
             << c.out_path << "\n";
  } else {
    out.text << text;
  }
  return 0;
}

int cmd_classes(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  Game g = preorder_game(f);
  if (!g.preferences.count(c.player))
    throw input_error("no preference for player " + std::to_string(c.player));
  int bound = c.bound > 0 ? c.bound : default_bound(g.arena);
  ClassLattice lat = enumerate_classes(g.preferences.at(c.player), g.arena, bound);
  out.report["command"] = "classes";
  out.report["player"] = c.player;
  out.report["bound"] = bound;
  out.report["complete"] = lat.complete;
  json reps = json::array();
  for (const auto& r : lat.representatives) reps.push_back(lasso_json(r, g.arena));
  out.report["representatives"] = reps;
  json order = json::array();
  for (const auto& row : lat.order) {
    json r = json::array();
    for (char x : row) r.push_back(static_cast<bool>(x));
    order.push_back(r);
  }
  out.report["order"] = order;
  out.text << lat.size() << " classes (bound " << bound << ", "
           << (lat.complete ? "complete" : "possibly incomplete") << ")\n";
  for (int a = 0; a < lat.size(); ++a) {
    out.text << "  class " << a << ": "
             << io::serialize_lasso(lat.representatives[a], g.arena) << "  <=";
    for (int b = 0; b < lat.size(); ++b)
      if (lat.order[a][b]) out.text << " " << b;
    out.text << "\n";
  }
  return lat.complete ? 0 : 1;
}

ValueTable values_for(const Game& g, int bound, int jobs) {
  std::vector<int> players;
  for (const auto& [p, _] : g.preferences) players.push_back(p);
  std::vector<PlayerValues> results(players.size());
  auto work = [&](size_t k) {
    const Gpa& pref = g.preferences.at(players[k]);
    ClassLattice lat = embed_total(enumerate_classes(pref, g.arena, bound));
    results[k] = compute_values(g, players[k], lat);
  };
  if (jobs > 1 && players.size() > 1) {
    std::vector<std::exception_ptr> errors(players.size());
    std::vector<std::thread> pool;
    for (size_t k = 0; k < players.size(); ++k)
      pool.emplace_back([&, k] {
        try {
          work(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (size_t k = 0; k < players.size(); ++k) work(k);
  }
  ValueTable table;
  for (size_t k = 0; k < players.size(); ++k)
    table[players[k]] = std::move(results[k]);
  return table;
}

int cmd_values(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  Game g = preorder_game(f);
  int bound = c.bound > 0 ? c.bound : default_bound(g.arena);
  ValueTable table = values_for(g, bound, c.jobs);
  out.report["command"] = "values";
  out.report["bound"] = bound;
  json players = json::object();
  for (const auto& [p, pv] : table) {
    json j;
    json reps = json::array();
    for (const auto& r : pv.lattice.representatives)
      reps.push_back(lasso_json(r, g.arena));
    j["classes"] = reps;
    json vals = json::object();
    for (int v = 0; v < g.arena.size(); ++v)
      vals[g.arena.name(v)] = pv.value_class[v];
    j["valueClass"] = vals;
    players[std::to_string(p)] = j;
    out.text << "player " << p << " (" << pv.lattice.size() << " classes):\n";
    for (int v = 0; v < g.arena.size(); ++v)
      out.text << "  " << g.arena.name(v) << ": class " << pv.value_class[v]
               << " ("
               << io::serialize_lasso(pv.lattice.representatives[pv.value_class[v]],
                                      g.arena)
               << ")\n";
  }
  out.report["players"] = players;
  return 0;
}

int cmd_characterize(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  Game g = preorder_game(f);
  if (c.outcome.empty()) throw input_error("--outcome <lasso> is required");
  Lasso rho = io::parse_lasso(c.outcome, g.arena);
  PrefixMode mode;
  if (c.mode == "independent") mode = PrefixMode::Independent;
  else if (c.mode == "linear") mode = PrefixMode::Linear;
  else throw input_error("--mode must be 'independent' or 'linear'");
  int bound = c.bound > 0 ? c.bound : default_bound(g.arena);
  ValueTable table = values_for(g, bound, c.jobs);
  CharacterizationResult r = characterize_outcome(g, rho, table, mode);
  out.report["command"] = "characterize";
  out.report["outcome"] = lasso_json(rho, g.arena);
  out.report["mode"] = c.mode;
  out.report["holds"] = r.holds;
  if (r.holds) {
    json prof = json::object();
    for (const auto& [p, m] : *r.profile)
      prof[std::to_string(p)] = machine_json(m, g.arena);
    out.report["profile"] = prof;
    out.text << "NE outcome (value characterization holds)\n";
    for (const auto& [p, m] : *r.profile)
      out.text << "player " << p << " machine (" << m.memory << " states):\n"
               << io::serialize_mealy(m, g.arena);
    return 0;
  }
  out.report["offender"] = r.offender;
  out.report["offendingPosition"] = r.offendingPosition;
  out.text << "not an NE outcome: player " << r.offender
           << " can enforce a better class at position " << r.offendingPosition
           << "\n";
  return 1;
}

int cmd_oracle(const Ctx& c, Output& out) {
  io::GameFile f = io::parse_game(slurp(c.game_path));
  int v0 = init_vertex(f, c);
  OracleReport r = oracle_search(f.game, v0, c.memory, c.profile_cap);
  out.report["command"] = "oracle";
  out.report["memoryBound"] = c.memory;
  out.report["profilesTested"] = r.profilesTested;
  out.report["refuted"] = r.refuted;
  out.report["equilibria"] = static_cast<long long>(r.neProfiles.size());
  json nes = json::array();
  for (const auto& profile : r.neProfiles) {
    json prof = json::object();
    for (const auto& [p, m] : profile)
      prof[std::to_string(p)] = machine_json(m, f.game.arena);
    nes.push_back(prof);
  }
  out.report["neProfiles"] = nes;
  out.text << r.profilesTested << " profiles tested, " << r.refuted
           << " refuted, " << r.neProfiles.size() << " equilibria\n";
  for (size_t k = 0; k < r.neProfiles.size(); ++k) {
    Lasso rho = outcome_of_profile(f.game.arena, r.neProfiles[k], v0);
    out.text << "  NE " << k << " outcome: "
             << io::serialize_lasso(rho, f.game.arena) << "\n";
  }
  return r.neProfiles.empty() ? 1 : 0;
}

int cmd_solve_pgame(const Ctx& c, Output& out) {
  ParityGame g = io::parse_pgame(slurp(c.game_path));
  Solution s = solve_parity(g);
  auto name = [&](int v) {
    return v < static_cast<int>(g.names.size()) ? g.names[v]
                                                : "n" + std::to_string(v);
  };
  out.report["command"] = "solve-pgame";
  json even = json::array(), odd = json::array();
  std::string even_line = "even wins:", odd_line = "odd wins:";
  for (int v = 0; v < g.size(); ++v) {
    if (s.win_even[v]) {
      even.push_back(name(v));
      even_line += " " + name(v);
    } else {
      odd.push_back(name(v));
      odd_line += " " + name(v);
    }
  }
  out.report["winEven"] = even;
  out.report["winOdd"] = odd;
  out.text << even_line << "\n" << odd_line << "\n";
  json strat = json::object();
  for (int v = 0; v < g.size(); ++v) {
    int t = s.win_even[v] ? s.strategy_even[v] : s.strategy_odd[v];
    bool owned = s.win_even[v] ? g.owner[v] == Side::Even : g.owner[v] == Side::Odd;
    if (owned && t >= 0) {
      strat[name(v)] = name(t);
      out.text << "strat " << name(v) << " " << name(t) << "\n";
    }
  }
  out.report["strategy"] = strat;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibria in games on graphs with automatic preferences"};
  app.require_subcommand(1);
  Ctx c;
  auto add_common = [&](CLI::App* sub, bool needs_init) {
    sub->add_option("input", c.game_path, "Input file")->required();
    sub->add_option("--format", c.format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    if (needs_init) sub->add_option("--init", c.init, "Initial vertex");
    return sub;
  };
  auto* ne = add_common(app.add_subcommand("check-ne", "Is a profile an NE?"), true);
  ne->add_option("--profile", c.profile_paths, "Mealy machine file (repeatable)")
      ->required();
  auto* co = add_common(
      app.add_subcommand("check-outcome", "Is a play an NE outcome?"), false);
  co->add_option("--outcome", c.outcome, "Lasso literal")->required();
  auto* ex = add_common(app.add_subcommand("exists-ne", "Does an NE exist?"), true);
  ex->add_option("--constraint", c.constraints,
                 "<player>:<lasso> the NE must strictly improve on (repeatable)");
  ex->add_option("--length", c.max_length, "Max |prefix|+|cycle| searched");
  ex->add_option("--candidate-cap", c.candidate_cap, "Max candidate plays");
  auto* cr = add_common(
      app.add_subcommand("checkrel", "Check a property of a 2-track relation"),
      false);
  cr->add_option("--property", c.property, "Property name")->required();
  auto* bp = add_common(
      app.add_subcommand("build-pref", "Emit a player's preference automaton"),
      false);
  bp->add_option("--player", c.player, "Player number")->required();
  bp->add_option("--out", c.out_path, "Write to a file instead of stdout");
  auto* cl = add_common(
      app.add_subcommand("classes", "Enumerate preference classes"), false);
  cl->add_option("--player", c.player, "Player number")->required();
  cl->add_option("--bound", c.bound, "Lasso length bound");
  auto* va = add_common(app.add_subcommand("values", "Vertex values per player"),
                        false);
  va->add_option("--bound", c.bound, "Lasso length bound");
  va->add_option("--jobs", c.jobs, "Worker threads for per-player solving");
  auto* ch = add_common(
      app.add_subcommand("characterize", "Value-based NE-outcome check"), false);
  ch->add_option("--outcome", c.outcome, "Lasso literal")->required();
  ch->add_option("--mode", c.mode, "independent or linear");
  ch->add_option("--bound", c.bound, "Lasso length bound");
  ch->add_option("--jobs", c.jobs, "Worker threads for per-player solving");
  auto* orc = add_common(
      app.add_subcommand("oracle", "Enumerate bounded-memory profiles"), true);
  orc->add_option("--memory", c.memory, "Memory bound per machine");
  orc->add_option("--profile-cap", c.profile_cap, "Max profiles tested");
  add_common(app.add_subcommand("solve-pgame", "Solve a parity game"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; any parse failure exits 2
  }

  Output out;
  out.as_json = c.format == "json";
  int code = 2;
  try {
    if (ne->parsed()) code = cmd_check_ne(c, out);
    else if (co->parsed()) code = cmd_check_outcome(c, out);
    else if (ex->parsed()) code = cmd_exists_ne(c, out);
    else if (cr->parsed()) code = cmd_checkrel(c, out);
    else if (bp->parsed()) code = cmd_build_pref(c, out);
    else if (cl->parsed()) code = cmd_classes(c, out);
    else if (va->parsed()) code = cmd_values(c, out);
    else if (ch->parsed()) code = cmd_characterize(c, out);
    else if (orc->parsed()) code = cmd_oracle(c, out);
    else code = cmd_solve_pgame(c, out);
  } catch (const cap_exceeded& e) {
    out.report["error"] = e.what();
    out.text << "resource cap exceeded: " << e.what() << "\n";
    out.emit();
    return 3;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  out.emit();
  return code;
}
