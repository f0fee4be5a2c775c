#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ngg/io.hpp"
#include "ngg/lattice.hpp"

using namespace ngg;

namespace {

std::string ref_arena_text() {
  return R"(# two-player arena
arena
player 2
vertex v0 owner 1
vertex v1 owner 1
vertex v2 owner 1
vertex v3 owner 2
edge v0 v3
edge v0 v2
edge v3 v0
edge v3 v1
edge v1 v0
edge v2 v0
)";
}

bool same_arena(const Arena& a, const Arena& b) {
  if (a.size() != b.size() || a.players() != b.players()) return false;
  for (int v = 0; v < a.size(); ++v) {
    if (a.name(v) != b.name(v) || a.owner(v) != b.owner(v)) return false;
    if (a.successors(v) != b.successors(v)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("arena files parse, round-trip, and report line errors", "[io]") {
  Arena a = io::parse_arena(ref_arena_text());
  Arena ref = testing::reference_arena();
  CHECK(same_arena(a, ref));
  CHECK(same_arena(io::parse_arena(io::serialize_arena(a)), a));

  auto line_of = [](const auto& fn) -> std::string {
    try {
      fn();
    } catch (const input_error& e) {
      return e.what();
    }
    return "";
  };
  CHECK(line_of([] { io::parse_arena(""); }).find("line 1") != std::string::npos);
  CHECK(line_of([] { io::parse_arena("arena\nbogus x\n"); }).find("line 2") !=
        std::string::npos);
  CHECK(line_of([] {
          io::parse_arena("arena\nplayer 1\nvertex a owner 1\nedge a b\n");
        }).find("line 4") != std::string::npos);
  CHECK(line_of([] {
          io::parse_arena("arena\nplayer 1\nvertex a owner 1\nvertex b owner 1\nedge a b\n");
        }) != "");  // b has no successor
}

TEST_CASE("lasso literals parse with empty or nonempty prefix", "[io]") {
  Arena a = testing::reference_arena();
  Lasso l = io::parse_lasso("v0 v3 ; v1 v0 v2", a);
  CHECK(l == testing::make_lasso({0, 3}, {1, 0, 2}));
  Lasso c = io::parse_lasso("; v0 v3", a);
  CHECK(c.prefix.empty());
  CHECK(c == testing::make_lasso({}, {0, 3}));
  CHECK(io::parse_lasso(io::serialize_lasso(l, a), a) == l);
  CHECK(io::parse_lasso(io::serialize_lasso(c, a), a) == c);
  CHECK_THROWS_AS(io::parse_lasso("v0 v3", a), input_error);
  CHECK_THROWS_AS(io::parse_lasso("v0 ;", a), input_error);
  CHECK_THROWS_AS(io::parse_lasso("v0 ; zz", a), input_error);
  // Parsing normalizes: an unrolled cycle collapses to its core.
  CHECK(io::parse_lasso("; v0 v3 v0 v3", a) == c);
}

TEST_CASE("mealy files parse to working machines and round-trip", "[io]") {
  Arena a = testing::reference_arena();
  std::string text = R"(mealy player 1
state fresh initial
state burnt
update fresh v1 burnt
move fresh v0 v3
move burnt v0 v2
move fresh v1 v0
move fresh v2 v0
move burnt v1 v0
move burnt v2 v0
)";
  MealyMachine m = io::parse_mealy(text, a);
  CHECK(m.player == 1);
  CHECK(m.memory == 2);
  CHECK(m.initial == 0);
  CHECK(m.move(0, 0) == 3);
  CHECK(m.step_memory(0, 1) == 1);
  CHECK(m.step_memory(0, 0) == 0);  // missing update keeps memory
  CHECK(m.move(1, 0) == 2);

  MealyMachine back = io::parse_mealy(io::serialize_mealy(m, a), a);
  CHECK(back.player == m.player);
  CHECK(back.memory == m.memory);
  CHECK(back.initial == m.initial);
  CHECK(back.update == m.update);
  CHECK(back.next_move == m.next_move);

  CHECK_THROWS_AS(io::parse_mealy("mealy player 1\nstate s\n", a), input_error);
  CHECK_THROWS_AS(io::parse_mealy("mealy player 1\nstate s initial\nmove t v0 v1\n", a),
                  input_error);
  CHECK_THROWS_AS(io::parse_mealy("mealy player 1\nstate s initial\nmove s zz v1\n", a),
                  input_error);
}

TEST_CASE("automaton files: explicit letters, macros, formula", "[io]") {
  // 2-track automaton over {v0,v1,v2}: accept when track 2 hits v1 first
  // strictly before track 1 does, tracked with target macros.
  std::string text = R"(gpa tracks 2
alphabet v0 v1 v2
target v1
state wait initial prio 1
state win prio 2
state lose prio 1
trans wait (T,*) lose
trans wait (!T,T) win
trans wait (!T,!T) wait
trans win (*,*) win
trans lose (*,*) lose
)";
  io::GpaFile f = io::parse_gpa(text);
  const Gpa& g = f.automaton;
  CHECK(g.tracks == 2);
  CHECK(g.base1 == 3);
  CHECK(g.num_states() == 3);
  CHECK(g.deterministic);
  CHECK(g.num_conditions() == 1);
  CHECK(g.formula.str() == "c0");
  g.check_dpa_shape("parse");
  // Specific-before-macro: (T,*) covers (v1,v1), so wait reading (v1,v1) -> lose.
  CHECK(g.step(0, g.pack(1, 1)) == 2);
  CHECK(g.step(0, g.pack(0, 1)) == 1);
  CHECK(g.step(0, g.pack(2, 2)) == 0);
  // y hits v1 before x does: accepted; simultaneous: rejected.
  Lasso x = testing::make_lasso({0, 0}, {1});
  Lasso y = testing::make_lasso({0}, {1});
  CHECK(accepts(g, x, y).accepted);
  CHECK_FALSE(accepts(g, y, x).accepted);
  CHECK_FALSE(accepts(g, x, x).accepted);

  io::GpaFile back = io::parse_gpa(io::serialize_gpa(f));
  CHECK(back.letters == f.letters);
  CHECK(back.targets == f.targets);
  CHECK(back.automaton.delta == g.delta);
  CHECK(back.automaton.conditions == g.conditions);
  CHECK(back.automaton.initial == g.initial);
  CHECK(back.automaton.formula.str() == g.formula.str());
}

TEST_CASE("automaton files: multi-condition formulas and error lines", "[io]") {
  std::string text = R"(gpa tracks 1
alphabet a b
state p initial prio 2 1
state q prio 1 2
trans p a q
trans p b p
trans q * p
formula OR(c0,AND(c0,c1))
)";
  io::GpaFile f = io::parse_gpa(text);
  CHECK(f.automaton.num_conditions() == 2);
  CHECK(f.automaton.formula.str() == "OR(c0,AND(c0,c1))");
  CHECK(f.automaton.step(1, 0) == 0);
  CHECK(f.automaton.step(1, 1) == 0);
  io::GpaFile back = io::parse_gpa(io::serialize_gpa(f));
  CHECK(back.automaton.formula.str() == f.automaton.formula.str());
  CHECK(back.automaton.conditions == f.automaton.conditions);

  auto msg = [](const std::string& t) -> std::string {
    try {
      io::parse_gpa(t);
    } catch (const input_error& e) {
      return e.what();
    }
    return "";
  };
  CHECK(msg("gpa tracks 3\n").find("line 1") != std::string::npos);
  CHECK(msg("gpa tracks 1\nalphabet a\nstate p initial prio 1\ntrans p a p\ntrans p a p\n")
            .find("line 5") != std::string::npos);
  CHECK(msg("gpa tracks 1\nalphabet a\nstate p initial prio 1 2\nstate q prio 1\n")
            .find("line 4") != std::string::npos);
  CHECK(msg("gpa tracks 1\nalphabet a\nstate p initial prio 1 2\ntrans p a p\nformula c5\n")
            .find("line 5") != std::string::npos);
  CHECK(msg("gpa tracks 1\nalphabet a\nstate p initial prio 1 2\ntrans p a p\n")
            .find("formula") != std::string::npos);
}

TEST_CASE("nondeterministic automaton files keep all branches", "[io]") {
  std::string text = R"(gpa tracks 1 nondet
alphabet a b
state p initial prio 1
state q prio 2
trans p a p
trans p a q
trans p b p
trans q * q
)";
  io::GpaFile f = io::parse_gpa(text);
  CHECK_FALSE(f.automaton.deterministic);
  CHECK(f.automaton.delta[0][0] == std::vector<int>{0, 1});
  io::GpaFile back = io::parse_gpa(io::serialize_gpa(f));
  CHECK(back.automaton.delta == f.automaton.delta);
  CHECK_FALSE(back.automaton.deterministic);
}

TEST_CASE("parity game files round-trip and solve", "[io]") {
  std::string text = R"(pgame
vertex a owner even prio 1
vertex b owner odd prio 2
edge a b
edge b a
edge b b
)";
  ParityGame g = io::parse_pgame(text);
  CHECK(g.size() == 2);
  CHECK(g.owner[0] == Side::Even);
  CHECK(g.priority[1] == 2);
  Solution s = solve_parity(g);
  CHECK(s.win_even[0]);  // Odd cannot avoid priority 2 forever
  CHECK(s.win_even[1]);
  ParityGame back = io::parse_pgame(io::serialize_pgame(g));
  CHECK(back.owner == g.owner);
  CHECK(back.priority == g.priority);
  CHECK(back.succ == g.succ);
  CHECK(back.names == g.names);
  CHECK_THROWS_AS(io::parse_pgame("pgame\nvertex a owner even prio 1\n"), input_error);
  CHECK_THROWS_AS(io::parse_pgame("pgame\nvertex a owner up prio 1\nedge a a\n"),
                  input_error);
}

TEST_CASE("objective expressions parse, nest, and print back", "[io]") {
  Arena a = testing::reference_arena();
  ObjectiveSpec s = io::parse_objective("lex(mincost(T={v1}), buechi(T={v2,v0}))", a);
  REQUIRE(s.kind == ObjectiveSpec::Kind::Lex);
  REQUIRE(s.parts.size() == 2);
  CHECK(s.parts[0].kind == ObjectiveSpec::Kind::MinCost);
  CHECK(s.parts[0].target == std::vector<int>{1});
  CHECK(s.parts[1].target == (std::vector<int>{2, 0}));
  CHECK(io::objective_to_string(s, a) == "lex(mincost(T={v1}),buechi(T={v2,v0}))");
  ObjectiveSpec back = io::parse_objective(io::objective_to_string(s, a), a);
  CHECK(io::objective_to_string(back, a) == io::objective_to_string(s, a));

  ObjectiveSpec c = io::parse_objective("count(reach(T={v1}),buechi(T={v2}))", a);
  CHECK(c.kind == ObjectiveSpec::Kind::Count);
  CHECK_NOTHROW(build_preference(c, a.size()));

  CHECK_THROWS_AS(io::parse_objective("parity(T={v1})", a), input_error);
  CHECK_THROWS_AS(io::parse_objective("reach(T={zz})", a), input_error);
  CHECK_THROWS_AS(io::parse_objective("reach(T={v1}) junk", a), input_error);
  CHECK_THROWS_AS(io::parse_objective("reach(T={v1}", a), input_error);
}

TEST_CASE("game files build full preference automata", "[io]") {
  std::string text = R"(game
player 2
vertex v0 owner 1
vertex v1 owner 1
vertex v2 owner 1
vertex v3 owner 2
edge v0 v3
edge v0 v2
edge v3 v0
edge v3 v1
edge v1 v0
edge v2 v0
pref 1 mincost(T={v1})
pref 2 buechi(T={v2})
)";
  io::GameFile f = io::parse_game(text);
  CHECK(same_arena(f.game.arena, testing::reference_arena()));
  REQUIRE(f.game.preferences.count(1));
  REQUIRE(f.game.preferences.count(2));
  f.game.validate();

  // The parsed game matches the handcrafted reference game: same equilibrium
  // outcome verdicts on a spread of plays.
  Lasso good = testing::make_lasso({}, {0, 3});
  Lasso bad = testing::make_lasso({0, 3, 1}, {0, 2});
  CHECK(check_outcome(f.game, good).isNEOutcome);
  CHECK(check_outcome(f.game, bad).isNEOutcome);
  auto ex = exists_ne(f.game, 0);
  CHECK(ex.exists);

  io::GameFile back = io::parse_game(io::serialize_game(f));
  CHECK(same_arena(back.game.arena, f.game.arena));
  CHECK(io::serialize_game(back) == io::serialize_game(f));

  CHECK_THROWS_AS(io::parse_game("game\nplayer 1\nvertex a owner 1\nedge a a\n"),
                  input_error);  // missing pref line
  CHECK_THROWS_AS(
      io::parse_game("game\nplayer 1\nvertex a owner 1\nedge a a\npref 2 reach(T={a})\n"),
      input_error);  // player out of range
}
