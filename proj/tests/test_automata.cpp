#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ngg/automata.hpp"
#include "ngg/relprops.hpp"

using namespace ngg;
using namespace ngg::testing;

namespace {
Gpa one_state_loop(int prio) {
  Gpa a;
  a.tracks = 1;
  a.base1 = 2;
  a.delta.assign(1, std::vector<std::vector<int>>(2, {0}));
  a.conditions = {{prio}};
  a.formula = Formula::leaf(0);
  return a;
}
}  // namespace

TEST_CASE("one-state loops: odd empty, even nonempty") {
  CHECK(is_empty(one_state_loop(1)).empty);
  auto r = is_empty(one_state_loop(0));
  REQUIRE_FALSE(r.empty);
  CHECK(accepts(one_state_loop(0), *r.witness).accepted);
}

TEST_CASE("reachability preference accepts the reference pair") {
  // Fig-style strict reachability preference with T = {1} over a 4-letter
  // vertex alphabet: x = (0 3)^w never reaches T, y = 0 3 1 (0 2)^w does.
  Gpa a = build_reach_strict({1}, 4);
  Lasso x = make_lasso({}, {0, 3});
  Lasso y = make_lasso({0, 3, 1}, {0, 2});
  CHECK(accepts(a, x, y).accepted);
  CHECK_FALSE(accepts(a, y, x).accepted);
  CHECK_FALSE(accepts(a, x, x).accepted);
  CHECK_FALSE(accepts(a, y, y).accepted);
}

TEST_CASE("max-reward preference prefers later reaching") {
  Gpa a = build_maxreward_strict({1}, 4);
  Lasso x = make_lasso({0, 1}, {0});
  Lasso y = make_lasso({0, 0, 1}, {0});
  CHECK(accepts(a, x, y).accepted);   // y reaches strictly later
  CHECK_FALSE(accepts(a, y, x).accepted);
  // never reaching is worst: x reaches, z never does -> z < x
  Lasso z = make_lasso({}, {0});
  CHECK(accepts(a, z, x).accepted);
  CHECK_FALSE(accepts(a, x, z).accepted);
}

TEST_CASE("complement flips membership on random automata and lassos") {
  std::mt19937 rng(101);
  for (int it = 0; it < 60; ++it) {
    Gpa a = random_dpa(rng, 1, 3, 5, 2, 3, true);
    Gpa c = complement(a);
    for (int k = 0; k < 40; ++k) {
      Lasso w = random_lasso(rng, 3, 3, 4);
      CHECK(accepts(a, w).accepted != accepts(c, w).accepted);
    }
    // double complement preserves the language
    Gpa cc = complement(c);
    for (int k = 0; k < 10; ++k) {
      Lasso w = random_lasso(rng, 3, 3, 4);
      CHECK(accepts(a, w).accepted == accepts(cc, w).accepted);
    }
  }
}

TEST_CASE("combine realizes the boolean combination of part languages") {
  std::mt19937 rng(202);
  for (int it = 0; it < 40; ++it) {
    Gpa a = random_dpa(rng, 1, 3, 4, 1, 3);
    Gpa b = random_dpa(rng, 1, 3, 4, 1, 3);
    bool conj = rng() % 2;
    Formula f = conj ? Formula::all_of({Formula::leaf(0), Formula::leaf(1)})
                     : Formula::any_of({Formula::leaf(0), Formula::leaf(1)});
    Gpa c = combine({a, b}, f);
    for (int k = 0; k < 50; ++k) {
      Lasso w = random_lasso(rng, 3, 3, 4);
      bool ia = accepts(a, w).accepted, ib = accepts(b, w).accepted;
      bool expect = conj ? (ia && ib) : (ia || ib);
      CHECK(accepts(c, w).accepted == expect);
    }
  }
}

TEST_CASE("combine of A with its complement is empty") {
  std::mt19937 rng(303);
  for (int it = 0; it < 20; ++it) {
    Gpa a = random_dpa(rng, 1, 2, 4, 1, 3);
    Gpa c = combine({a, complement(a)}, Formula::all_of({Formula::leaf(0), Formula::leaf(1)}));
    CHECK(is_empty(c).empty);
  }
}

TEST_CASE("emptiness agrees with the subset-cycle brute force") {
  std::mt19937 rng(404);
  for (int it = 0; it < 300; ++it) {
    Gpa a = random_dpa(rng, 1, 2, 8, 2, 3, true);
    auto r = is_empty(a);
    CHECK(r.empty == brute_force_empty(a));
    if (!r.empty) {
      REQUIRE(r.witness.has_value());
      CHECK(accepts(a, *r.witness).accepted);
    }
  }
}

TEST_CASE("emptiness of nondeterministic automata") {
  std::mt19937 rng(505);
  for (int it = 0; it < 100; ++it) {
    Gpa a = random_dpa(rng, 1, 2, 6, 2, 3, true);
    // Randomly drop/duplicate transitions to make it nondeterministic.
    a.deterministic = false;
    for (auto& row : a.delta)
      for (auto& cell : row) {
        if (rng() % 4 == 0) cell.clear();
        if (rng() % 4 == 0) {
          cell.push_back(static_cast<int>(rng() % a.num_states()));
          std::sort(cell.begin(), cell.end());
          cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
        }
      }
    auto r = is_empty(a);
    CHECK(r.empty == brute_force_empty(a));
    if (!r.empty) CHECK(accepts(a, *r.witness).accepted);
  }
}

TEST_CASE("universality via complement emptiness") {
  Gpa all = one_state_loop(0);
  CHECK(is_universal(all).universal);
  Gpa none = one_state_loop(1);
  auto u = is_universal(none);
  CHECK_FALSE(u.universal);
  CHECK_FALSE(accepts(none, *u.counterexample).accepted);

  std::mt19937 rng(606);
  for (int it = 0; it < 100; ++it) {
    Gpa a = random_dpa(rng, 1, 2, 5, 1, 3);
    auto v = is_universal(a);
    CHECK(v.universal == brute_force_empty(complement(a)));
    if (!v.universal) CHECK_FALSE(accepts(a, *v.counterexample).accepted);
  }
}

namespace {
// Product of a 2-track automaton with a fixed track-1 lasso: accepts the
// track-2 words completing x to a pair in the relation.
Gpa constrain_track1(const Gpa& a, const Lasso& x) {
  Gpa out;
  out.tracks = 1;
  out.base1 = a.base2;
  out.deterministic = false;
  int L = x.length();
  int pre = static_cast<int>(x.prefix.size());
  auto id = [&](int pos, int q) { return pos * a.num_states() + q; };
  out.delta.assign(static_cast<size_t>(L) * a.num_states(),
                   std::vector<std::vector<int>>(a.base2));
  for (int pos = 0; pos < L; ++pos) {
    int nxt = pos + 1 < L ? pos + 1 : pre;
    for (int q = 0; q < a.num_states(); ++q)
      for (int b = 0; b < a.base2; ++b)
        for (int s : a.delta[q][a.pack(x.at(pos), b)])
          out.delta[id(pos, q)][b].push_back(id(nxt, s));
  }
  out.initial = id(0, a.initial);
  out.conditions.assign(a.num_conditions(), std::vector<int>(out.num_states()));
  for (int j = 0; j < a.num_conditions(); ++j)
    for (int pos = 0; pos < L; ++pos)
      for (int q = 0; q < a.num_states(); ++q)
        out.conditions[j][id(pos, q)] = a.conditions[j][q];
  out.formula = a.formula;
  return out;
}
}  // namespace

TEST_CASE("projection: trivial cases") {
  std::mt19937 rng(707);
  Gpa diag = diagonal_relation(3);
  Gpa p1 = project(diag, 1);
  for (int k = 0; k < 30; ++k)
    CHECK(accepts(p1, random_lasso(rng, 3, 3, 3)).accepted);  // universal
  // Empty relation projects to the empty language.
  Gpa empty_rel = diag;
  empty_rel.formula = Formula::leaf(0);
  for (int& p : empty_rel.conditions[0]) p = 1;
  CHECK(is_empty(project(empty_rel, 1)).empty);
}

TEST_CASE("projection witnesses extend to pair witnesses") {
  std::mt19937 rng(808);
  for (int it = 0; it < 80; ++it) {
    Gpa a = random_dpa(rng, 2, 2, 4, 1, 3);
    Gpa p = project(a, 1);
    auto r = is_empty(p);
    CHECK(r.empty == is_empty(a).empty);
    if (!r.empty) {
      // The projection witness x is completed by some y.
      auto pair_search = is_empty(constrain_track1(a, *r.witness));
      REQUIRE_FALSE(pair_search.empty);
      CHECK(accepts(a, *r.witness, *pair_search.witness).accepted);
    }
  }
}

TEST_CASE("projection membership matches bounded completion search") {
  std::mt19937 rng(909);
  for (int it = 0; it < 60; ++it) {
    Gpa a = random_dpa(rng, 2, 2, 3, 1, 3);
    Gpa p = project(a, 1);
    for (int k = 0; k < 10; ++k) {
      Lasso x = random_lasso(rng, 2, 2, 3);
      bool member = accepts(p, x).accepted;
      bool completion = !is_empty(constrain_track1(a, x)).empty;
      CHECK(member == completion);
    }
  }
}

TEST_CASE("priority reduction and quotient preserve the language") {
  std::mt19937 rng(1010);
  for (int it = 0; it < 80; ++it) {
    Gpa a = random_dpa(rng, 1, 3, 6, 2, 4, true);
    Gpa reduced = a;
    reduce_priorities(reduced);
    Gpa merged = quotient_bisim(reduced);
    CHECK(merged.num_states() <= a.num_states());
    for (int j = 0; j < reduced.num_conditions(); ++j)
      CHECK(reduced.max_priority(j) <= a.max_priority(j));
    for (int k = 0; k < 40; ++k) {
      Lasso w = random_lasso(rng, 3, 3, 4);
      bool expect = accepts(a, w).accepted;
      CHECK(accepts(reduced, w).accepted == expect);
      CHECK(accepts(merged, w).accepted == expect);
    }
  }
}
