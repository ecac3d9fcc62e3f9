#include <gtest/gtest.h>

#include <random>

#include "metaguard/metaguard.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace metaguard;

namespace {

std::set<std::string> names_of(const IOAutomaton& a, ActionKind k) {
  auto v = a.actions_of(k);
  return {v.begin(), v.end()};
}

// Alphabet equations of the composition, evaluated on the components.
void expect_alphabet_laws(const std::vector<IOAutomaton>& parts, const IOAutomaton& composed) {
  std::set<std::string> in, out, internal;
  for (const auto& p : parts) {
    for (const auto& a : p.actions_of(ActionKind::Input)) in.insert(a);
    for (const auto& a : p.actions_of(ActionKind::Output)) out.insert(a);
    for (const auto& a : p.actions_of(ActionKind::Internal)) internal.insert(a);
  }
  for (const auto& o : out) in.erase(o);
  EXPECT_EQ(names_of(composed, ActionKind::Input), in);
  EXPECT_EQ(names_of(composed, ActionKind::Output), out);
  EXPECT_EQ(names_of(composed, ActionKind::Internal), internal);
}

// Participants of every composite step are exactly the components that know
// the action; everyone else stays put.
void expect_participation(const std::vector<IOAutomaton>& parts, const Composition& c) {
  const auto& a = c.automaton;
  for (const auto& t : a.transitions()) {
    const auto& from = c.vector_of(t.source);
    const auto& to = c.vector_of(t.target);
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const auto own = parts[j].labels();
      std::size_t contributed = 0;
      for (const auto& l : t.name.labels()) contributed += own.count(l);
      if (parts[j].has_action(t.action)) {
        EXPECT_EQ(contributed, 1u) << t.name << " component " << j;
      } else {
        EXPECT_EQ(contributed, 0u) << t.name << " component " << j;
        EXPECT_EQ(project(from, j + 1), project(to, j + 1));
      }
    }
  }
}

}  // namespace

TEST(Compatibility, CandyMachineAndUserAreStronglyCompatible) {
  fixtures::Candy c;
  EXPECT_TRUE(check_strong_compatibility(ComponentCollection({c.machine, c.user})).ok());
}

TEST(Compatibility, TwoMachinesOverlapOnOutputs) {
  fixtures::Candy c;
  const auto report =
      check_strong_compatibility(ComponentCollection({c.machine, c.machine.with_id("Machine2")}));
  EXPECT_FALSE(report.ok());
  std::set<std::string> overlapping;
  for (const auto& v : report.violations) {
    EXPECT_EQ(v.clause, CompatibilityClause::OutputOverlap);
    EXPECT_EQ(v.first, 1u);
    EXPECT_EQ(v.second, 2u);
    overlapping.insert(v.action);
  }
  EXPECT_TRUE(overlapping.count("s"));
  EXPECT_EQ(overlapping, (std::set<std::string>{"s", "a"}));
}

TEST(Compatibility, InternalActionLeak) {
  IOAutomaton hidden("H", {"h0"}, {{"e", ActionKind::Internal}},
                     {{TransitionName("h1"), "h0", "e", "h0"}}, {"h0"});
  IOAutomaton listener("L", {"l0"}, {{"e", ActionKind::Input}},
                       {{TransitionName("k1"), "l0", "e", "l0"}}, {"l0"});
  const auto report = check_strong_compatibility(ComponentCollection({hidden, listener}));
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].clause, CompatibilityClause::InternalLeak);
  EXPECT_EQ(report.violations[0].action, "e");
  EXPECT_EQ(report.violations[0].first, 1u);

  try {
    compose(ComponentCollection({hidden, listener}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Incompatible);
  }
}

TEST(Collection, IndicesMustAscendAndIdsDiffer) {
  fixtures::Candy c;
  EXPECT_THROW(ComponentCollection({2, 1}, {c.machine, c.user}), Error);
  EXPECT_THROW(ComponentCollection({1, 1}, {c.machine, c.user}), Error);
  EXPECT_THROW(ComponentCollection({c.machine, c.machine}), Error);
  EXPECT_THROW(ComponentCollection(std::vector<IOAutomaton>{}), Error);
  ComponentCollection ok({3, 7}, {c.machine, c.user});
  EXPECT_EQ(ok.indices(), (std::vector<std::size_t>{3, 7}));
}

TEST(Compose, CandySynchronizesDispenseStep) {
  fixtures::Candy c;
  const auto composed = compose(c.machine, c.user);
  bool found = false;
  for (const auto& t : composed.automaton.transitions()) {
    if (t.name == TransitionName{"p1", "p15"}) {
      found = true;
      EXPECT_EQ(t.action, "s");
      EXPECT_EQ(composed.vector_of(t.source), (CompositeState{{"m1", "u1"}}));
      EXPECT_EQ(composed.vector_of(t.target), (CompositeState{{"m0", "u0"}}));
    }
  }
  EXPECT_TRUE(found);

  // The greedy double press from (m1, u1).
  bool double_press = false;
  for (const auto& t : composed.automaton.transitions()) {
    double_press = double_press || (t.name == TransitionName{"p5", "p13"} && t.action == "b1" &&
                                    t.source == "m1.u1" && t.target == "m1.u1");
  }
  EXPECT_TRUE(double_press);
}

TEST(Compose, CandyAlphabet) {
  fixtures::Candy c;
  const auto composed = compose(c.machine, c.user).automaton;
  EXPECT_TRUE(composed.actions_of(ActionKind::Input).empty());
  EXPECT_EQ(names_of(composed, ActionKind::Output), (std::set<std::string>{"b1", "b2", "s", "a"}));
  EXPECT_TRUE(composed.actions_of(ActionKind::Internal).empty());
  expect_alphabet_laws({c.machine, c.user}, composed);
  EXPECT_TRUE(validate(composed).ok());
}

TEST(Compose, SingleComponentIsIsomorphic) {
  fixtures::Reactor r;
  const auto composed = compose(ComponentCollection({r.system}));
  const auto& a = composed.automaton;
  EXPECT_EQ(a.states().size(), r.system.states().size());
  EXPECT_EQ(a.transitions().size(), r.system.transitions().size());
  for (std::size_t i = 0; i < a.states().size(); ++i) {
    EXPECT_EQ(composed.vectors[i].parts.size(), 1u);
    EXPECT_EQ(composed.vectors[i].parts[0], a.states()[i]);
  }
  std::set<Transition> original(r.system.transitions().begin(), r.system.transitions().end());
  std::set<Transition> mine(a.transitions().begin(), a.transitions().end());
  EXPECT_EQ(mine, original);
  EXPECT_EQ(oracle::traces(a, 8), oracle::traces(r.system, 8));
}

TEST(Compose, FullProductKeepsEveryVector) {
  fixtures::Candy c;
  const auto full = compose(c.machine, c.user, {"", true});
  EXPECT_EQ(full.automaton.states().size(), 6u);
  const auto reach = compose(c.machine, c.user);
  EXPECT_LT(reach.automaton.states().size(), 6u);
  EXPECT_EQ(reachable(full.automaton).pruned.states().size(), reach.automaton.states().size());
  EXPECT_EQ(oracle::traces(full.automaton, 6), oracle::traces(reach.automaton, 6));
  EXPECT_TRUE(full.automaton.has_state("m1.u0"));
}

TEST(Compose, SharedLabelsAreRejected) {
  IOAutomaton x("X", {"x0"}, {{"go", ActionKind::Output}}, {{TransitionName("p1"), "x0", "go", "x0"}},
                {"x0"});
  IOAutomaton y("Y", {"y0"}, {{"go", ActionKind::Input}}, {{TransitionName("p1"), "y0", "go", "y0"}},
                {"y0"});
  try {
    compose(x, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LabelClash);
  }
}

TEST(Compose, NondeterministicChoicesMultiply) {
  IOAutomaton x("X", {"x0", "x1"}, {{"go", ActionKind::Output}},
                {{TransitionName("a1"), "x0", "go", "x0"}, {TransitionName("a2"), "x0", "go", "x1"}},
                {"x0"});
  IOAutomaton y("Y", {"y0", "y1"}, {{"go", ActionKind::Input}},
                {{TransitionName("b1"), "y0", "go", "y0"},
                 {TransitionName("b2"), "y0", "go", "y1"},
                 {TransitionName("b3"), "y1", "go", "y1"}},
                {"y0"});
  const auto c = compose(x, y);
  std::size_t from_start = 0;
  for (const auto& t : c.automaton.transitions()) from_start += t.source == "x0.y0";
  EXPECT_EQ(from_start, 4u);
  expect_participation({x, y}, c);
}

TEST(Project, Positions) {
  EXPECT_EQ(project(CompositeState{{"m1", "u1"}}, 1), "m1");
  EXPECT_EQ(project(CompositeState{{"m1", "u1"}}, 2), "u1");
  EXPECT_EQ(project(CompositeState{{"m0", "u1", "c0"}}, 3), "c0");
  try {
    project(CompositeState{{"m1", "u1"}}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
  EXPECT_THROW(project(CompositeState{{"m1"}}, 0), Error);
}

TEST(StateNaming, SingleCharactersConcatenate) {
  EXPECT_EQ(join_state_names({"1", "1"}), "11");
  EXPECT_EQ(join_state_names({"m1", "u1", "c0"}), "m1.u1.c0");
}

TEST(CompositionProperties, RandomCompatiblePairs) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto [left, right] = gen::compatible_pair(rng);
    const ComponentCollection cs({left, right});
    ASSERT_TRUE(check_strong_compatibility(cs).ok());
    const auto c = compose(cs);
    expect_alphabet_laws({left, right}, c.automaton);
    EXPECT_TRUE(validate(c.automaton).ok());
    expect_participation({left, right}, c);

    const std::size_t n = c.automaton.actions().size() <= 4 ? 8 : 5;
    const auto lib = enumerate_traces(c.automaton, n);
    EXPECT_EQ(std::set<ExecutionTrace>(lib.begin(), lib.end()),
              oracle::product_traces({left, right}, n))
        << "pair " << i;

    const auto full = compose(cs, {"", true});
    EXPECT_EQ(reachable(full.automaton).pruned.transitions().size(),
              c.automaton.transitions().size());
  }
}

TEST(CompositionProperties, ThreeComponents) {
  std::mt19937 rng(77);
  for (int i = 0; i < 10; ++i) {
    auto [left, right] = gen::compatible_pair(rng);
    // A third component listening on every shared action of the pair.
    std::vector<Action> acts;
    for (const auto& a : left.actions()) {
      if (right.has_action(a.name)) acts.push_back({a.name, ActionKind::Input});
    }
    auto third = gen::automaton(rng, "Third", acts, 2, "w", "c");
    const auto c = compose(ComponentCollection({left, right, third}));
    expect_alphabet_laws({left, right, third}, c.automaton);
    EXPECT_TRUE(validate(c.automaton).ok());
    expect_participation({left, right, third}, c);
    const auto lib = enumerate_traces(c.automaton, 5);
    EXPECT_EQ(std::set<ExecutionTrace>(lib.begin(), lib.end()),
              oracle::product_traces({left, right, third}, 5));
  }
}
