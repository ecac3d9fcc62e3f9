#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "metaguard/metaguard.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace metaguard;

namespace {

ExecutionTrace words(std::initializer_list<const char*> w) { return {w.begin(), w.end()}; }

TransitionTrace names(std::initializer_list<const char*> w) {
  TransitionTrace out;
  for (const auto* l : w) out.emplace_back(l);
  return out;
}

std::set<ExecutionTrace> as_set(const std::vector<ExecutionTrace>& v) { return {v.begin(), v.end()}; }

// Meta acceptance of a label sequence by plain subset simulation over the
// edge list.
bool meta_reads(const MetaAutomaton& m, const TransitionTrace& run) {
  std::set<std::string> cur(m.starts().begin(), m.starts().end());
  for (const auto& n : run) {
    std::set<std::string> next;
    for (const auto& e : m.transitions()) {
      if (cur.count(e.source) && n.contains(e.label)) next.insert(e.target);
    }
    cur = std::move(next);
  }
  return !cur.empty();
}

// Right-hand side of the correspondence: some run of a on t is read by m.
bool some_run_read(const IOAutomaton& a, const MetaAutomaton& m, const ExecutionTrace& t) {
  TransitionTrace run;
  auto dfs = [&](auto&& self, const std::string& q, std::size_t i) -> bool {
    if (i == t.size()) return meta_reads(m, run);
    for (const auto& tr : a.transitions()) {
      if (tr.source != q || tr.action != t[i]) continue;
      run.push_back(tr.name);
      const bool hit = self(self, tr.target, i + 1);
      run.pop_back();
      if (hit) return true;
    }
    return false;
  };
  for (const auto& q : a.starts()) {
    if (dfs(dfs, q, 0)) return true;
  }
  return false;
}

// Labels of transitions that fire from a reachable state of a, minus those
// that fire from a reachable (q, s) pair under the constraint rule.
std::set<std::string> hazard_oracle(const IOAutomaton& a, const MetaAutomaton& m) {
  std::set<std::string> all;
  for (const auto& q : oracle::bfs_reachable(a)) {
    for (const auto& t : a.transitions()) {
      if (t.source == q) all.insert(t.name.labels().begin(), t.name.labels().end());
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  std::deque<std::pair<std::string, std::string>> queue;
  for (const auto& q : a.starts()) {
    for (const auto& s : m.starts()) {
      if (seen.emplace(q, s).second) queue.emplace_back(q, s);
    }
  }
  std::set<std::string> used;
  while (!queue.empty()) {
    const auto [q, s] = queue.front();
    queue.pop_front();
    for (const auto& t : a.transitions()) {
      if (t.source != q) continue;
      for (const auto& e : m.transitions()) {
        if (e.source != s || !t.name.contains(e.label)) continue;
        used.insert(t.name.labels().begin(), t.name.labels().end());
        if (seen.emplace(t.target, e.target).second) queue.emplace_back(t.target, e.target);
      }
    }
  }
  std::set<std::string> out;
  for (const auto& l : all) {
    if (!used.count(l)) out.insert(l);
  }
  return out;
}

std::set<std::string> plain(const LabelSet& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Execution, ReactorExamples) {
  fixtures::Reactor r;
  EXPECT_TRUE(accepts_execution(r.system, words({"c", "w", "c", "l", "a", "e"})));
  EXPECT_TRUE(accepts_execution(r.system, {}));
  EXPECT_FALSE(accepts_execution(r.system, words({"w"})));
  EXPECT_FALSE(accepts_execution(r.safe, words({"c", "l"})));
  try {
    accepts_execution(r.system, words({"c", "zz"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAction);
  }
}

TEST(Runs, DeterministicReactorHasOneRun) {
  fixtures::Reactor r;
  const auto runs = runs_of(r.system, words({"c", "w", "c", "l", "a", "e"}));
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(*runs.begin(), names({"p1", "p2", "p1", "p4", "p6", "p8"}));
  EXPECT_TRUE(runs_of(r.system, words({"w"})).empty());
}

TEST(Runs, NondeterminismYieldsEveryRun) {
  IOAutomaton a("N", {"n0", "n1"}, {{"x", ActionKind::Output}},
                {{TransitionName("r1"), "n0", "x", "n0"},
                 {TransitionName("r2"), "n0", "x", "n1"},
                 {TransitionName("r3"), "n1", "x", "n1"}},
                {"n0"});
  const auto runs = runs_of(a, words({"x", "x"}));
  const std::set<TransitionTrace> expected{names({"r1", "r1"}), names({"r1", "r2"}),
                                           names({"r2", "r3"})};
  EXPECT_EQ(runs, expected);
}

TEST(TransitionTraces, ReactorConstraint) {
  fixtures::Reactor r;
  EXPECT_FALSE(accepts_transition_trace(r.constraint, names({"p1", "p2", "p1", "p4", "p6", "p8"})));
  EXPECT_TRUE(accepts_transition_trace(r.constraint, names({"p1", "p2"})));
  EXPECT_TRUE(accepts_transition_trace(r.constraint, {}));
  try {
    accepts_transition_trace(r.constraint, names({"p1", "p99"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTerminal);
  }
}

TEST(TransitionTraces, CompositeNamesNeedOneAuthorizedMember) {
  fixtures::Candy c;
  TransitionTrace t{TransitionName{"p3", "p9"}, TransitionName{"p1", "p15"}};
  EXPECT_TRUE(accepts_transition_trace(c.constraint, t));
  t = {TransitionName{"p3", "p9"}, TransitionName{"p5", "p13"}};
  EXPECT_FALSE(accepts_transition_trace(c.constraint, t));
  EXPECT_EQ(accepts_transition_trace(c.constraint, t), meta_reads(c.constraint, t));
}

TEST(Enumerate, ReactorBoundTwo) {
  fixtures::Reactor r;
  const auto traces = enumerate_traces(r.system, 2);
  const auto set = as_set(traces);
  EXPECT_EQ(set, oracle::traces(r.system, 2));
  EXPECT_TRUE(set.count(words({"c", "w"})));
  EXPECT_TRUE(set.count(words({"c", "l"})));
  EXPECT_FALSE(set.count(words({"w"})));
  EXPECT_TRUE(std::is_sorted(traces.begin(), traces.end(), oracle::shortlex_less));
  EXPECT_EQ(traces.size(), set.size());
}

TEST(Enumerate, BoundZeroAndConstrained) {
  fixtures::Reactor r;
  EXPECT_EQ(enumerate_traces(r.system, 0), std::vector<ExecutionTrace>{ExecutionTrace{}});
  EXPECT_FALSE(as_set(enumerate_traces(r.safe, 3)).count(words({"c", "l", "a"})));
  EXPECT_TRUE(as_set(enumerate_traces(r.system, 3)).count(words({"c", "l", "a"})));
}

TEST(Enumerate, BoundTooLarge) {
  fixtures::Reactor r;
  EXPECT_NO_THROW(enumerate_traces(r.safe, 12));
  try {
    enumerate_traces(r.system, 13);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundTooLarge);
  }
  EXPECT_NO_THROW(enumerate_traces(r.system, 2, TraceLimits{2}));
  EXPECT_THROW(enumerate_traces(r.system, 3, TraceLimits{2}), Error);
}

TEST(Theorem1, FixturesHold) {
  fixtures::Reactor r;
  const auto report = check_theorem1(r.system, r.constraint, 8);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.traces_checked, oracle::traces(r.system, 8).size());

  fixtures::Candy c;
  EXPECT_TRUE(check_theorem1(c.system, c.constraint, 6).ok());

  fixtures::Toy t;
  EXPECT_TRUE(check_theorem1(t.system, t.constraint, 8).ok());
}

TEST(Theorem1, AgreesWithDirectOracle) {
  fixtures::Candy c;
  const auto safe = as_set(enumerate_traces(c.safe, 6));
  for (const auto& t : oracle::traces(c.system, 6)) {
    EXPECT_EQ(safe.count(t) == 1, some_run_read(c.system, c.constraint, t)) << to_string(t);
  }
}

TEST(Inclusion, ReactorExamples) {
  fixtures::Reactor r;
  EXPECT_TRUE(check_language_inclusion(r.safe, r.system, 8).included);
  const auto back = check_language_inclusion(r.system, r.safe, 8);
  EXPECT_FALSE(back.included);
  ASSERT_TRUE(back.counterexample);
  EXPECT_EQ(*back.counterexample, words({"c", "l"}));
  EXPECT_EQ(back.counterexample, oracle::shortest_missing(r.system, r.safe, 8));
  EXPECT_TRUE(check_language_inclusion(r.system, r.safe, 1).included);
}

TEST(Inclusion, CandyConstrainedIsIncluded) {
  fixtures::Candy c;
  EXPECT_TRUE(check_language_inclusion(c.safe, c.system, 8).included);
  const auto back = check_language_inclusion(c.system, c.safe, 8);
  EXPECT_EQ(back.counterexample, oracle::shortest_missing(c.system, c.safe, 8));
}

TEST(Diagnose, Examples) {
  fixtures::Reactor r;
  EXPECT_EQ(plain(diagnose_hazards(r.system, r.constraint)), (std::set<std::string>{"p4"}));

  std::vector<MetaTransition> loops;
  for (const auto& l : r.system.labels()) loops.push_back({"u", l, "u"});
  const auto any = MetaAutomaton::over(r.system, "Any", {"u"}, loops, {"u"});
  EXPECT_TRUE(diagnose_hazards(r.system, any).empty());

  fixtures::Candy c;
  const auto hazards = plain(diagnose_hazards(c.system, c.constraint));
  EXPECT_EQ(hazards, hazard_oracle(c.system, c.constraint));
  EXPECT_EQ(hazards, (std::set<std::string>{"p5", "p8"}));
}

TEST(TraceProperties, RandomModels) {
  std::mt19937 rng(4242);
  for (int i = 0; i < 60; ++i) {
    const auto a = gen::automaton(rng);
    const auto m = effective_meta(gen::meta(rng, a), a);
    const std::size_t n = 5;

    const auto traces = enumerate_traces(a, n);
    const auto set = as_set(traces);
    EXPECT_TRUE(std::is_sorted(traces.begin(), traces.end(), oracle::shortlex_less));
    for (const auto& t : set) {
      for (std::size_t k = 0; k < t.size(); ++k) {
        EXPECT_TRUE(set.count(ExecutionTrace(t.begin(), t.begin() + k)));
      }
      EXPECT_EQ(accepts_execution(a, t), !runs_of(a, t).empty());
      for (const auto& run : runs_of(a, t)) {
        EXPECT_EQ(accepts_transition_trace(m, run), meta_reads(m, run));
      }
    }

    const auto report = check_theorem1(a, m, n);
    EXPECT_TRUE(report.ok()) << "model " << i;
    const auto safe = meta_compose(a, m).automaton;
    for (const auto& t : set) {
      EXPECT_EQ(accepts_execution(safe, t), some_run_read(a, m, t)) << to_string(t);
    }

    EXPECT_EQ(plain(diagnose_hazards(a, m)), hazard_oracle(a, m)) << "model " << i;

    const auto b = gen::automaton(rng);
    EXPECT_EQ(check_language_inclusion(a, b, n).counterexample, oracle::shortest_missing(a, b, n));
    EXPECT_EQ(check_language_inclusion(safe, a, n).counterexample, std::nullopt);
  }
}
