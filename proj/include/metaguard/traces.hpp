#ifndef METAGUARD_TRACES_HPP
#define METAGUARD_TRACES_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "metaguard/automaton.hpp"
#include "metaguard/meta.hpp"

namespace metaguard {

using ExecutionTrace = std::vector<std::string>;
// One name per step; atomic subjects produce singleton names.
using TransitionTrace = std::vector<TransitionName>;

struct TraceLimits {
  std::size_t cap = 12;
};

inline std::string to_string(const ExecutionTrace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += t[i];
  }
  return out;
}

inline std::string to_string(const TransitionTrace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += t[i].str();
  }
  return out;
}

namespace detail {

// Dense successor table for subset simulation. Actions are ordered by name so
// breadth-first walks come out in shortlex order.
class Simulator {
 public:
  using StateSet = std::vector<std::size_t>;

  explicit Simulator(const IOAutomaton& a) {
    for (std::size_t i = 0; i < a.states().size(); ++i) index_.emplace(a.states()[i], i);
    for (const auto& act : a.actions()) actions_.push_back(act.name);
    std::sort(actions_.begin(), actions_.end());
    actions_.erase(std::unique(actions_.begin(), actions_.end()), actions_.end());
    for (std::size_t k = 0; k < actions_.size(); ++k) action_index_.emplace(actions_[k], k);
    succ_.assign(a.states().size() * actions_.size(), {});
    for (const auto& t : a.transitions()) {
      auto s = index_.find(t.source);
      auto d = index_.find(t.target);
      auto k = action_index_.find(t.action);
      if (s == index_.end() || d == index_.end() || k == action_index_.end()) continue;
      succ_[s->second * actions_.size() + k->second].push_back(d->second);
    }
    for (auto& v : succ_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (const auto& s : a.starts()) {
      if (auto it = index_.find(s); it != index_.end()) start_.push_back(it->second);
    }
    std::sort(start_.begin(), start_.end());
    start_.erase(std::unique(start_.begin(), start_.end()), start_.end());
  }

  const std::vector<std::string>& actions() const noexcept { return actions_; }
  const StateSet& start() const noexcept { return start_; }

  std::optional<std::size_t> action(const std::string& name) const {
    auto it = action_index_.find(name);
    if (it == action_index_.end()) return std::nullopt;
    return it->second;
  }

  StateSet post(const StateSet& from, std::size_t action) const {
    StateSet out;
    for (auto q : from) {
      const auto& s = succ_[q * actions_.size() + action];
      out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::string> actions_;
  std::map<std::string, std::size_t, std::less<>> action_index_;
  std::vector<std::vector<std::size_t>> succ_;
  StateSet start_;
};

}  // namespace detail

inline bool accepts_execution(const IOAutomaton& a, const ExecutionTrace& t) {
  detail::Simulator sim(a);
  auto current = sim.start();
  for (const auto& name : t) {
    auto k = sim.action(name);
    if (!k) throw Error(ErrorCode::UnknownAction, "'" + name + "' in " + a.id());
    current = sim.post(current, *k);
  }
  return !current.empty();
}

inline std::set<TransitionTrace> runs_of(const IOAutomaton& a, const ExecutionTrace& t) {
  for (const auto& name : t) {
    if (!a.has_action(name)) throw Error(ErrorCode::UnknownAction, "'" + name + "' in " + a.id());
  }
  std::set<TransitionTrace> out;
  TransitionTrace path;
  auto walk = [&](auto&& self, const StateId& q, std::size_t depth) -> void {
    if (depth == t.size()) {
      out.insert(path);
      return;
    }
    for (auto i : a.outgoing(q, t[depth])) {
      const auto& tr = a.transitions()[i];
      path.push_back(tr.name);
      self(self, tr.target, depth + 1);
      path.pop_back();
    }
  };
  std::set<StateId> starts(a.starts().begin(), a.starts().end());
  for (const auto& s : starts) {
    if (a.has_state(s)) walk(walk, s, 0);
  }
  return out;
}

// A composite name is consumed by a meta-edge labeled with any of its members.
inline bool accepts_transition_trace(const MetaAutomaton& m, const TransitionTrace& t) {
  for (const auto& name : t) {
    for (const auto& l : name.labels()) {
      if (!m.knows(l)) throw Error(ErrorCode::UnknownTerminal, "'" + l + "' in " + m.id());
    }
  }
  std::set<StateId> current;
  for (const auto& s : m.starts()) {
    if (m.has_state(s)) current.insert(s);
  }
  for (const auto& name : t) {
    std::set<StateId> next;
    for (const auto& q : current) {
      for (const auto& l : name.labels()) {
        for (const auto& d : m.successors(q, l)) next.insert(d);
      }
    }
    current = std::move(next);
    if (current.empty()) return false;
  }
  return !current.empty();
}

// All traces of length <= bound, in shortlex order (length, then
// lexicographic on action names).
inline std::vector<ExecutionTrace> enumerate_traces(const IOAutomaton& a, std::size_t bound,
                                                    const TraceLimits& limits = {}) {
  if (bound > limits.cap) {
    throw Error(ErrorCode::BoundTooLarge,
                std::to_string(bound) + " exceeds the cap of " + std::to_string(limits.cap));
  }
  detail::Simulator sim(a);
  std::vector<ExecutionTrace> out;
  if (sim.start().empty()) return out;

  std::vector<std::pair<ExecutionTrace, detail::Simulator::StateSet>> level{{{}, sim.start()}};
  out.push_back({});
  for (std::size_t len = 1; len <= bound && !level.empty(); ++len) {
    std::vector<std::pair<ExecutionTrace, detail::Simulator::StateSet>> next;
    for (const auto& [trace, states] : level) {
      for (std::size_t k = 0; k < sim.actions().size(); ++k) {
        auto post = sim.post(states, k);
        if (post.empty()) continue;
        ExecutionTrace longer = trace;
        longer.push_back(sim.actions()[k]);
        out.push_back(longer);
        next.emplace_back(std::move(longer), std::move(post));
      }
    }
    level = std::move(next);
  }
  return out;
}

struct InclusionResult {
  bool included = true;
  // Shortest trace of `sub` missing from `sup`; lexicographically least among
  // the shortest.
  std::optional<ExecutionTrace> counterexample;
};

inline InclusionResult check_language_inclusion(const IOAutomaton& sub, const IOAutomaton& sup,
                                                 std::size_t bound) {
  detail::Simulator lhs(sub);
  detail::Simulator rhs(sup);
  using Set = detail::Simulator::StateSet;

  struct Node {
    ExecutionTrace trace;
    Set left;
    Set right;
  };
  if (lhs.start().empty()) return {};
  if (rhs.start().empty()) return {false, ExecutionTrace{}};

  // A (left, right) pair first reached by the shortlex-least trace decides
  // every extension, so later arrivals can be dropped.
  std::set<std::pair<Set, Set>> seen{{lhs.start(), rhs.start()}};
  std::vector<Node> level{{{}, lhs.start(), rhs.start()}};
  for (std::size_t len = 1; len <= bound && !level.empty(); ++len) {
    std::vector<Node> next;
    for (const auto& node : level) {
      for (std::size_t k = 0; k < lhs.actions().size(); ++k) {
        auto left = lhs.post(node.left, k);
        if (left.empty()) continue;
        ExecutionTrace trace = node.trace;
        trace.push_back(lhs.actions()[k]);
        auto rk = rhs.action(lhs.actions()[k]);
        Set right = rk ? rhs.post(node.right, *rk) : Set{};
        if (right.empty()) return {false, std::move(trace)};
        if (seen.emplace(left, right).second) {
          next.push_back({std::move(trace), std::move(left), std::move(right)});
        }
      }
    }
    level = std::move(next);
  }
  return {};
}

struct Theorem1Counterexample {
  ExecutionTrace trace;
  bool in_product = false;
  bool exists_accepted_run = false;
};

struct Theorem1Report {
  std::size_t bound = 0;
  std::size_t traces_checked = 0;
  std::vector<Theorem1Counterexample> counterexamples;

  bool ok() const noexcept { return counterexamples.empty(); }
};

// For every trace t of `a` up to `bound`: t is a trace of a ⃗· m exactly when
// some run of `a` on t has a transition trace accepted by m.
inline Theorem1Report check_theorem1(const IOAutomaton& a, const MetaAutomaton& m,
                                     std::size_t bound, const TraceLimits& limits = {}) {
  const auto product = meta_compose(a, m).automaton;
  Theorem1Report report;
  report.bound = bound;
  for (const auto& t : enumerate_traces(a, bound, limits)) {
    ++report.traces_checked;
    const bool in_product = accepts_execution(product, t);
    bool exists = false;
    for (const auto& run : runs_of(a, t)) {
      if (accepts_transition_trace(m, run)) {
        exists = true;
        break;
      }
    }
    if (in_product != exists) report.counterexamples.push_back({t, in_product, exists});
  }
  return report;
}

// Labels that fire somewhere in the reachable subject but nowhere in the
// reachable constrained system.
inline LabelSet diagnose_hazards(const IOAutomaton& a, const MetaAutomaton& m) {
  const auto constrained = meta_compose(a, m).automaton.labels();
  LabelSet out;
  for (const auto& l : reachable(a).pruned.labels()) {
    if (!constrained.count(l)) out.insert(l);
  }
  return out;
}

}  // namespace metaguard

#endif  // METAGUARD_TRACES_HPP
