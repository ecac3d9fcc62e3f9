#ifndef METAGUARD_AUTOMATON_HPP
#define METAGUARD_AUTOMATON_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metaguard/error.hpp"
#include "metaguard/names.hpp"

namespace metaguard {

enum class ActionKind { Input, Output, Internal };

constexpr std::string_view to_string(ActionKind k) noexcept {
  switch (k) {
    case ActionKind::Input: return "input";
    case ActionKind::Output: return "output";
    case ActionKind::Internal: return "internal";
  }
  return "?";
}

// Diagram suffix: input "?", output "!", internal ";".
constexpr char kind_suffix(ActionKind k) noexcept {
  switch (k) {
    case ActionKind::Input: return '?';
    case ActionKind::Output: return '!';
    case ActionKind::Internal: return ';';
  }
  return ' ';
}

struct Action {
  std::string name;
  ActionKind kind = ActionKind::Input;

  friend bool operator==(const Action&, const Action&) = default;
  friend auto operator<=>(const Action&, const Action&) = default;
};

struct Transition {
  TransitionName name;
  StateId source;
  std::string action;
  StateId target;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend auto operator<=>(const Transition&, const Transition&) = default;
};

// Input/output automaton (Q, Σ^I, Σ^O, Σ^H, δ, S). Construction never rejects
// a malformed model; validate() reports what is wrong with it. Values are
// immutable once built.
class IOAutomaton {
 public:
  IOAutomaton() = default;

  IOAutomaton(std::string id, std::vector<StateId> states, std::vector<Action> actions,
              std::vector<Transition> transitions, std::vector<StateId> starts)
      : id_(std::move(id)),
        states_(std::move(states)),
        actions_(std::move(actions)),
        transitions_(std::move(transitions)),
        starts_(std::move(starts)) {
    for (const auto& q : states_) state_set_.insert(q);
    for (std::size_t i = 0; i < actions_.size(); ++i) action_index_.emplace(actions_[i].name, i);
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      const auto& t = transitions_[i];
      outgoing_[{t.source, t.action}].push_back(i);
    }
  }

  const std::string& id() const noexcept { return id_; }
  const std::vector<StateId>& states() const noexcept { return states_; }
  const std::vector<Action>& actions() const noexcept { return actions_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const std::vector<StateId>& starts() const noexcept { return starts_; }

  bool has_state(std::string_view q) const { return state_set_.find(q) != state_set_.end(); }

  const Action* find_action(std::string_view name) const {
    auto it = action_index_.find(name);
    return it == action_index_.end() ? nullptr : &actions_[it->second];
  }

  bool has_action(std::string_view name) const { return find_action(name) != nullptr; }

  std::vector<std::string> actions_of(ActionKind kind) const {
    std::vector<std::string> out;
    for (const auto& a : actions_) {
      if (a.kind == kind) out.push_back(a.name);
    }
    return out;
  }

  // Indices into transitions() leaving q on action.
  std::span<const std::size_t> outgoing(const StateId& q, const std::string& action) const {
    auto it = outgoing_.find(std::make_pair(q, action));
    if (it == outgoing_.end()) return {};
    return it->second;
  }

  // Every atomic label occurring in some transition name.
  std::set<std::string, NaturalLess> labels() const {
    std::set<std::string, NaturalLess> out;
    for (const auto& t : transitions_) out.insert(t.name.labels().begin(), t.name.labels().end());
    return out;
  }

  IOAutomaton with_id(std::string id) const {
    return IOAutomaton(std::move(id), states_, actions_, transitions_, starts_);
  }

  // Structural equality: state order matters, the rest is compared as sets.
  friend bool operator==(const IOAutomaton& a, const IOAutomaton& b) {
    auto sorted = [](auto v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    return a.id_ == b.id_ && a.states_ == b.states_ &&
           sorted(a.actions_) == sorted(b.actions_) &&
           sorted(a.transitions_) == sorted(b.transitions_) &&
           sorted(a.starts_) == sorted(b.starts_);
  }

 private:
  std::string id_;
  std::vector<StateId> states_;
  std::vector<Action> actions_;
  std::vector<Transition> transitions_;
  std::vector<StateId> starts_;

  std::set<StateId, std::less<>> state_set_;
  std::map<std::string, std::size_t, std::less<>> action_index_;
  std::map<std::pair<StateId, std::string>, std::vector<std::size_t>> outgoing_;
};

enum class Severity { Error, Warning };

constexpr std::string_view to_string(Severity s) noexcept {
  return s == Severity::Error ? "error" : "warning";
}

struct Witness {
  std::optional<StateId> state;
  std::optional<std::string> action;
  std::optional<std::string> transition;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct Finding {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::optional<Witness> witness;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.severity == Severity::Error; });
  }

  std::size_t count(std::string_view code) const {
    return static_cast<std::size_t>(std::count_if(
        findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; }));
  }

  std::size_t errors() const {
    return static_cast<std::size_t>(std::count_if(
        findings.begin(), findings.end(),
        [](const Finding& f) { return f.severity == Severity::Error; }));
  }

  std::size_t warnings() const { return findings.size() - errors(); }

  void error(std::string code, std::string message, std::optional<Witness> w = std::nullopt) {
    findings.push_back({Severity::Error, std::move(code), std::move(message), std::move(w)});
  }

  void warning(std::string code, std::string message, std::optional<Witness> w = std::nullopt) {
    findings.push_back({Severity::Warning, std::move(code), std::move(message), std::move(w)});
  }
};

class ValidationFailed : public Error {
 public:
  ValidationFailed(const std::string& what, ValidationReport report)
      : Error(ErrorCode::ValidationFailed, what), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

// Checks the I/O automaton clauses: unique names, resolvable references,
// nonempty start set, input-enabledness and transition-label uniqueness.
//
// A label reused by several transitions with the same action is only a
// warning: products (composition, meta-composition) copy one component
// transition into every product state it fires from. Reuse across different
// actions is an error.
inline ValidationReport validate(const IOAutomaton& a) {
  ValidationReport r;

  std::set<std::string, std::less<>> seen_states;
  for (const auto& q : a.states()) {
    if (q.empty()) r.error("EMPTY_NAME", "state with empty name");
    if (!seen_states.insert(q).second) {
      r.error("DUPLICATE_STATE", "state '" + q + "' declared twice", Witness{q, {}, {}});
    }
  }

  std::set<std::string, std::less<>> seen_actions;
  for (const auto& act : a.actions()) {
    if (act.name.empty()) r.error("EMPTY_NAME", "action with empty name");
    if (!seen_actions.insert(act.name).second) {
      r.error("DUPLICATE_ACTION", "action '" + act.name + "' declared more than once",
              Witness{{}, act.name, {}});
    }
  }

  if (a.starts().empty()) r.error("EMPTY_START_SET", "automaton has no start state");
  for (const auto& s : a.starts()) {
    if (!a.has_state(s)) {
      r.error("DANGLING_STATE", "start state '" + s + "' is not a declared state",
              Witness{s, {}, {}});
    }
  }

  std::map<std::string, std::string, std::less<>> label_action;
  std::set<std::string, std::less<>> reused;
  for (const auto& t : a.transitions()) {
    const std::string name = t.name.str();
    if (t.name.size() == 0) r.error("EMPTY_NAME", "transition without a name");
    if (!a.has_state(t.source)) {
      r.error("DANGLING_STATE", "transition " + name + " leaves undeclared state '" + t.source + "'",
              Witness{t.source, {}, name});
    }
    if (!a.has_state(t.target)) {
      r.error("DANGLING_STATE", "transition " + name + " enters undeclared state '" + t.target + "'",
              Witness{t.target, {}, name});
    }
    if (!a.has_action(t.action)) {
      r.error("DANGLING_ACTION", "transition " + name + " uses undeclared action '" + t.action + "'",
              Witness{{}, t.action, name});
    }
    for (const auto& l : t.name.labels()) {
      auto [it, fresh] = label_action.emplace(l, t.action);
      if (fresh) continue;
      if (it->second != t.action) {
        r.error("DUPLICATE_LABEL",
                "label '" + l + "' names transitions on both '" + it->second + "' and '" +
                    t.action + "'",
                Witness{{}, {}, l});
      } else if (reused.insert(l).second) {
        r.warning("LABEL_REUSED", "label '" + l + "' names more than one transition",
                  Witness{{}, {}, l});
      }
    }
  }

  for (const auto& act : a.actions()) {
    if (act.kind != ActionKind::Input) continue;
    for (const auto& q : a.states()) {
      if (a.outgoing(q, act.name).empty()) {
        r.error("INPUT_NOT_ENABLED",
                "input '" + act.name + "' is not enabled in state '" + q + "'",
                Witness{q, act.name, {}});
      }
    }
  }
  return r;
}

inline std::set<std::pair<TransitionName, StateId>> step(const IOAutomaton& a, const StateId& q,
                                                         const std::string& action) {
  if (!a.has_state(q)) throw Error(ErrorCode::UnknownState, "'" + q + "' in " + a.id());
  if (!a.has_action(action)) throw Error(ErrorCode::UnknownAction, "'" + action + "' in " + a.id());
  std::set<std::pair<TransitionName, StateId>> out;
  for (auto i : a.outgoing(q, action)) {
    const auto& t = a.transitions()[i];
    out.emplace(t.name, t.target);
  }
  return out;
}

struct Reachability {
  // Breadth-first discovery order.
  std::vector<StateId> states;
  IOAutomaton pruned;
};

inline Reachability reachable(const IOAutomaton& a) {
  std::set<StateId, std::less<>> seen;
  std::vector<StateId> order;
  std::deque<StateId> queue;
  for (const auto& s : a.starts()) {
    if (a.has_state(s) && seen.insert(s).second) {
      order.push_back(s);
      queue.push_back(s);
    }
  }
  std::map<StateId, std::vector<std::size_t>, std::less<>> by_source;
  for (std::size_t i = 0; i < a.transitions().size(); ++i) {
    by_source[a.transitions()[i].source].push_back(i);
  }
  while (!queue.empty()) {
    StateId q = std::move(queue.front());
    queue.pop_front();
    auto it = by_source.find(q);
    if (it == by_source.end()) continue;
    for (auto i : it->second) {
      const auto& t = a.transitions()[i];
      if (a.has_state(t.target) && seen.insert(t.target).second) {
        order.push_back(t.target);
        queue.push_back(t.target);
      }
    }
  }

  std::vector<StateId> states;
  for (const auto& q : a.states()) {
    if (seen.count(q)) states.push_back(q);
  }
  std::vector<Transition> transitions;
  for (const auto& t : a.transitions()) {
    if (seen.count(t.source) && seen.count(t.target)) transitions.push_back(t);
  }
  std::vector<StateId> starts;
  for (const auto& s : a.starts()) {
    if (seen.count(s)) starts.push_back(s);
  }
  return {std::move(order),
          IOAutomaton(a.id(), std::move(states), a.actions(), std::move(transitions),
                      std::move(starts))};
}

}  // namespace metaguard

#endif  // METAGUARD_AUTOMATON_HPP
