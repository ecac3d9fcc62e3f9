#ifndef METAGUARD_META_HPP
#define METAGUARD_META_HPP

#include <deque>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metaguard/automaton.hpp"

namespace metaguard {

enum class CompletionPolicy { Strict, ImplicitAllow };

constexpr std::string_view to_string(CompletionPolicy p) noexcept {
  return p == CompletionPolicy::Strict ? "strict" : "implicit-allow";
}

struct MetaTransition {
  StateId source;
  std::string label;
  StateId target;

  friend bool operator==(const MetaTransition&, const MetaTransition&) = default;
  friend auto operator<=>(const MetaTransition&, const MetaTransition&) = default;
};

using LabelSet = std::set<std::string, NaturalLess>;

// Constraint meta-automaton over the transitions of a subject automaton. Its
// terminals are the subject's atomic transition labels; a run of the
// meta-automaton reads the labels of a run of the subject.
class MetaAutomaton {
 public:
  MetaAutomaton() = default;

  MetaAutomaton(std::string id, std::string subject, std::vector<StateId> states,
                std::vector<MetaTransition> transitions, std::vector<StateId> starts,
                LabelSet terminals, CompletionPolicy policy = CompletionPolicy::Strict)
      : id_(std::move(id)),
        subject_(std::move(subject)),
        states_(std::move(states)),
        transitions_(std::move(transitions)),
        starts_(std::move(starts)),
        terminals_(std::move(terminals)),
        policy_(policy) {
    for (const auto& q : states_) state_set_.insert(q);
    for (const auto& t : transitions_) {
      outgoing_[{t.source, t.label}].push_back(t.target);
      mentioned_.insert(t.label);
    }
  }

  // Terminals taken from the subject's transition labels.
  static MetaAutomaton over(const IOAutomaton& subject, std::string id,
                            std::vector<StateId> states,
                            std::vector<MetaTransition> transitions,
                            std::vector<StateId> starts,
                            CompletionPolicy policy = CompletionPolicy::Strict) {
    return MetaAutomaton(std::move(id), subject.id(), std::move(states), std::move(transitions),
                         std::move(starts), subject.labels(), policy);
  }

  const std::string& id() const noexcept { return id_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::vector<StateId>& states() const noexcept { return states_; }
  const std::vector<MetaTransition>& transitions() const noexcept { return transitions_; }
  const std::vector<StateId>& starts() const noexcept { return starts_; }
  const LabelSet& terminals() const noexcept { return terminals_; }
  CompletionPolicy policy() const noexcept { return policy_; }

  bool has_state(std::string_view q) const { return state_set_.find(q) != state_set_.end(); }

  // Labels that appear on at least one meta-transition.
  const LabelSet& mentioned() const noexcept { return mentioned_; }

  bool knows(std::string_view label) const {
    return terminals_.find(label) != terminals_.end() ||
           mentioned_.find(label) != mentioned_.end();
  }

  std::span<const StateId> successors(const StateId& q, const std::string& label) const {
    auto it = outgoing_.find(std::make_pair(q, label));
    if (it == outgoing_.end()) return {};
    return it->second;
  }

  MetaAutomaton with_policy(CompletionPolicy p) const {
    return MetaAutomaton(id_, subject_, states_, transitions_, starts_, terminals_, p);
  }

  friend bool operator==(const MetaAutomaton& a, const MetaAutomaton& b) {
    auto sorted = [](auto v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    return a.id_ == b.id_ && a.subject_ == b.subject_ && a.states_ == b.states_ &&
           sorted(a.transitions_) == sorted(b.transitions_) &&
           sorted(a.starts_) == sorted(b.starts_) && a.terminals_ == b.terminals_ &&
           a.policy_ == b.policy_;
  }

 private:
  std::string id_;
  std::string subject_;
  std::vector<StateId> states_;
  std::vector<MetaTransition> transitions_;
  std::vector<StateId> starts_;
  LabelSet terminals_;
  CompletionPolicy policy_ = CompletionPolicy::Strict;

  std::set<StateId, std::less<>> state_set_;
  std::map<std::pair<StateId, std::string>, std::vector<StateId>> outgoing_;
  LabelSet mentioned_;
};

inline ValidationReport validate_meta(const MetaAutomaton& m, const IOAutomaton& a) {
  if (m.subject() != a.id()) {
    throw Error(ErrorCode::SubjectMismatch,
                "constraint " + m.id() + " is over '" + m.subject() + "', not '" + a.id() + "'");
  }
  ValidationReport r;

  std::set<StateId, std::less<>> seen;
  for (const auto& q : m.states()) {
    if (!seen.insert(q).second) {
      r.error("DUPLICATE_STATE", "meta-state '" + q + "' declared twice", Witness{q, {}, {}});
    }
    if (a.has_state(q)) {
      r.error("STATE_COLLISION", "meta-state '" + q + "' is also a state of " + a.id(),
              Witness{q, {}, {}});
    }
  }

  if (m.starts().empty()) r.error("EMPTY_START_SET", "constraint has no start state");
  for (const auto& s : m.starts()) {
    if (!m.has_state(s)) {
      r.error("DANGLING_STATE", "start state '" + s + "' is not a declared meta-state",
              Witness{s, {}, {}});
    }
  }

  const auto labels = a.labels();
  std::set<std::string, std::less<>> unknown;
  for (const auto& t : m.transitions()) {
    if (!m.has_state(t.source)) {
      r.error("DANGLING_STATE", "meta-transition leaves undeclared state '" + t.source + "'",
              Witness{t.source, {}, t.label});
    }
    if (!m.has_state(t.target)) {
      r.error("DANGLING_STATE", "meta-transition enters undeclared state '" + t.target + "'",
              Witness{t.target, {}, t.label});
    }
    if (!labels.count(t.label) && unknown.insert(t.label).second) {
      r.error("UNKNOWN_TERMINAL",
              "'" + t.label + "' is not a transition label of " + a.id(),
              Witness{{}, {}, t.label});
    }
  }

  for (const auto& l : labels) {
    if (!m.mentioned().count(l)) {
      r.warning("UNCONSTRAINED_LABEL",
                "label '" + l + "' has no meta-transition and is blocked under strict semantics",
                Witness{{}, {}, l});
    }
  }
  return r;
}

// strict: m unchanged. implicit-allow: every subject label that m never
// mentions gets a self-loop at every meta-state.
inline MetaAutomaton complete_meta(const MetaAutomaton& m, const IOAutomaton& a,
                                   CompletionPolicy policy) {
  if (policy == CompletionPolicy::Strict) return m.with_policy(policy);
  std::vector<MetaTransition> transitions = m.transitions();
  for (const auto& l : a.labels()) {
    if (m.mentioned().count(l)) continue;
    for (const auto& q : m.states()) transitions.push_back({q, l, q});
  }
  return MetaAutomaton(m.id(), m.subject(), m.states(), std::move(transitions), m.starts(),
                       m.terminals(), policy);
}

// Applies the policy the constraint declares.
inline MetaAutomaton effective_meta(const MetaAutomaton& m, const IOAutomaton& a) {
  return complete_meta(m, a, m.policy());
}

struct MetaComposeOptions {
  // Empty: subject id + "Safe".
  std::string id;
  bool full_product = false;
};

struct MetaComposition {
  IOAutomaton automaton;
  // (subject state, meta-state), parallel to automaton.states().
  std::vector<std::pair<StateId, StateId>> pairs;
  // Atomic label whose meta-edge admitted each transition, parallel to
  // automaton.transitions().
  std::vector<std::string> authorized_by;
  std::vector<Finding> warnings;
};

// Product of a subject automaton with a constraint meta-automaton. A subject
// transition named I fires from (q, s) to (q', s') when some label k in I has
// a meta-edge (s, k, s'). For atomic names this is the plain synchronized
// product on transition names.
inline MetaComposition meta_compose(const IOAutomaton& a, const MetaAutomaton& m,
                                    const MetaComposeOptions& options = {}) {
  if (auto report = validate(a); !report.ok()) {
    throw ValidationFailed(a.id() + " is not a valid I/O automaton", std::move(report));
  }
  if (auto report = validate_meta(m, a); !report.ok()) {
    throw ValidationFailed(m.id() + " is not a valid constraint over " + a.id(),
                           std::move(report));
  }

  MetaComposition out;
  std::vector<StateId> names;
  std::map<std::pair<StateId, StateId>, std::size_t> pos;
  std::set<std::string, std::less<>> used_names;
  std::deque<std::size_t> queue;

  auto intern = [&](const StateId& q, const StateId& s) -> std::pair<std::size_t, bool> {
    auto key = std::make_pair(q, s);
    if (auto it = pos.find(key); it != pos.end()) return {it->second, false};
    std::string name = join_state_names({q, s});
    if (!used_names.insert(name).second) {
      throw Error(ErrorCode::NameCollision, "product state name '" + name + "' is ambiguous");
    }
    pos.emplace(key, names.size());
    out.pairs.push_back(key);
    names.push_back(std::move(name));
    return {names.size() - 1, true};
  };

  std::vector<StateId> starts;
  for (const auto& q : a.starts()) {
    for (const auto& s : m.starts()) {
      auto [i, fresh] = intern(q, s);
      if (fresh) {
        starts.push_back(names[i]);
        queue.push_back(i);
      }
    }
  }
  if (options.full_product) {
    for (const auto& q : a.states()) {
      for (const auto& s : m.states()) {
        if (auto [i, fresh] = intern(q, s); fresh) queue.push_back(i);
      }
    }
  }

  std::vector<Transition> transitions;
  std::set<Transition> emitted;
  while (!queue.empty()) {
    const std::size_t from = queue.front();
    queue.pop_front();
    const auto [q, s] = out.pairs[from];
    for (const auto& act : a.actions()) {
      for (auto ti : a.outgoing(q, act.name)) {
        const auto& t = a.transitions()[ti];
        for (const auto& k : t.name.labels()) {
          for (const auto& s_next : m.successors(s, k)) {
            auto [to, fresh] = intern(t.target, s_next);
            if (fresh) queue.push_back(to);
            Transition product{t.name, names[from], t.action, names[to]};
            if (emitted.insert(product).second) {
              transitions.push_back(std::move(product));
              out.authorized_by.push_back(k);
            }
          }
        }
      }
    }
  }

  std::map<StateId, std::set<std::string>, std::less<>> enabled;
  for (const auto& t : transitions) enabled[t.source].insert(t.action);
  for (const auto& input : a.actions_of(ActionKind::Input)) {
    for (const auto& q : names) {
      auto it = enabled.find(q);
      if (it == enabled.end() || !it->second.count(input)) {
        out.warnings.push_back({Severity::Warning, "INPUT_ENABLEDNESS_LOST",
                                "constraint blocks input '" + input + "' in state '" + q + "'",
                                Witness{q, input, {}}});
      }
    }
  }

  std::string id = options.id.empty() ? a.id() + "Safe" : options.id;
  out.automaton = IOAutomaton(std::move(id), std::move(names), a.actions(),
                              std::move(transitions), std::move(starts));
  return out;
}

}  // namespace metaguard

#endif  // METAGUARD_META_HPP
