#ifndef METAGUARD_COMPOSITION_HPP
#define METAGUARD_COMPOSITION_HPP

#include <cstddef>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "metaguard/automaton.hpp"

namespace metaguard {

// Components indexed by a strictly ascending set of natural numbers.
class ComponentCollection {
 public:
  explicit ComponentCollection(std::vector<IOAutomaton> components)
      : components_(std::move(components)) {
    for (std::size_t i = 0; i < components_.size(); ++i) indices_.push_back(i + 1);
    check();
  }

  ComponentCollection(std::vector<std::size_t> indices, std::vector<IOAutomaton> components)
      : indices_(std::move(indices)), components_(std::move(components)) {
    check();
  }

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  const std::vector<IOAutomaton>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  const IOAutomaton& operator[](std::size_t pos) const { return components_[pos]; }

 private:
  void check() const {
    if (components_.empty()) throw Error(ErrorCode::InvalidCollection, "no components");
    if (indices_.size() != components_.size()) {
      throw Error(ErrorCode::InvalidCollection, "one index per component required");
    }
    for (std::size_t i = 1; i < indices_.size(); ++i) {
      if (indices_[i - 1] >= indices_[i]) {
        throw Error(ErrorCode::InvalidCollection, "indices must be strictly ascending");
      }
    }
    std::set<std::string, std::less<>> ids;
    for (const auto& c : components_) {
      if (!ids.insert(c.id()).second) {
        throw Error(ErrorCode::InvalidCollection, "component '" + c.id() + "' listed twice");
      }
    }
  }

  std::vector<std::size_t> indices_;
  std::vector<IOAutomaton> components_;
};

struct CompositeState {
  std::vector<StateId> parts;

  friend bool operator==(const CompositeState&, const CompositeState&) = default;
  friend auto operator<=>(const CompositeState&, const CompositeState&) = default;
};

// 1-based projection onto the j-th component in index order.
inline const StateId& project(const CompositeState& q, std::size_t j) {
  if (j < 1 || j > q.parts.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "position " + std::to_string(j) + " of a " + std::to_string(q.parts.size()) +
                    "-component state");
  }
  return q.parts[j - 1];
}

enum class CompatibilityClause { OutputOverlap, InternalLeak };

constexpr std::string_view to_string(CompatibilityClause c) noexcept {
  return c == CompatibilityClause::OutputOverlap ? "OUTPUT_OVERLAP" : "INTERNAL_LEAK";
}

struct CompatibilityViolation {
  CompatibilityClause clause;
  std::string action;
  // Collection indices (not positions). For INTERNAL_LEAK, `first` owns the
  // internal action.
  std::size_t first;
  std::size_t second;
};

struct CompatibilityReport {
  std::vector<CompatibilityViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

inline CompatibilityReport check_strong_compatibility(const ComponentCollection& cs) {
  CompatibilityReport r;
  const auto& comps = cs.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (i == j) continue;
      if (i < j) {
        for (const auto& o : comps[i].actions_of(ActionKind::Output)) {
          const Action* other = comps[j].find_action(o);
          if (other && other->kind == ActionKind::Output) {
            r.violations.push_back(
                {CompatibilityClause::OutputOverlap, o, cs.indices()[i], cs.indices()[j]});
          }
        }
      }
      for (const auto& h : comps[i].actions_of(ActionKind::Internal)) {
        if (comps[j].has_action(h)) {
          r.violations.push_back(
              {CompatibilityClause::InternalLeak, h, cs.indices()[i], cs.indices()[j]});
        }
      }
    }
  }
  return r;
}

struct ComposeOptions {
  // Empty: component ids joined by '_'.
  std::string id;
  // Build every vector of the Cartesian state space instead of the part
  // reachable from the start vectors.
  bool full_product = false;
};

struct Composition {
  IOAutomaton automaton;
  // Parallel to automaton.states().
  std::vector<CompositeState> vectors;

  const CompositeState& vector_of(std::string_view state) const {
    const auto& states = automaton.states();
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] == state) return vectors[i];
    }
    throw Error(ErrorCode::UnknownState, std::string(state));
  }
};

namespace detail {

template <typename F>
void for_each_choice(const std::vector<std::vector<std::size_t>>& options, F&& f) {
  for (const auto& o : options) {
    if (o.empty()) return;
  }
  std::vector<std::size_t> pick(options.size(), 0);
  while (true) {
    f(pick);
    std::size_t k = options.size();
    while (k > 0 && ++pick[k - 1] == options[k - 1].size()) {
      pick[k - 1] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

}  // namespace detail

// Parallel composition. A composite step on action a moves every component
// whose alphabet contains a (each through one of its own a-transitions) and
// leaves the others in place; the step's name is the union of the moving
// transitions' labels.
inline Composition compose(const ComponentCollection& cs, const ComposeOptions& options = {}) {
  if (auto report = check_strong_compatibility(cs); !report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::Incompatible, std::string(to_string(v.clause)) + " on '" + v.action +
                                             "' between components " + std::to_string(v.first) +
                                             " and " + std::to_string(v.second));
  }
  const auto& comps = cs.components();

  std::map<std::string, std::string, NaturalLess> label_owner;
  for (const auto& c : comps) {
    for (const auto& l : c.labels()) {
      auto [it, fresh] = label_owner.emplace(l, c.id());
      if (!fresh) {
        throw Error(ErrorCode::LabelClash,
                    "label '" + l + "' used by both " + it->second + " and " + c.id());
      }
    }
  }

  // Σ^O = ∪Σ^O, Σ^H = ∪Σ^H, Σ^I = ∪Σ^I − ∪Σ^O.
  std::vector<Action> actions;
  std::map<std::string, std::size_t, std::less<>> action_pos;
  for (const auto& c : comps) {
    for (const auto& act : c.actions()) {
      auto [it, fresh] = action_pos.emplace(act.name, actions.size());
      if (fresh) {
        actions.push_back(act);
      } else if (act.kind == ActionKind::Output) {
        actions[it->second].kind = ActionKind::Output;
      } else if (act.kind == ActionKind::Internal) {
        actions[it->second].kind = ActionKind::Internal;
      }
    }
  }

  std::vector<std::vector<std::size_t>> participants(actions.size());
  for (std::size_t k = 0; k < actions.size(); ++k) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (comps[j].has_action(actions[k].name)) participants[k].push_back(j);
    }
  }

  std::string id = options.id;
  if (id.empty()) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (j) id += '_';
      id += comps[j].id();
    }
  }

  std::vector<CompositeState> vectors;
  std::vector<StateId> names;
  std::map<CompositeState, std::size_t> pos;
  std::map<std::string, std::size_t, std::less<>> by_name;
  auto intern = [&](CompositeState v) -> std::pair<std::size_t, bool> {
    if (auto it = pos.find(v); it != pos.end()) return {it->second, false};
    std::string name = join_state_names(v.parts);
    if (!by_name.emplace(name, vectors.size()).second) {
      throw Error(ErrorCode::NameCollision, "composite state name '" + name + "' is ambiguous");
    }
    pos.emplace(v, vectors.size());
    vectors.push_back(std::move(v));
    names.push_back(std::move(name));
    return {vectors.size() - 1, true};
  };

  auto cartesian = [&](auto select) {
    std::vector<std::vector<StateId>> sets;
    for (const auto& c : comps) sets.push_back(select(c));
    std::vector<std::vector<std::size_t>> opts;
    for (const auto& s : sets) {
      std::vector<std::size_t> idx(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) idx[i] = i;
      opts.push_back(std::move(idx));
    }
    std::vector<CompositeState> out;
    detail::for_each_choice(opts, [&](const std::vector<std::size_t>& pick) {
      CompositeState v;
      for (std::size_t j = 0; j < sets.size(); ++j) v.parts.push_back(sets[j][pick[j]]);
      out.push_back(std::move(v));
    });
    return out;
  };

  std::vector<StateId> starts;
  std::deque<std::size_t> queue;
  for (auto& v : cartesian([](const IOAutomaton& c) { return c.starts(); })) {
    auto [i, fresh] = intern(std::move(v));
    if (fresh) {
      starts.push_back(names[i]);
      queue.push_back(i);
    }
  }
  if (options.full_product) {
    for (auto& v : cartesian([](const IOAutomaton& c) { return c.states(); })) {
      auto [i, fresh] = intern(std::move(v));
      if (fresh) queue.push_back(i);
    }
  }

  std::vector<Transition> transitions;
  while (!queue.empty()) {
    const std::size_t from = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < actions.size(); ++k) {
      const auto& movers = participants[k];
      std::vector<std::vector<std::size_t>> opts;
      for (auto j : movers) {
        auto out = comps[j].outgoing(vectors[from].parts[j], actions[k].name);
        opts.emplace_back(out.begin(), out.end());
      }
      detail::for_each_choice(opts, [&](const std::vector<std::size_t>& pick) {
        CompositeState next = vectors[from];
        std::vector<std::string> labels;
        for (std::size_t m = 0; m < movers.size(); ++m) {
          const auto& t = comps[movers[m]].transitions()[opts[m][pick[m]]];
          next.parts[movers[m]] = t.target;
          labels.insert(labels.end(), t.name.labels().begin(), t.name.labels().end());
        }
        auto [to, fresh] = intern(std::move(next));
        if (fresh) queue.push_back(to);
        transitions.push_back(
            {TransitionName(std::move(labels)), names[from], actions[k].name, names[to]});
      });
    }
  }

  return {IOAutomaton(std::move(id), names, std::move(actions), std::move(transitions),
                      std::move(starts)),
          std::move(vectors)};
}

inline Composition compose(const IOAutomaton& left, const IOAutomaton& right,
                           const ComposeOptions& options = {}) {
  return compose(ComponentCollection({left, right}), options);
}

}  // namespace metaguard

#endif  // METAGUARD_COMPOSITION_HPP
