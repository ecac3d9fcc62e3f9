#ifndef METAGUARD_MODEL_IO_HPP
#define METAGUARD_MODEL_IO_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "metaguard/automaton.hpp"
#include "metaguard/composition.hpp"
#include "metaguard/meta.hpp"

// Model text format (UTF-8, '#' starts a line comment):
//
//   automaton Reactor {
//     inputs: l; outputs: c, w, a; internals: e;
//     states: q0, q1; start: q0;
//     trans: p1: q0 -c-> q1; {p1,p15}: q1 -w-> q0;
//   }
//   composition Candy { components: Machine, User; }
//   constraint C over Reactor {
//     states: s0, s1; start: s0;
//     trans: s0 -p1-> s1; s1 -p2-> s0;
//     policy: strict;
//   }

namespace metaguard {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct Diagnostic {
  std::string code;  // PARSE_ERROR, DUPLICATE_ID, UNRESOLVED_REF
  std::string message;
  SourcePos pos;
};

inline std::string to_string(const Diagnostic& d) {
  return std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.code + ": " +
         d.message;
}

// A named composition of declared automata, built on demand.
struct CompositionDecl {
  std::string id;
  std::vector<std::string> components;

  friend bool operator==(const CompositionDecl&, const CompositionDecl&) = default;
};

struct ModelFile {
  std::vector<IOAutomaton> automata;
  std::vector<CompositionDecl> compositions;
  std::vector<MetaAutomaton> constraints;
  std::map<std::string, SourcePos, std::less<>> positions;

  const IOAutomaton* find_automaton(std::string_view id) const {
    for (const auto& a : automata) {
      if (a.id() == id) return &a;
    }
    return nullptr;
  }

  const CompositionDecl* find_composition(std::string_view id) const {
    for (const auto& c : compositions) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  const MetaAutomaton* find_constraint(std::string_view id) const {
    for (const auto& c : constraints) {
      if (c.id() == id) return &c;
    }
    return nullptr;
  }

  // Declarations compared without source positions.
  friend bool operator==(const ModelFile& a, const ModelFile& b) {
    auto by_id = [](auto v, auto key) {
      std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });
      return v;
    };
    auto aid = [](const IOAutomaton& x) { return x.id(); };
    auto cid = [](const CompositionDecl& x) { return x.id; };
    auto mid = [](const MetaAutomaton& x) { return x.id(); };
    return by_id(a.automata, aid) == by_id(b.automata, aid) &&
           by_id(a.compositions, cid) == by_id(b.compositions, cid) &&
           by_id(a.constraints, mid) == by_id(b.constraints, mid);
  }
};

struct ParseResult {
  std::optional<ModelFile> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const noexcept { return model.has_value(); }
};

namespace detail {

enum class Tok { Ident, LBrace, RBrace, Colon, Semi, Comma, Dash, Arrow, End, Bad };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

inline std::string_view describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Dash: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
    case Tok::Bad: return "invalid character";
  }
  return "?";
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };
  auto ident_head = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto ident_tail = [&](char c) { return ident_head(c) || (c >= '0' && c <= '9') || c == '.'; };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = pos;
    if (ident_head(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_tail(text[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    switch (c) {
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case ':': t.kind = Tok::Colon; break;
      case ';': t.kind = Tok::Semi; break;
      case ',': t.kind = Tok::Comma; break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          t.kind = Tok::Arrow;
          t.text = "->";
          out.push_back(std::move(t));
          advance(2);
          continue;
        }
        t.kind = Tok::Dash;
        break;
      default: t.kind = Tok::Bad; break;
    }
    t.text = std::string(1, c);
    out.push_back(std::move(t));
    advance(1);
  }
  Token end;
  end.kind = Tok::End;
  end.pos = pos;
  out.push_back(end);
  return out;
}

struct SyntaxError {
  Diagnostic diagnostic;
};

template <typename T>
struct Located {
  T value;
  SourcePos pos;
};

struct RawTransition {
  Located<std::vector<std::string>> name;
  Located<std::string> source;
  Located<std::string> action;
  Located<std::string> target;
};

struct RawAutomaton {
  Located<std::string> id;
  std::vector<std::pair<Located<std::string>, ActionKind>> actions;
  std::vector<Located<std::string>> states;
  std::vector<Located<std::string>> starts;
  std::vector<RawTransition> transitions;
};

struct RawMetaTransition {
  Located<std::string> source;
  Located<std::string> label;
  Located<std::string> target;
};

struct RawConstraint {
  Located<std::string> id;
  Located<std::string> subject;
  std::vector<Located<std::string>> states;
  std::vector<Located<std::string>> starts;
  std::vector<RawMetaTransition> transitions;
  CompletionPolicy policy = CompletionPolicy::Strict;
};

struct RawComposition {
  Located<std::string> id;
  std::vector<Located<std::string>> components;
};

inline const std::set<std::string, std::less<>>& section_keywords() {
  static const std::set<std::string, std::less<>> k{
      "inputs", "outputs", "internals", "states", "start", "trans", "policy", "components"};
  return k;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  void parse(std::vector<RawAutomaton>& automata, std::vector<RawConstraint>& constraints,
             std::vector<RawComposition>& compositions) {
    while (peek().kind != Tok::End) {
      const Token& kw = expect_ident("'automaton', 'constraint' or 'composition'");
      if (kw.text == "automaton") {
        automata.push_back(parse_automaton());
      } else if (kw.text == "constraint") {
        constraints.push_back(parse_constraint());
      } else if (kw.text == "composition") {
        compositions.push_back(parse_composition());
      } else {
        fail(kw, "'automaton', 'constraint' or 'composition'");
      }
    }
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& found, std::string_view expected) const {
    std::string what = found.kind == Tok::Ident ? "'" + found.text + "'"
                       : found.kind == Tok::End ? std::string(describe(found.kind))
                                                : "'" + found.text + "'";
    throw SyntaxError{
        {"PARSE_ERROR", "expected " + std::string(expected) + ", found " + what, found.pos}};
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail(peek(), describe(kind));
    return next();
  }

  const Token& expect_ident(std::string_view what = "identifier") {
    if (peek().kind != Tok::Ident) fail(peek(), what);
    return next();
  }

  Located<std::string> ident(std::string_view what = "identifier") {
    const Token& t = expect_ident(what);
    return {t.text, t.pos};
  }

  bool at_section() const {
    return peek().kind == Tok::Ident && peek(1).kind == Tok::Colon &&
           section_keywords().count(peek().text);
  }

  // ident (',' ident)* ';'   -- the list may be empty.
  std::vector<Located<std::string>> ident_list() {
    std::vector<Located<std::string>> out;
    if (peek().kind == Tok::Semi) {
      next();
      return out;
    }
    out.push_back(ident());
    while (peek().kind == Tok::Comma) {
      next();
      out.push_back(ident());
    }
    expect(Tok::Semi);
    return out;
  }

  RawAutomaton parse_automaton() {
    RawAutomaton a;
    a.id = ident("automaton name");
    expect(Tok::LBrace);
    while (peek().kind != Tok::RBrace) {
      const Token& key = expect_ident("section name");
      expect(Tok::Colon);
      if (key.text == "inputs" || key.text == "outputs" || key.text == "internals") {
        const ActionKind kind = key.text == "inputs"    ? ActionKind::Input
                                : key.text == "outputs" ? ActionKind::Output
                                                        : ActionKind::Internal;
        for (auto& n : ident_list()) a.actions.emplace_back(std::move(n), kind);
      } else if (key.text == "states") {
        for (auto& n : ident_list()) a.states.push_back(std::move(n));
      } else if (key.text == "start") {
        for (auto& n : ident_list()) a.starts.push_back(std::move(n));
      } else if (key.text == "trans") {
        while (peek().kind != Tok::RBrace && !at_section()) a.transitions.push_back(transition());
      } else {
        fail(key, "'inputs', 'outputs', 'internals', 'states', 'start' or 'trans'");
      }
    }
    expect(Tok::RBrace);
    return a;
  }

  // name ':' source '-' action '->' target ';'
  RawTransition transition() {
    RawTransition t;
    t.name.pos = peek().pos;
    if (peek().kind == Tok::LBrace) {
      next();
      t.name.value.push_back(ident("transition label").value);
      while (peek().kind == Tok::Comma) {
        next();
        t.name.value.push_back(ident("transition label").value);
      }
      expect(Tok::RBrace);
    } else {
      const Token& n = expect_ident("transition name");
      if (section_keywords().count(n.text)) fail(n, "transition name");
      t.name.value.push_back(n.text);
    }
    expect(Tok::Colon);
    t.source = ident("source state");
    expect(Tok::Dash);
    t.action = ident("action");
    expect(Tok::Arrow);
    t.target = ident("target state");
    expect(Tok::Semi);
    return t;
  }

  RawConstraint parse_constraint() {
    RawConstraint c;
    c.id = ident("constraint name");
    const Token& over = expect_ident("'over'");
    if (over.text != "over") fail(over, "'over'");
    c.subject = ident("subject automaton");
    expect(Tok::LBrace);
    while (peek().kind != Tok::RBrace) {
      const Token& key = expect_ident("section name");
      expect(Tok::Colon);
      if (key.text == "states") {
        for (auto& n : ident_list()) c.states.push_back(std::move(n));
      } else if (key.text == "start") {
        for (auto& n : ident_list()) c.starts.push_back(std::move(n));
      } else if (key.text == "trans") {
        while (peek().kind != Tok::RBrace && !at_section()) {
          RawMetaTransition t;
          t.source = ident("meta-state");
          expect(Tok::Dash);
          t.label = ident("transition label");
          expect(Tok::Arrow);
          t.target = ident("meta-state");
          expect(Tok::Semi);
          c.transitions.push_back(std::move(t));
        }
      } else if (key.text == "policy") {
        const Token& p = expect_ident("'strict' or 'implicit-allow'");
        if (p.text == "strict") {
          c.policy = CompletionPolicy::Strict;
        } else if (p.text == "implicit" && peek().kind == Tok::Dash &&
                   peek(1).kind == Tok::Ident && peek(1).text == "allow") {
          next();
          next();
          c.policy = CompletionPolicy::ImplicitAllow;
        } else {
          fail(p, "'strict' or 'implicit-allow'");
        }
        expect(Tok::Semi);
      } else {
        fail(key, "'states', 'start', 'trans' or 'policy'");
      }
    }
    expect(Tok::RBrace);
    return c;
  }

  RawComposition parse_composition() {
    RawComposition c;
    c.id = ident("composition name");
    expect(Tok::LBrace);
    while (peek().kind != Tok::RBrace) {
      const Token& key = expect_ident("'components'");
      if (key.text != "components") fail(key, "'components'");
      expect(Tok::Colon);
      for (auto& n : ident_list()) c.components.push_back(std::move(n));
    }
    expect(Tok::RBrace);
    return c;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ParseResult parse_model(std::string_view text) {
  std::vector<detail::RawAutomaton> raw_automata;
  std::vector<detail::RawConstraint> raw_constraints;
  std::vector<detail::RawComposition> raw_compositions;
  ParseResult result;
  try {
    detail::Parser(text).parse(raw_automata, raw_constraints, raw_compositions);
  } catch (const detail::SyntaxError& e) {
    result.diagnostics.push_back(e.diagnostic);
    return result;
  }

  auto& diags = result.diagnostics;
  auto report = [&](std::string code, std::string message, SourcePos pos) {
    diags.push_back({std::move(code), std::move(message), pos});
  };

  ModelFile model;

  // Automata and compositions share one namespace (both can be a subject);
  // constraints have their own.
  std::set<std::string, std::less<>> systems;
  std::set<std::string, std::less<>> constraint_ids;
  auto claim = [&](std::set<std::string, std::less<>>& ns, const detail::Located<std::string>& id,
                   std::string_view kind) {
    if (!ns.insert(id.value).second) {
      report("DUPLICATE_ID", std::string(kind) + " '" + id.value + "' declared twice", id.pos);
      return false;
    }
    model.positions.emplace(id.value, id.pos);
    return true;
  };

  for (const auto& ra : raw_automata) {
    claim(systems, ra.id, "automaton");
    std::set<std::string, std::less<>> states;
    std::vector<StateId> state_list;
    for (const auto& s : ra.states) {
      if (!states.insert(s.value).second) {
        report("DUPLICATE_ID", "state '" + s.value + "' declared twice in " + ra.id.value, s.pos);
      } else {
        state_list.push_back(s.value);
      }
    }
    std::set<std::string, std::less<>> action_names;
    std::vector<Action> actions;
    for (const auto& [n, kind] : ra.actions) {
      if (!action_names.insert(n.value).second) {
        report("DUPLICATE_ID", "action '" + n.value + "' declared twice in " + ra.id.value, n.pos);
      } else {
        actions.push_back({n.value, kind});
      }
    }
    std::vector<StateId> starts;
    for (const auto& s : ra.starts) {
      if (!states.count(s.value)) {
        report("UNRESOLVED_REF", "start state '" + s.value + "' is not declared", s.pos);
      } else {
        starts.push_back(s.value);
      }
    }
    std::vector<Transition> transitions;
    for (const auto& t : ra.transitions) {
      bool good = true;
      for (const auto* ref : {&t.source, &t.target}) {
        if (!states.count(ref->value)) {
          report("UNRESOLVED_REF", "state '" + ref->value + "' is not declared", ref->pos);
          good = false;
        }
      }
      if (!action_names.count(t.action.value)) {
        report("UNRESOLVED_REF", "action '" + t.action.value + "' is not declared", t.action.pos);
        good = false;
      }
      if (good) {
        transitions.push_back(
            {TransitionName(t.name.value), t.source.value, t.action.value, t.target.value});
      }
    }
    model.automata.emplace_back(ra.id.value, std::move(state_list), std::move(actions),
                                std::move(transitions), std::move(starts));
  }

  for (const auto& rc : raw_compositions) {
    claim(systems, rc.id, "composition");
    CompositionDecl decl{rc.id.value, {}};
    for (const auto& c : rc.components) {
      if (!model.find_automaton(c.value)) {
        report("UNRESOLVED_REF", "component '" + c.value + "' is not a declared automaton", c.pos);
      }
      decl.components.push_back(c.value);
    }
    model.compositions.push_back(std::move(decl));
  }

  for (const auto& rc : raw_constraints) {
    claim(constraint_ids, rc.id, "constraint");
    LabelSet terminals;
    if (const auto* a = model.find_automaton(rc.subject.value)) {
      terminals = a->labels();
    } else if (const auto* c = model.find_composition(rc.subject.value)) {
      for (const auto& comp : c->components) {
        if (const auto* a = model.find_automaton(comp)) {
          auto l = a->labels();
          terminals.insert(l.begin(), l.end());
        }
      }
    } else {
      report("UNRESOLVED_REF", "subject '" + rc.subject.value + "' is not declared",
             rc.subject.pos);
    }
    std::set<std::string, std::less<>> states;
    std::vector<StateId> state_list;
    for (const auto& s : rc.states) {
      if (!states.insert(s.value).second) {
        report("DUPLICATE_ID", "state '" + s.value + "' declared twice in " + rc.id.value, s.pos);
      } else {
        state_list.push_back(s.value);
      }
    }
    std::vector<StateId> starts;
    for (const auto& s : rc.starts) {
      if (!states.count(s.value)) {
        report("UNRESOLVED_REF", "start state '" + s.value + "' is not declared", s.pos);
      } else {
        starts.push_back(s.value);
      }
    }
    std::vector<MetaTransition> transitions;
    for (const auto& t : rc.transitions) {
      bool good = true;
      for (const auto* ref : {&t.source, &t.target}) {
        if (!states.count(ref->value)) {
          report("UNRESOLVED_REF", "meta-state '" + ref->value + "' is not declared", ref->pos);
          good = false;
        }
      }
      if (good) transitions.push_back({t.source.value, t.label.value, t.target.value});
    }
    model.constraints.emplace_back(rc.id.value, rc.subject.value, std::move(state_list),
                                   std::move(transitions), std::move(starts), std::move(terminals),
                                   rc.policy);
  }

  if (diags.empty()) result.model = std::move(model);
  return result;
}

namespace detail {

inline void write_list(std::ostream& os, std::string_view key,
                       const std::vector<std::string>& items) {
  os << "  " << key << ":";
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : " ") << items[i];
  os << ";\n";
}

}  // namespace detail

inline void write_automaton(std::ostream& os, const IOAutomaton& a) {
  os << "automaton " << a.id() << " {\n";
  detail::write_list(os, "inputs", a.actions_of(ActionKind::Input));
  detail::write_list(os, "outputs", a.actions_of(ActionKind::Output));
  detail::write_list(os, "internals", a.actions_of(ActionKind::Internal));
  detail::write_list(os, "states", a.states());
  detail::write_list(os, "start", a.starts());
  os << "  trans:\n";
  auto transitions = a.transitions();
  std::sort(transitions.begin(), transitions.end());
  for (const auto& t : transitions) {
    os << "    " << t.name.str() << ": " << t.source << " -" << t.action << "-> " << t.target
       << ";\n";
  }
  os << "}\n";
}

inline void write_constraint(std::ostream& os, const MetaAutomaton& m) {
  os << "constraint " << m.id() << " over " << m.subject() << " {\n";
  detail::write_list(os, "states", m.states());
  detail::write_list(os, "start", m.starts());
  os << "  trans:\n";
  auto transitions = m.transitions();
  std::sort(transitions.begin(), transitions.end(), [](const auto& x, const auto& y) {
    if (x.label != y.label) return natural_less(x.label, y.label);
    if (x.source != y.source) return x.source < y.source;
    return x.target < y.target;
  });
  for (const auto& t : transitions) {
    os << "    " << t.source << " -" << t.label << "-> " << t.target << ";\n";
  }
  os << "  policy: " << to_string(m.policy()) << ";\n";
  os << "}\n";
}

// Canonical form: declarations grouped by kind and sorted by id; states and
// actions in declaration order; transitions sorted by name.
inline std::string serialize_model(const ModelFile& m) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << '\n';
    first = false;
  };

  std::vector<const IOAutomaton*> automata;
  for (const auto& a : m.automata) automata.push_back(&a);
  std::sort(automata.begin(), automata.end(),
            [](const auto* x, const auto* y) { return x->id() < y->id(); });
  for (const auto* a : automata) {
    sep();
    write_automaton(os, *a);
  }

  std::vector<const CompositionDecl*> compositions;
  for (const auto& c : m.compositions) compositions.push_back(&c);
  std::sort(compositions.begin(), compositions.end(),
            [](const auto* x, const auto* y) { return x->id < y->id; });
  for (const auto* c : compositions) {
    sep();
    os << "composition " << c->id << " {\n";
    detail::write_list(os, "components", c->components);
    os << "}\n";
  }

  std::vector<const MetaAutomaton*> constraints;
  for (const auto& c : m.constraints) constraints.push_back(&c);
  std::sort(constraints.begin(), constraints.end(),
            [](const auto* x, const auto* y) { return x->id() < y->id(); });
  for (const auto* c : constraints) {
    sep();
    write_constraint(os, *c);
  }
  return os.str();
}

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// Edges are labeled "name: action" with the action's kind suffix, e.g.
// "p1: c!", "p4: l?", "p8: e;".
inline std::string export_dot(const IOAutomaton& a) {
  using detail::dot_quote;
  std::ostringstream os;
  os << "digraph " << dot_quote(a.id()) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle];\n";
  std::vector<StateId> starts = a.starts();
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::string entry = "__start" + std::to_string(i);
    os << "  " << dot_quote(entry) << " [shape=point, label=\"\"];\n";
    os << "  " << dot_quote(entry) << " -> " << dot_quote(starts[i]) << ";\n";
  }
  for (const auto& q : a.states()) os << "  " << dot_quote(q) << ";\n";
  auto transitions = a.transitions();
  std::sort(transitions.begin(), transitions.end());
  for (const auto& t : transitions) {
    const Action* act = a.find_action(t.action);
    std::string label = t.name.str() + ": " + t.action;
    if (act) label += kind_suffix(act->kind);
    os << "  " << dot_quote(t.source) << " -> " << dot_quote(t.target)
       << " [label=" << dot_quote(label) << "];\n";
  }
  os << "}\n";
  return os.str();
}

// An automaton declared in the file, or a declared composition built with
// the given options (its automaton takes the composition's id).
inline IOAutomaton resolve_system(const ModelFile& m, std::string_view id,
                                  bool full_product = false) {
  if (const auto* a = m.find_automaton(id)) return *a;
  if (const auto* c = m.find_composition(id)) {
    std::vector<IOAutomaton> parts;
    for (const auto& name : c->components) {
      const auto* a = m.find_automaton(name);
      if (!a) throw Error(ErrorCode::UnknownId, "component '" + name + "'");
      parts.push_back(*a);
    }
    return compose(ComponentCollection(std::move(parts)), {c->id, full_product}).automaton;
  }
  throw Error(ErrorCode::UnknownId, "no automaton or composition named '" + std::string(id) + "'");
}

}  // namespace metaguard

#endif  // METAGUARD_MODEL_IO_HPP
