#ifndef METAGUARD_TOOLS_CLI_HPP
#define METAGUARD_TOOLS_CLI_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "metaguard/metaguard.hpp"

namespace metaguard::cli {

enum ExitStatus : int {
  kOk = 0,
  kViolated = 1,
  kInvalid = 2,
  kUsage = 3,
};

namespace detail {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "p1 {p5,p13} p2" -> one name per whitespace-separated word.
inline TransitionTrace parse_transition_trace(const std::string& s) {
  TransitionTrace out;
  for (auto w : split_ws(s)) {
    if (w.size() >= 2 && w.front() == '{' && w.back() == '}') w = w.substr(1, w.size() - 2);
    auto labels = split_commas(w);
    if (labels.empty()) throw UsageError("empty transition name in trace");
    out.emplace_back(std::move(labels));
  }
  return out;
}

inline json to_json(const Finding& f) {
  json j{{"severity", to_string(f.severity)}, {"code", f.code}, {"message", f.message}};
  if (f.witness) {
    json w = json::object();
    if (f.witness->state) w["state"] = *f.witness->state;
    if (f.witness->action) w["action"] = *f.witness->action;
    if (f.witness->transition) w["transition"] = *f.witness->transition;
    j["witness"] = w;
  }
  return j;
}

inline std::string trace_text(const ExecutionTrace& t) {
  return t.empty() ? std::string("(empty)") : to_string(t);
}

class Session {
 public:
  Session(std::ostream& out, std::ostream& err, bool json_mode)
      : out_(out), err_(err), json_(json_mode) {}

  ModelFile load(const std::string& path) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto parsed = parse_model(buf.str());
    if (!parsed.ok()) {
      for (const auto& d : parsed.diagnostics) err_ << path << ":" << to_string(d) << "\n";
      throw UsageError("'" + path + "' has " + std::to_string(parsed.diagnostics.size()) +
                       " diagnostic(s)");
    }
    return std::move(*parsed.model);
  }

  void write(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out_ << text;
      return;
    }
    std::ofstream o(path, std::ios::binary);
    if (!o) throw UsageError("cannot write '" + path + "'");
    o << text;
  }

  void emit(const json& j, const std::string& text) const {
    if (json_) {
      out_ << j.dump() << "\n";
    } else {
      out_ << text;
    }
  }

  void warn(const std::vector<Finding>& findings) const {
    for (const auto& f : findings) err_ << to_string(f.severity) << " " << f.code << ": " << f.message << "\n";
  }

  std::ostream& err() const { return err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool json_;
};

inline const MetaAutomaton& constraint_of(const ModelFile& m, const std::string& id) {
  const auto* c = m.find_constraint(id);
  if (!c) throw Error(ErrorCode::UnknownId, "no constraint named '" + id + "'");
  return *c;
}

inline void check_bound(std::size_t bound, std::size_t cap) {
  if (bound > cap) {
    throw Error(ErrorCode::BoundTooLarge,
                std::to_string(bound) + " exceeds the cap of " + std::to_string(cap));
  }
}

inline std::string report_text(const std::string& id, const ValidationReport& r) {
  std::string text = id + ": " + (r.ok() ? "OK" : "INVALID") + " (" +
                     std::to_string(r.errors()) + " errors, " + std::to_string(r.warnings()) +
                     " warnings)\n";
  for (const auto& f : r.findings) {
    text += "  " + std::string(to_string(f.severity)) + " " + f.code + ": " + f.message + "\n";
  }
  return text;
}

inline int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ValidationFailed:
    case ErrorCode::Incompatible:
    case ErrorCode::LabelClash:
    case ErrorCode::SubjectMismatch:
    case ErrorCode::NameCollision:
      return kInvalid;
    default:
      return kUsage;
  }
}

}  // namespace detail

// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::json;

  CLI::App app{"metaguard: I/O automata, constraint meta-automata and safe-system synthesis"};
  app.name("metaguard");
  app.require_subcommand(1);
  app.fallthrough();
  bool json_mode = false;
  std::size_t cap = 12;
  app.add_flag("--json", json_mode, "Emit one JSON object per result");
  app.add_option("--cap", cap, "Upper limit for --bound")->capture_default_str();

  std::string file, id, output, trace, system, constraint, components, policy, sub, sup;
  std::size_t bound = 8;
  bool full_product = false;

  auto* validate_cmd = app.add_subcommand("validate", "Validate automata, compositions and constraints");
  validate_cmd->add_option("file", file)->required();
  validate_cmd->add_option("--id", id, "Only this declaration");

  auto* compose_cmd = app.add_subcommand("compose", "Parallel composition of automata");
  compose_cmd->add_option("file", file)->required();
  compose_cmd->add_option("--components", components, "Comma-separated automaton ids");
  compose_cmd->add_option("--id", id, "Id of the composed automaton (or of a declared composition)");
  compose_cmd->add_flag("--full-product", full_product, "Keep the whole Cartesian state space");
  compose_cmd->add_option("-o,--output", output, "Output model file (default: stdout)");

  auto* meta_cmd = app.add_subcommand("meta-compose", "Synthesize the constrained system");
  meta_cmd->add_option("file", file)->required();
  meta_cmd->add_option("--system", system)->required();
  meta_cmd->add_option("--constraint", constraint)->required();
  meta_cmd->add_option("--policy", policy, "strict | implicit-allow (default: as declared)")
      ->check(CLI::IsMember({"strict", "implicit-allow"}));
  meta_cmd->add_option("--id", id, "Id of the result (default: <system>Safe)");
  meta_cmd->add_flag("--full-product", full_product, "Keep the whole product state space");
  meta_cmd->add_option("-o,--output", output, "Output model file (default: stdout)");

  auto* trace_cmd = app.add_subcommand("check-trace", "Membership of an execution trace");
  trace_cmd->add_option("file", file)->required();
  trace_cmd->add_option("--id", id)->required();
  trace_cmd->add_option("--trace", trace, "Whitespace-separated action names")->required();

  auto* meta_trace_cmd =
      app.add_subcommand("check-meta-trace", "Membership of a transition trace in a constraint");
  meta_trace_cmd->add_option("file", file)->required();
  meta_trace_cmd->add_option("--constraint", constraint)->required();
  meta_trace_cmd->add_option("--trace", trace, "Whitespace-separated labels")->required();

  auto* theorem_cmd =
      app.add_subcommand("theorem1", "Bounded check that the synthesis keeps exactly the authorized runs");
  theorem_cmd->add_option("file", file)->required();
  theorem_cmd->add_option("--system", system)->required();
  theorem_cmd->add_option("--constraint", constraint)->required();
  theorem_cmd->add_option("--bound", bound)->capture_default_str();

  auto* inclusion_cmd = app.add_subcommand("inclusion", "Bounded trace-language inclusion");
  inclusion_cmd->add_option("file", file)->required();
  inclusion_cmd->add_option("--sub", sub)->required();
  inclusion_cmd->add_option("--sup", sup)->required();
  inclusion_cmd->add_option("--bound", bound)->capture_default_str();

  auto* diagnose_cmd = app.add_subcommand("diagnose", "Transitions eliminated by a constraint");
  diagnose_cmd->add_option("file", file)->required();
  diagnose_cmd->add_option("--system", system)->required();
  diagnose_cmd->add_option("--constraint", constraint)->required();

  auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of an automaton");
  dot_cmd->add_option("file", file)->required();
  dot_cmd->add_option("--id", id)->required();
  dot_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

  auto* enumerate_cmd = app.add_subcommand("enumerate", "All traces up to a bound");
  enumerate_cmd->add_option("file", file)->required();
  enumerate_cmd->add_option("--id", id)->required();
  enumerate_cmd->add_option("--bound", bound)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "metaguard: " << e.what() << "\n";
    return kUsage;
  }

  detail::Session session(out, err, json_mode);
  try {
    if (validate_cmd->parsed()) {
      const auto model = session.load(file);
      bool all_ok = true;
      json results = json::array();
      std::string text;
      auto add = [&](const std::string& name, std::string_view kind, const ValidationReport& r) {
        all_ok = all_ok && r.ok();
        json findings = json::array();
        for (const auto& f : r.findings) findings.push_back(detail::to_json(f));
        results.push_back({{"id", name}, {"kind", kind}, {"ok", r.ok()}, {"findings", findings}});
        text += detail::report_text(name, r);
      };
      auto validate_composition = [&](const CompositionDecl& c) {
        std::vector<IOAutomaton> parts;
        for (const auto& n : c.components) parts.push_back(resolve_system(model, n));
        ValidationReport r;
        const ComponentCollection cs(std::move(parts));
        for (const auto& v : check_strong_compatibility(cs).violations) {
          r.error(std::string(to_string(v.clause)),
                  "'" + v.action + "' between components " + std::to_string(v.first) + " and " +
                      std::to_string(v.second),
                  Witness{{}, v.action, {}});
        }
        if (r.ok()) {
          for (auto& f : validate(resolve_system(model, c.id)).findings) {
            r.findings.push_back(std::move(f));
          }
        }
        add(c.id, "composition", r);
      };
      auto validate_constraint = [&](const MetaAutomaton& m) {
        const auto subject = resolve_system(model, m.subject());
        add(m.id(), "constraint", validate_meta(effective_meta(m, subject), subject));
      };
      if (!id.empty()) {
        if (const auto* a = model.find_automaton(id)) {
          add(id, "automaton", validate(*a));
        } else if (const auto* c = model.find_composition(id)) {
          validate_composition(*c);
        } else {
          validate_constraint(detail::constraint_of(model, id));
        }
      } else {
        for (const auto& a : model.automata) add(a.id(), "automaton", validate(a));
        for (const auto& c : model.compositions) validate_composition(c);
        for (const auto& m : model.constraints) validate_constraint(m);
      }
      session.emit({{"command", "validate"}, {"ok", all_ok}, {"results", results}}, text);
      return all_ok ? kOk : kInvalid;
    }

    if (compose_cmd->parsed()) {
      auto model = session.load(file);
      std::vector<std::string> names = detail::split_commas(components);
      if (names.empty()) {
        const auto* decl = model.find_composition(id);
        if (!decl) throw detail::UsageError("compose needs --components or --id of a composition");
        names = decl->components;
      }
      std::vector<IOAutomaton> parts;
      for (const auto& n : names) {
        const auto* a = model.find_automaton(n);
        if (!a) throw Error(ErrorCode::UnknownId, "no automaton named '" + n + "'");
        if (auto r = validate(*a); !r.ok()) {
          throw ValidationFailed(n + " is not a valid I/O automaton", std::move(r));
        }
        parts.push_back(*a);
      }
      auto result = compose(ComponentCollection(std::move(parts)), {id, full_product});
      const std::string new_id = result.automaton.id();
      if (model.find_automaton(new_id)) {
        throw Error(ErrorCode::UnknownId, "'" + new_id + "' already names an automaton");
      }
      std::erase_if(model.compositions, [&](const CompositionDecl& c) { return c.id == new_id; });
      model.automata.push_back(result.automaton);
      session.write(output, serialize_model(model));
      if (!output.empty() && output != "-") {
        session.emit({{"command", "compose"},
                      {"id", new_id},
                      {"states", result.automaton.states().size()},
                      {"transitions", result.automaton.transitions().size()}},
                     "composed " + new_id + ": " + std::to_string(result.automaton.states().size()) +
                         " states, " + std::to_string(result.automaton.transitions().size()) +
                         " transitions\n");
      }
      return kOk;
    }

    if (meta_cmd->parsed()) {
      auto model = session.load(file);
      const auto subject = resolve_system(model, system);
      const auto& declared = detail::constraint_of(model, constraint);
      const CompletionPolicy p =
          policy.empty() ? declared.policy()
                         : (policy == "strict" ? CompletionPolicy::Strict
                                               : CompletionPolicy::ImplicitAllow);
      const auto m = complete_meta(declared, subject, p);
      auto result = meta_compose(subject, m, {id, full_product});
      session.warn(result.warnings);
      const std::string new_id = result.automaton.id();
      if (model.find_automaton(new_id) || model.find_composition(new_id)) {
        throw Error(ErrorCode::UnknownId, "'" + new_id + "' is already declared");
      }
      model.automata.push_back(result.automaton);
      session.write(output, serialize_model(model));
      if (!output.empty() && output != "-") {
        session.emit({{"command", "meta-compose"},
                      {"id", new_id},
                      {"states", result.automaton.states().size()},
                      {"transitions", result.automaton.transitions().size()},
                      {"warnings", result.warnings.size()}},
                     "synthesized " + new_id + ": " +
                         std::to_string(result.automaton.states().size()) + " states, " +
                         std::to_string(result.automaton.transitions().size()) + " transitions\n");
      }
      return kOk;
    }

    if (trace_cmd->parsed()) {
      const auto model = session.load(file);
      const auto a = resolve_system(model, id);
      const auto t = detail::split_ws(trace);
      const bool accepted = accepts_execution(a, t);
      session.emit({{"command", "check-trace"}, {"id", id}, {"trace", t}, {"accepted", accepted}},
                   accepted ? "ACCEPTED\n" : "REJECTED\n");
      return accepted ? kOk : kViolated;
    }

    if (meta_trace_cmd->parsed()) {
      const auto model = session.load(file);
      const auto& declared = detail::constraint_of(model, constraint);
      const auto m = effective_meta(declared, resolve_system(model, declared.subject()));
      const auto t = detail::parse_transition_trace(trace);
      const bool accepted = accepts_transition_trace(m, t);
      json labels = json::array();
      for (const auto& n : t) labels.push_back(n.str());
      session.emit({{"command", "check-meta-trace"},
                    {"constraint", constraint},
                    {"trace", labels},
                    {"accepted", accepted}},
                   accepted ? "ACCEPTED\n" : "REJECTED\n");
      return accepted ? kOk : kViolated;
    }

    if (theorem_cmd->parsed()) {
      detail::check_bound(bound, cap);
      const auto model = session.load(file);
      const auto a = resolve_system(model, system);
      const auto m = effective_meta(detail::constraint_of(model, constraint), a);
      const auto report = check_theorem1(a, m, bound, {cap});
      json cex = json::array();
      std::string text = std::string(report.ok() ? "HOLDS" : "VIOLATED") +
                         " bound=" + std::to_string(bound) +
                         " traces=" + std::to_string(report.traces_checked) + "\n";
      for (const auto& c : report.counterexamples) {
        cex.push_back({{"trace", c.trace},
                       {"in_product", c.in_product},
                       {"exists_accepted_run", c.exists_accepted_run}});
        text += "  " + detail::trace_text(c.trace) + ": in product=" +
                (c.in_product ? "yes" : "no") +
                ", accepted run=" + (c.exists_accepted_run ? "yes" : "no") + "\n";
      }
      session.emit({{"command", "theorem1"},
                    {"ok", report.ok()},
                    {"bound", bound},
                    {"traces", report.traces_checked},
                    {"counterexamples", cex}},
                   text);
      return report.ok() ? kOk : kViolated;
    }

    if (inclusion_cmd->parsed()) {
      detail::check_bound(bound, cap);
      const auto model = session.load(file);
      const auto lhs = resolve_system(model, sub);
      const auto rhs = resolve_system(model, sup);
      const auto result = check_language_inclusion(lhs, rhs, bound);
      json j{{"command", "inclusion"},
             {"sub", sub},
             {"sup", sup},
             {"bound", bound},
             {"included", result.included}};
      std::string text = "INCLUDED\n";
      if (!result.included) {
        j["counterexample"] = *result.counterexample;
        text = "NOT INCLUDED: " + detail::trace_text(*result.counterexample) + "\n";
      }
      session.emit(j, text);
      return result.included ? kOk : kViolated;
    }

    if (diagnose_cmd->parsed()) {
      const auto model = session.load(file);
      const auto a = resolve_system(model, system);
      const auto m = effective_meta(detail::constraint_of(model, constraint), a);
      const auto hazards = diagnose_hazards(a, m);
      std::string text;
      for (const auto& l : hazards) text += l + "\n";
      session.emit({{"command", "diagnose"},
                    {"system", system},
                    {"constraint", constraint},
                    {"eliminated", std::vector<std::string>(hazards.begin(), hazards.end())}},
                   text);
      return kOk;
    }

    if (dot_cmd->parsed()) {
      const auto model = session.load(file);
      session.write(output, export_dot(resolve_system(model, id)));
      return kOk;
    }

    if (enumerate_cmd->parsed()) {
      detail::check_bound(bound, cap);
      const auto model = session.load(file);
      const auto traces = enumerate_traces(resolve_system(model, id), bound, {cap});
      json all = json::array();
      std::string text;
      for (const auto& t : traces) {
        all.push_back(t);
        text += detail::trace_text(t) + "\n";
      }
      session.emit({{"command", "enumerate"}, {"id", id}, {"bound", bound}, {"traces", all}}, text);
      return kOk;
    }
  } catch (const ValidationFailed& e) {
    err << "metaguard: " << e.what() << "\n";
    session.warn(e.report().findings);
    return kInvalid;
  } catch (const Error& e) {
    err << "metaguard: " << e.what() << "\n";
    return detail::exit_for(e.code());
  } catch (const detail::UsageError& e) {
    err << "metaguard: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "metaguard: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace metaguard::cli

#endif  // METAGUARD_TOOLS_CLI_HPP
