#ifndef METAGUARD_TESTS_FIXTURES_HPP
#define METAGUARD_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "metaguard/metaguard.hpp"

#ifndef METAGUARD_MODELS_DIR
#error "METAGUARD_MODELS_DIR must point at the models/ directory"
#endif

namespace fixtures {

inline std::string model_path(const std::string& name) {
  return std::string(METAGUARD_MODELS_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline metaguard::ModelFile load(const std::string& name) {
  auto parsed = metaguard::parse_model(read_text(model_path(name)));
  if (!parsed.ok()) {
    std::string msg = name + ":";
    for (const auto& d : parsed.diagnostics) msg += " " + metaguard::to_string(d);
    throw std::runtime_error(msg);
  }
  return *parsed.model;
}

struct Reactor {
  metaguard::ModelFile file = load("reactor.mga");
  metaguard::IOAutomaton system = *file.find_automaton("Reactor");
  metaguard::MetaAutomaton constraint = *file.find_constraint("WaterAfterCatalyst");
  metaguard::IOAutomaton safe = metaguard::meta_compose(system, constraint).automaton;
};

struct Candy {
  metaguard::ModelFile file = load("candy.mga");
  metaguard::IOAutomaton machine = *file.find_automaton("Machine");
  metaguard::IOAutomaton user = *file.find_automaton("User");
  metaguard::IOAutomaton system = metaguard::resolve_system(file, "CandySystem");
  metaguard::MetaAutomaton declared = *file.find_constraint("NoRepeatedButton");
  metaguard::MetaAutomaton constraint = metaguard::effective_meta(declared, system);
  metaguard::IOAutomaton safe = metaguard::meta_compose(system, constraint).automaton;
};

struct Toy {
  metaguard::ModelFile file = load("toy.mga");
  metaguard::IOAutomaton system = *file.find_automaton("Toy");
  metaguard::MetaAutomaton constraint = *file.find_constraint("SkipY");
};

}  // namespace fixtures

#endif  // METAGUARD_TESTS_FIXTURES_HPP
