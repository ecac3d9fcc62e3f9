#ifndef METAGUARD_METAGUARD_HPP
#define METAGUARD_METAGUARD_HPP

#include "metaguard/automaton.hpp"
#include "metaguard/composition.hpp"
#include "metaguard/error.hpp"
#include "metaguard/meta.hpp"
#include "metaguard/model_io.hpp"
#include "metaguard/names.hpp"
#include "metaguard/traces.hpp"

#endif  // METAGUARD_METAGUARD_HPP
