#pragma once

#include "slimdft/analysis.hpp"
#include "slimdft/ctmc.hpp"
#include "slimdft/engine.hpp"
#include "slimdft/error.hpp"
#include "slimdft/event.hpp"
#include "slimdft/export.hpp"
#include "slimdft/galileo.hpp"
#include "slimdft/generator.hpp"
#include "slimdft/interval.hpp"
#include "slimdft/markov_automaton.hpp"
#include "slimdft/measure.hpp"
#include "slimdft/model.hpp"
#include "slimdft/modularisation.hpp"
#include "slimdft/param_synthesis.hpp"
#include "slimdft/polynomial.hpp"
#include "slimdft/rational.hpp"
#include "slimdft/rational_function.hpp"
#include "slimdft/state.hpp"
#include "slimdft/symmetry.hpp"
