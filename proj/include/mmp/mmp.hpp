#pragma once

#include "box.hpp"
#include "calculus.hpp"
#include "error.hpp"
#include "feasibility.hpp"
#include "mm_function.hpp"
#include "problem.hpp"
#include "problems/aloha.hpp"
#include "problems/energy.hpp"
#include "problems/interference.hpp"
#include "solver.hpp"
