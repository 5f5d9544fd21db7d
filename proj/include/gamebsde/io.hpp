#pragma once

#include "gamebsde/bsde.hpp"

#include <optional>
#include <string>

namespace gbsde {

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

/// CSV with columns level,node_index,y,z_1..z_d,a and, when a stopping policy is given, stop.
/// z cells are empty on the terminal level.
std::string solution_csv(const SolutionField& sol, int dim, const StoppingPolicy* stopping = nullptr);

} // namespace gbsde
