#pragma once

#include <iosfwd>

#include "srde/scenario.hpp"

namespace srde {

/// Subcommand entry points; each writes CSV artifacts plus the resolved
/// scenario into the scenario's output directory and returns a process exit
/// code (nonzero on divergence or ensemble failure).
int cmd_simulate(const Scenario& s, std::ostream& log);
int cmd_reduce(const Scenario& s, std::ostream& log);
int cmd_sweep(const Scenario& s, std::ostream& log);
int cmd_compare(const Scenario& s, std::ostream& log);
int cmd_verify(const Scenario& s, std::ostream& log);

}  // namespace srde
