// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hetcal/protocol.hpp"

namespace hetcal {

/// The scenario used when a config file omits sections: the free-space
/// example receiver (lumped efficiency 0.345) at a 20 MHz IF.
Scenario example_scenario();

namespace cli {

/// Batch front end. Subcommands: simulate, enbw, estimate, validate,
/// sweep, budget. Returns 0 on success, 1 on usage errors, 2 on
/// data/schema errors, 3 on analysis errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace cli
}  // namespace hetcal
