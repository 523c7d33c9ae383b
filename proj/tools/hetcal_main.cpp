// SPDX-License-Identifier: Apache-2.0
#include "hetcal/cli.hpp"

int main(int argc, char** argv) { return hetcal::cli::dispatch(argc, argv); }
