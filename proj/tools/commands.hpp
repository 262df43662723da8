#pragma once

#include <functional>

#include "common.hpp"

namespace ranklab::cli {

using Action = std::function<void()>;

// Each function registers one subcommand on `root`; parsing that subcommand
// stores its body in `action`.
void add_gen_synthetic(CLI::App& root, Common& common, Action& action);
void add_estimate(CLI::App& root, Common& common, Action& action);
void add_simulate(CLI::App& root, Common& common, Action& action);
void add_sweep(CLI::App& root, Common& common, Action& action);
void add_analyze(CLI::App& root, Common& common, Action& action);
void add_serve(CLI::App& root, Common& common, Action& action);
void add_replay(CLI::App& root, Common& common, Action& action);

}  // namespace ranklab::cli
