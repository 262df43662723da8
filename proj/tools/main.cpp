#include <iostream>

#include "commands.hpp"
#include "ranklab/error.hpp"

#ifndef RANKLAB_VERSION
#define RANKLAB_VERSION "unknown"
#endif

int main(int argc, char** argv) {
  using namespace ranklab::cli;

  CLI::App app{"ranklab: popularity-based news ranking laboratory"};
  app.set_version_flag("--version", RANKLAB_VERSION);
  app.require_subcommand(1);

  // Shared options are accepted after the subcommand name too.
  app.fallthrough();

  Common common;
  common.add_to(app);
  common.argv.assign(argv + 1, argv + argc);
  Action action;
  add_gen_synthetic(app, common, action);
  add_estimate(app, common, action);
  add_simulate(app, common, action);
  add_sweep(app, common, action);
  add_analyze(app, common, action);
  add_serve(app, common, action);
  add_replay(app, common, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    common.resolve();
    if (action) action();
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ranklab::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
