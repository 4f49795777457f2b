// Copyright 2026 The graspstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include "commands.hpp"
#include "graspstack/model_io.hpp"
#include "graspstack/report.hpp"
#include "graspstack/runtime.hpp"
#include "graspstack/scenario.hpp"

int main(int argc, char** argv) {
  using namespace graspstack::cli;
  graspstack::retain_freed_memory();

  CLI::App app{"Simulation, training and evaluation harness for a vision-guided prosthetic hand"};
  app.set_version_flag("--version", std::string(graspstack::kVersion));
  app.require_subcommand(1);
  int exit = kExitOk;
  register_run(app, &exit);
  register_train(app, &exit);
  register_eval(app, &exit);
  register_gen(app, &exit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const graspstack::SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const graspstack::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return exit;
}
