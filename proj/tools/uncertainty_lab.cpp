#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ulab/cli.hpp"

int main(int argc, char** argv) {
  using namespace ulab::cli;
  CLI::App app{"Discrete uncertainty principles: verification, minimizers, evolutions and Virial traces"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // -h is the mesh option

  struct Slot {
    Subcommand subcommand;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
  };
  std::vector<Slot> slots;
  slots.reserve(subcommands().size());
  for (Subcommand s : subcommands()) {
    auto& slot = slots.emplace_back(Slot{s, app.add_subcommand(std::string(subcommand_name(s)), std::string(subcommand_help(s))), {}, {}});
    slot.app->set_help_flag("--help", "Print this help message and exit");
    for (const ParamSpec& p : parameters(s)) {
      const std::string name(p.name);
      if (p.flag)
        slot.app->add_flag("--" + name, slot.flags[name], std::string(p.help));
      else
        slot.app->add_option("--" + name, slot.values[name], std::string(p.help));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  for (auto& slot : slots) {
    if (!slot.app->parsed()) continue;
    RunConfig config{slot.subcommand, {}};
    for (const auto& [name, value] : slot.values)
      if (slot.app->count("--" + name) > 0) config.params[name] = value;
    for (const auto& [name, on] : slot.flags)
      if (on) config.params[name] = "true";
    return run(config, std::cout, std::cerr);
  }
  return kExitInvalid;
}
