// Command-line front end: mlab <ap|rh|norm|apply|check|sweep> --config <path> [--out dir] [--resolutions ...] [ids...]
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mlab/config.hpp"
#include "mlab/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Morrey-space operator toolkit"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  std::vector<int> resolutions;
  std::vector<std::string> ids;
  for (const char* name : {"ap", "rh", "norm", "apply", "check", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI configuration file");
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--resolutions", resolutions, "comma-separated resolution ladder")->delimiter(',');
    if (std::string(name) == "check" || std::string(name) == "sweep") sub->add_option("ids", ids, "check ids");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // usage errors share the configuration exit code
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  mlab::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw mlab::ConfigError("cannot open config file: " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = mlab::parse_config(ss.str());
    }
  } catch (const mlab::ConfigError& e) {
    nlohmann::ordered_json j;
    j["error"] = "config";
    j["message"] = e.what();
    j["violations"] = e.violations();
    std::cerr << j.dump() << '\n';
    return 2;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!resolutions.empty()) cfg.resolutions = resolutions;
  if (!ids.empty()) cfg.ids = ids;
  return mlab::dispatch(subcommand, cfg, std::cout, std::cerr);
}
