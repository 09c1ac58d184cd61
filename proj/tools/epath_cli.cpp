// epath: run entwined-path experiments and write plot-ready data files.
//
//   epath carrier --set lattice.n=10 --set construction.M=20 --out out/carrier
//   epath validate --config run.conf

#include <CLI11.hpp>
#include <iostream>

#include "epath/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Entwined-path lattice experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, threads;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file or a previous manifest.json");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads, or auto");
    sub->add_option("--set", overrides, "override a config key: key=value (repeatable)");
  };
  for (const char* name : {"chessboard", "carrier", "propagate", "ring"}) {
    add_common(app.add_subcommand(name, std::string("run the ") + name + " experiment"));
  }
  auto* validate_cmd = app.add_subcommand("validate", "check a config and list every violation");
  add_common(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  epath::cli::RunConfig config;
  try {
    if (chosen->get_name() != "validate") config.set("experiment", chosen->get_name());
    if (!config_path.empty()) config.load_file(config_path);
    if (chosen->get_name() != "validate") config.set("experiment", chosen->get_name());
    for (const auto& o : overrides) config.apply_override(o);
    if (!out_dir.empty()) config.set("output_dir", out_dir);
    if (!threads.empty()) config.set("threads", threads);
  } catch (const epath::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (chosen == validate_cmd) {
    const auto diags = epath::cli::validate(config);
    for (const auto& d : diags) std::cout << d.key << ": " << d.message << '\n';
    if (diags.empty()) std::cout << "ok\n";
    return diags.empty() ? 0 : 2;
  }
  return epath::cli::run(config, std::cerr);
}
