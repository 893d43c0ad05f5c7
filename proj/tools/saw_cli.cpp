// saw-cli: batch driver for the waveguide design and characterization
// library. Each subcommand reads one JSON config and writes its artifacts
// into an output directory; see the README for the config schema.

#include <deque>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "saw/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Piezoelectric waveguide design and RF characterization"};
  app.require_subcommand(1);

  struct Sub {
    saw::cli::Command command;
    CLI::App* parser = nullptr;
    std::string config;
    saw::cli::Overrides overrides;
  };
  const std::pair<saw::cli::Command, const char*> specs[] = {
      {saw::cli::Command::dispersion,
       "Solve surface modes for a film-on-substrate stack"},
      {saw::cli::Command::idt,
       "Synthesize transducer admittance and optional impedance match"},
      {saw::cli::Command::analyze,
       "Extract parasitics, k2, and loss from measured S-parameters"},
      {saw::cli::Command::lossfit,
       "Fit propagation loss from transmission peaks only"},
      {saw::cli::Command::ae,
       "Acoustoelectric DC power limits and mixing figures"},
      {saw::cli::Command::spinmap,
       "Spin-strain coupling maps from solved modes or an imported grid"}};

  std::deque<Sub> subs;
  for (const auto& [cmd, help] : specs) {
    subs.push_back({cmd});
    Sub& s = subs.back();
    s.parser = app.add_subcommand(saw::cli::to_string(cmd), help);
    s.parser->add_option("-c,--config", s.config, "JSON run config")
        ->required();
    s.parser->add_option("-o,--output-dir", s.overrides.output_dir,
                         "Override the config's output directory");
    s.parser->add_option("-w,--workers", s.overrides.workers,
                         "Override the config's worker count");
    s.parser->add_option("--materials", s.overrides.materials_path,
                         "Override the materials database path");
  }

  CLI11_PARSE(app, argc, argv);

  for (const Sub& s : subs)
    if (s.parser->parsed())
      return saw::cli::run_config_file(s.config, s.command, s.overrides);
  return 2;
}
