#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rotcool/config.hpp"
#include "rotcool/errors.hpp"
#include "rotcool/runner.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRegime = 3;
constexpr int kExitNumerical = 4;

rotcool::toml::Document read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rotcool::ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return rotcool::toml::parse(ss.str(), path);
}

rotcool::RunConfig load(const std::string& path, const std::string& output_dir,
                        const char* force_mode = nullptr) {
  auto doc = read_document(path);
  if (force_mode) doc.set("mode", force_mode);
  if (!output_dir.empty()) doc.set("output_dir", output_dir);
  return rotcool::parse_config(doc);
}

void report(const rotcool::RunReport& r) {
  for (const auto& w : r.warnings) fmt::print(stderr, "warning: {}\n", w);
  for (const auto& f : r.files) fmt::print("{}\n", (r.output_dir / f).string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotational and translational laser-cooling simulator"};
  app.set_version_flag("--version", std::string(ROTCOOL_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;

  auto* simulate = app.add_subcommand("simulate", "Run the mode named in the configuration");
  simulate->add_option("config", config_path, "TOML configuration")->required()->check(CLI::ExistingFile);
  simulate->add_option("-o,--output-dir", output_dir, "Override output_dir");

  auto* scan = app.add_subcommand("scan", "Run a [scan] configuration");
  scan->add_option("config", config_path, "TOML configuration")->required()->check(CLI::ExistingFile);
  scan->add_option("-o,--output-dir", output_dir, "Override output_dir");

  auto* fortrat = app.add_subcommand("fortrat", "Write the line list of the [molecule] section");
  fortrat->add_option("config", config_path, "TOML configuration")->required()->check(CLI::ExistingFile);
  fortrat->add_option("-o,--output-dir", output_dir, "Override output_dir");

  auto* validate = app.add_subcommand("validate", "Check a configuration and print its canonical form");
  validate->add_option("config", config_path, "TOML configuration")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*simulate) {
      report(rotcool::run(load(config_path, output_dir)));
    } else if (*scan) {
      const auto cfg = load(config_path, output_dir);
      if (cfg.mode != rotcool::RunMode::scan) {
        throw rotcool::ValidationError("mode", "the scan command needs mode = \"scan\"");
      }
      report(rotcool::run(cfg));
    } else if (*fortrat) {
      report(rotcool::run(load(config_path, output_dir, "fortrat")));
    } else if (*validate) {
      const auto cfg = load(config_path, "");
      fmt::print("# sha256 {}\n{}", rotcool::config_sha256(cfg), rotcool::serialize_config(cfg));
    }
  } catch (const rotcool::ValidationError& e) {
    fmt::print(stderr, "validation error: {}\n", e.what());
    return kExitValidation;
  } catch (const rotcool::RegimeError& e) {
    fmt::print(stderr, "regime error: {}\n", e.what());
    return kExitRegime;
  } catch (const rotcool::NumericalError& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
