// Command-line front end: u-grid sweeps of the interferometric readout,
// work-distribution dumps, and fluctuation-relation verification reports.

#include <iostream>

#include "CLI11.hpp"
#include "qwork/commands.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_path;
  std::string variant;
  long cutoff = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool out_required) {
  cmd->add_option("--config", opts.config_path,
                  "JSON run configuration (see README for the schema)");
  cmd->add_option("--preset", opts.preset,
                  "named preset instead of a config file (fig2c)");
  cmd->add_option("--cutoff", opts.cutoff, "override the Fock cutoff N");
  cmd->add_option("--variant", opts.variant,
                  "protocol variant: simple, general or appendix");
  auto* out = cmd->add_option("--out", opts.out_path, "output file path");
  if (out_required) out->required();
}

qwork::RunConfig resolve(const CommonOptions& opts) {
  if (opts.config_path.empty() == opts.preset.empty()) {
    throw std::invalid_argument(
        "provide exactly one of --config or --preset");
  }
  qwork::RunConfig config = opts.preset.empty()
                                ? qwork::load_run_config(opts.config_path)
                                : qwork::preset_by_name(opts.preset);
  if (opts.cutoff != 0) {
    config.scenario.cutoff = opts.cutoff;
    config.scenario.validate();
  }
  if (!opts.variant.empty()) {
    config.variant = qwork::variant_from_string(opts.variant);
  }
  if (!opts.out_path.empty()) {
    config.output_path = opts.out_path;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qwork: Ramsey-interferometric measurement of the characteristic "
      "function of quantum work distributions"};
  app.require_subcommand(1);

  CommonOptions sweep_opts, verify_opts, pw_opts;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "write chi(u) over the u-grid as CSV (ideal and damped)");
  add_common(sweep, sweep_opts, /*out_required=*/true);

  CLI::App* verify = app.add_subcommand(
      "verify",
      "run the enabled consistency checks; nonzero exit on any failure");
  add_common(verify, verify_opts, /*out_required=*/false);

  CLI::App* pw = app.add_subcommand(
      "pw", "write the two-point-measurement work distribution as CSV");
  add_common(pw, pw_opts, /*out_required=*/true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      const qwork::RunConfig config = resolve(sweep_opts);
      qwork::run_sweep_to_file(config, config.output_path);
      std::cout << "wrote " << config.scenario.u_grid.size() << " rows to "
                << config.output_path << "\n";
      return 0;
    }
    if (pw->parsed()) {
      const qwork::RunConfig config = resolve(pw_opts);
      qwork::run_pw_to_file(config, config.output_path);
      std::cout << "wrote work distribution to " << config.output_path
                << "\n";
      return 0;
    }
    const qwork::RunConfig config = resolve(verify_opts);
    const qwork::VerifyReport report = qwork::run_verify(config);
    qwork::print_verify_report(report, std::cout);
    if (!config.output_path.empty()) {
      qwork::write_verify_json(report, config.output_path);
      std::cout << "report written to " << config.output_path << "\n";
    }
    return report.all_pass ? 0 : 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
