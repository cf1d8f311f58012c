// Verification CLI: samples check suites over the bundle gallery and the
// constructors, emitting one JSON report per (bundle, check) pair.
//
// Exit codes: 0 all checks pass, 1 residual failure, 2 usage error,
// 3 I/O error.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "geomorph/geomorph.hpp"

int main(int argc, char** argv) {
  geomorph::CheckConfig flags;
  std::string config_path;

  CLI::App app{"residual verification suites for one-dimensional fibrations"};
  app.add_option("--suite", flags.suites,
                 "suites to run: all, morphism, classify, curvature, torsion, theorem1, killing "
                 "(comma-separated or repeated)")
      ->delimiter(',');
  app.add_option("--tolerance", flags.tolerance, "gate for closed-form residuals");
  app.add_option("--fd-tolerance", flags.fd_tolerance,
                 "gate for residuals limited by finite differences");
  app.add_option("--samples", flags.samples, "sample points per check and bundle");
  app.add_option("--seed", flags.seed, "base seed for all sampling streams");
  app.add_option("--jet-order", flags.jet_order,
                 "highest derivative order cross-checked against finite differences (1-3)");
  app.add_option("--margin", flags.margin, "interior margin for sampling regions");
  app.add_option("--output", flags.output_path, "write JSONL reports to this file instead of stdout");
  app.add_flag("--summary", flags.summary, "append a human-readable summary table to stdout");
  app.add_option("--config", config_path,
                 "JSON config file with CheckConfig field names; explicit flags override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    geomorph::CheckConfig cfg = flags;
    if (!config_path.empty()) {
      cfg = geomorph::load_config_file(config_path);
      if (app.count("--suite") > 0) cfg.suites = flags.suites;
      if (app.count("--tolerance") > 0) cfg.tolerance = flags.tolerance;
      if (app.count("--fd-tolerance") > 0) cfg.fd_tolerance = flags.fd_tolerance;
      if (app.count("--samples") > 0) cfg.samples = flags.samples;
      if (app.count("--seed") > 0) cfg.seed = flags.seed;
      if (app.count("--jet-order") > 0) cfg.jet_order = flags.jet_order;
      if (app.count("--margin") > 0) cfg.margin = flags.margin;
      if (app.count("--output") > 0) cfg.output_path = flags.output_path;
      if (app.count("--summary") > 0) cfg.summary = flags.summary;
    }

    const std::vector<geomorph::ResidualReport> reports = geomorph::run_checks(cfg);

    if (!cfg.output_path.empty()) {
      std::ofstream out(cfg.output_path);
      if (!out) throw geomorph::IoError("cannot open output file: " + cfg.output_path);
      geomorph::write_jsonl(out, reports);
      out.flush();
      if (!out) throw geomorph::IoError("failed while writing output file: " + cfg.output_path);
    } else {
      geomorph::write_jsonl(std::cout, reports);
    }
    if (cfg.summary) geomorph::write_summary(std::cout, reports);
    return geomorph::all_pass(reports) ? 0 : 1;
  } catch (const geomorph::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const geomorph::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const geomorph::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
