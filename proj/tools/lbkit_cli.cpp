// Command-line entry point for the benchmark cases.
//
//   lbkit run <case> [--config path] [--output dir] [--set Key=value]...
//   lbkit eoc <case> --resolutions a,b,c
//   lbkit optimize <case>
//
// Exit codes: 0 success, 1 validation error, 2 numerical blow-up,
// 3 optimizer failure. LBKIT_OUTPUT_DIR replaces the default output
// directory; an explicit --output wins over it.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbkit/cases.hpp"

namespace {

using namespace lbkit;

enum ExitCode { kOk = 0, kValidation = 1, kBlowup = 2, kOptimizer = 3 };

struct Options {
  std::string caseName;
  std::string configPath;
  std::string outputDir;
  std::string resolutions;
  std::vector<std::string> overrides;
  bool noOutput = false;
  bool quiet = false;
};

ConfigTree loadTree(const Options& o) {
  ConfigTree tree = o.configPath.empty() ? ConfigTree{} : parseConfig(o.configPath);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError("--set expects Key=value, got '" + kv + "'");
    }
    tree.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return tree;
}

CaseConfig makeConfig(const Options& o) {
  CaseConfig cfg;
  cfg.tree = loadTree(o);
  if (!o.outputDir.empty()) {
    cfg.outputDir = o.outputDir;
  } else if (const char* env = std::getenv("LBKIT_OUTPUT_DIR"); env && *env) {
    cfg.outputDir = env;
  }
  cfg.writeOutput = !o.noOutput;
  return cfg;
}

void requireKnown(const std::string& name) {
  if (!caseRegistry().contains(name)) {
    throw ValidationError("unknown case '" + name + "'; available: " + caseList());
  }
}

void printReport(const CaseReport& r) {
  std::printf("case %s\n", r.caseName.c_str());
  if (!r.rows.empty()) {
    for (const auto& c : r.columns) {
      std::printf("%14s", c.c_str());
    }
    std::printf("\n");
    for (const auto& row : r.rows) {
      for (double v : row) {
        std::printf("%14.6g", v);
      }
      std::printf("\n");
    }
  }
  if (r.eoc) {
    std::printf("EOC (%s) = %.6f\n", r.eocColumn.c_str(), r.eoc->slope);
  }
  for (const auto& [k, v] : r.metrics) {
    std::printf("%s = %.10g\n", k.c_str(), v);
  }
  if (!r.optimizerStatus.empty()) {
    std::printf("optimizer: %s\n", r.optimizerStatus.c_str());
  }
  std::printf("converged = %s, step = %lld, wall clock = %.2f s\n", r.converged ? "yes" : "no",
              r.convergenceStep, r.wallClockSeconds);
  if (!r.files.empty()) {
    std::printf("files:\n");
    for (const auto& f : r.files) {
      std::printf("  %s\n", f.c_str());
    }
  }
}

void writeManifest(const CaseConfig& cfg, CaseReport& r) {
  if (!cfg.writeOutput) {
    return;
  }
  const auto dir = std::filesystem::path(cfg.outputDir) / r.caseName;
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "manifest.txt").string();
  std::ofstream os(path);
  if (!os) {
    throw IoError("cannot write '" + path + "'");
  }
  for (const auto& [k, v] : r.metrics) {
    os << "# " << k << " = " << detail::formatDouble(v) << '\n';
  }
  for (const auto& f : r.files) {
    os << f << '\n';
  }
  r.files.push_back(path);
}

int cmdRun(const Options& o) {
  requireKnown(o.caseName);
  const CaseConfig cfg = makeConfig(o);
  CaseReport r = runCase(o.caseName, cfg);
  writeManifest(cfg, r);
  printReport(r);
  return kOk;
}

int cmdEoc(const Options& o) {
  requireKnown(o.caseName);
  if (!supportsEoc(o.caseName)) {
    throw ValidationError("case '" + o.caseName +
                          "' has no resolution study; use poiseuille2d, advectionDiffusion1d "
                          "or advectionDiffusion2d");
  }
  CaseConfig cfg = makeConfig(o);
  if (!o.resolutions.empty()) {
    cfg.tree.set("Application.Discretization.Resolutions", o.resolutions);
  }
  CaseReport r = runCase(o.caseName, cfg);
  if (!r.eoc) {
    throw ValidationError("an EOC needs at least two resolutions");
  }
  if (cfg.writeOutput) {
    const auto dir = std::filesystem::path(cfg.outputDir) / r.caseName;
    std::filesystem::create_directories(dir);
    const std::string path = (dir / (r.caseName + "_eoc.csv")).string();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      rows.push_back({r.column(i, "N"), r.column(i, "deltaX"), r.column(i, r.eocColumn)});
    }
    writeCSV(path, {"N", "deltaX", r.eocColumn}, rows);
    std::ofstream os(path, std::ios::app);
    os << "# fitted EOC = " << detail::formatDouble(r.eoc->slope) << '\n';
    if (!os) {
      throw IoError("cannot append to '" + path + "'");
    }
    r.files.push_back(path);
  }
  writeManifest(cfg, r);
  printReport(r);
  return kOk;
}

int cmdOptimize(const Options& o) {
  requireKnown(o.caseName);
  if (!isOptimizationCase(o.caseName)) {
    throw ValidationError("case '" + o.caseName +
                          "' is not an optimization case; use rosenbrock or "
                          "poiseuilleIdentification");
  }
  return cmdRun(o);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D lattice Boltzmann benchmark cases"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("case", o.caseName, "Case name")->required();
    sub->add_option("--config", o.configPath, "Config file");
    sub->add_option("--output", o.outputDir, "Output directory");
    sub->add_option("--set", o.overrides, "Override a config key (Section.Key=value)");
    sub->add_flag("--no-output", o.noOutput, "Skip VTI/CSV/PPM output");
    sub->add_flag("--quiet", o.quiet, "Suppress tagged log lines");
  };
  CLI::App* run = app.add_subcommand("run", "Run a case");
  common(run);
  CLI::App* eoc = app.add_subcommand("eoc", "Resolution study with fitted EOC");
  common(eoc);
  eoc->add_option("--resolutions", o.resolutions, "Comma separated resolutions");
  CLI::App* opt = app.add_subcommand("optimize", "Run an optimization case");
  common(opt);
  app.add_subcommand("list", "List the available cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  Logger log("lbkit");
  Logger::quiet() = o.quiet;
  try {
    if (app.got_subcommand("list")) {
      for (const auto& [name, fn] : caseRegistry()) {
        std::printf("%s\n", name.c_str());
      }
      return kOk;
    }
    if (run->parsed()) {
      return cmdRun(o);
    }
    if (eoc->parsed()) {
      return cmdEoc(o);
    }
    return cmdOptimize(o);
  } catch (const NumericalBlowup& e) {
    Logger::quiet() = false;
    log.warn(e.what());
    return kBlowup;
  } catch (const SingularBoundary& e) {
    Logger::quiet() = false;
    log.warn(e.what());
    return kBlowup;
  } catch (const OptimizerError& e) {
    Logger::quiet() = false;
    log.warn(e.what());
    return kOptimizer;
  } catch (const std::exception& e) {
    Logger::quiet() = false;
    log.warn(e.what());
    return kValidation;
  }
}
