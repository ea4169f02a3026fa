#include <CLI11.hpp>

#include "ergopt/app.hpp"

int main(int argc, char** argv) {
  ergopt::ExperimentConfig cfg;
  std::vector<std::string> positional;

  CLI::App app{"Ergodic optimization and Lyapunov spectra of linear cocycles"};
  app.add_option("command", positional, "[run] birkhoff|rotation|fish|jsr|morse|adapt|homoclinic|props")
      ->required()
      ->expected(1, 2);
  app.add_option("--cocycle", cfg.cocycle, "cocycle JSON document");
  app.add_option("--observable", cfg.observable, "builtin name(s) or observable JSON document");
  app.add_option("--max-period", cfg.max_period, "longest periodic orbit sampled")->capture_default_str();
  app.add_option("--depth", cfg.depth, "envelope depth")->capture_default_str();
  app.add_option("--depths", cfg.depths, "domination depths (default: depth/2, 3 depth/4, depth)")->delimiter(',');
  app.add_option("--k", cfg.k, "midpoint recursion levels, N = 2^k")->capture_default_str();
  app.add_option("--directions", cfg.directions, "number of support directions")->capture_default_str();
  app.add_option("--theta", cfg.theta, "auto, none, or comma-separated indices")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "sampled words for adapt certificates")->capture_default_str();
  app.add_option("--cases", cfg.cases, "cases per dimension for props")->capture_default_str();
  app.add_option("--terms", cfg.terms, "terms of the homoclinic sum")->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "inclusion tolerance (default: envelope gap)");
  app.add_option("--necklace", cfg.necklace, "orbit for the favored-measure diagnostic");
  app.add_option("--out", cfg.out, "JSON output path (default: stdout)");
  app.add_option("--svg", cfg.svg, "SVG plot path");
  app.add_option("--csv", cfg.csv, "CSV of inner vertices");
  app.add_option("--support-csv", cfg.support_csv, "CSV of outer support bounds");
  app.add_flag("--deterministic", cfg.deterministic, "sequential execution");
  app.add_option("--workers", cfg.workers, "worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (positional.size() == 2) {
    if (positional[0] != "run") {
      std::cerr << "error: expected 'run <command>' or '<command>'\n";
      return 1;
    }
    positional.erase(positional.begin());
  }
  cfg.command = positional[0];
  return ergopt::run(cfg);
}
