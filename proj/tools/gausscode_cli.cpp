// Command-line experiment harness.
//
// One subcommand per experiment. Configuration precedence, lowest to highest:
// built-in defaults, --config file, --set key=value overrides, then the
// explicit --seed/--trials/--out/--workers flags.
//
// Exit codes: 0 = every acceptance flag in the report passed, 1 = at least
// one flag failed, 2 = usage or configuration error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gausscode/harness/experiments.hpp"
#include "gausscode/harness/harness.hpp"
#include "gausscode/serialize.hpp"

namespace {

using gausscode::harness::ExperimentConfig;
using json = nlohmann::json;

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.master_seed = 1;
  c.workers = 0;
  c.out = ".";
  if (experiment == "concentration") {
    c.trials = 20000;
    c.params = json{{"D", 512}, {"epsilon", 0.25}, {"rank", 0}, {"copies", 3}};
  } else if (experiment == "code-run") {
    c.trials = 50;
    c.channel.family = "identity";
    c.channel.dim = 16;
    c.code.N = 4;
  } else if (experiment == "iid-sweep") {
    c.trials = 60;
    c.channel.family = "dephasing";
    c.channel.dim = 2;
    c.channel.param = 0.1;
    c.code.delta = 0.15;
    c.params = json{{"n_list", json::array({2, 4, 6})}, {"seeds_per_n", 20}};
  } else if (experiment == "uncertainty") {
    c.trials = 500;
  } else if (experiment == "pgm") {
    c.trials = 550;
    c.params = json{{"dims", json::array({2, 3})}, {"symmetric_trials", 50}};
  } else if (experiment == "typicality") {
    c.trials = 4;
    c.code.delta = 0.1;
    c.params = json{{"spectrum", json::array({0.2, 0.8})},
                    {"n_list", json::array({8, 12, 16, 20})}};
  }
  return c;
}

struct CliOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string out;
  int workers = 0;
  std::vector<std::string> sets;
};

int run(const std::string& experiment, const CliOptions& opt, const CLI::App* sub) {
  json cfg_json = gausscode::harness::to_json(default_config(experiment));

  if (sub->count("--config") > 0) {
    std::ifstream f(opt.config_path);
    if (!f) {
      std::cerr << "error: cannot open config file: " << opt.config_path << "\n";
      return 2;
    }
    json file_cfg = json::parse(f, nullptr, false);
    if (file_cfg.is_discarded() || !file_cfg.is_object()) {
      std::cerr << "error: config file is not a JSON object: " << opt.config_path << "\n";
      return 2;
    }
    if (file_cfg.contains("experiment") &&
        file_cfg.at("experiment").get<std::string>() != experiment) {
      std::cerr << "error: config file is for experiment '"
                << file_cfg.at("experiment").get<std::string>()
                << "' but the subcommand is '" << experiment << "'\n";
      return 2;
    }
    cfg_json.update(file_cfg, true);
    cfg_json["experiment"] = experiment;
  }

  for (const std::string& s : opt.sets) gausscode::harness::apply_override(cfg_json, s);

  if (sub->count("--seed") > 0) cfg_json["master_seed"] = opt.seed;
  if (sub->count("--trials") > 0) cfg_json["trials"] = opt.trials;
  if (sub->count("--out") > 0) cfg_json["out"] = opt.out;
  if (sub->count("--workers") > 0) cfg_json["workers"] = opt.workers;

  ExperimentConfig cfg = gausscode::harness::config_from_json(cfg_json);
  gausscode::harness::validate_config(cfg);

  const gausscode::harness::ExperimentReport report = gausscode::harness::run_experiment(cfg);

  const json report_json = gausscode::harness::to_json(report);
  std::string why;
  if (!gausscode::harness::validate_report_schema(report_json, &why)) {
    std::cerr << "internal error: report failed schema validation: " << why << "\n";
    return 2;
  }

  const std::filesystem::path out_dir = report.config.out.empty() ? "." : report.config.out;
  std::filesystem::create_directories(out_dir);
  gausscode::harness::write_text_file((out_dir / "report.json").string(),
                                      report_json.dump(2) + "\n");
  gausscode::harness::write_text_file((out_dir / "trials.csv").string(),
                                      gausscode::harness::trials_csv(report.trials));
  if (experiment == "typicality") {
    for (const auto& [stem, proj] : gausscode::harness::type_class_tables(report.config))
      gausscode::harness::write_text_file((out_dir / (stem + ".csv")).string(),
                                          gausscode::io::type_classes_csv(proj));
  }

  int failed_trials = 0;
  for (const auto& t : report.trials) failed_trials += t.failed ? 1 : 0;
  std::cout << "experiment: " << experiment << "\n"
            << "trials: " << report.trials.size() << " (" << failed_trials << " failed)\n";
  for (auto it = report.flags.begin(); it != report.flags.end(); ++it)
    std::cout << "flag " << it.key() << ": " << (it.value().get<bool>() ? "PASS" : "FAIL")
              << "\n";
  std::cout << "result: " << (report.pass ? "PASS" : "FAIL") << "\n"
            << "wrote " << (out_dir / "report.json").string() << ", "
            << (out_dir / "trials.csv").string() << "\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-subspace code experiment harness"};
  app.require_subcommand(1);

  CliOptions opt;
  std::vector<CLI::App*> subs;
  const char* descriptions[] = {
      "Monte-Carlo audit of the Gaussian tail bounds",
      "Draw random codes against a fixed channel and audit the information chain",
      "Typical reduction of an iid channel across block lengths",
      "Holevo uncertainty relation on random instances",
      "Pretty-good measurement vs the binary optimum",
      "Typical projector dimension/operator bounds and truncation weights"};
  const auto& names = gausscode::harness::experiment_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--trials", opt.trials, "trial count");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--workers", opt.workers, "worker threads (0 = auto)");
    sub->add_option("--set", opt.sets, "config override key=value (repeatable)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      return run(names[i], opt, subs[i]);
    } catch (const gausscode::harness::config_error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}
