#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nevlab/config.hpp"
#include "nevlab/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "nevlab-out";
  std::int64_t seed = -1;
  int threads = 0;
  bool reproducible = false;
};

void attach(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "configuration file (key = value lines)")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", args.overrides, "override a config entry, key=value")
      ->take_all();
  sub->add_option("--out", args.out_dir, "artifact root directory");
  sub->add_option("--seed", args.seed, "random seed (stored in the config)");
  sub->add_option("--threads", args.threads, "worker threads, 0 = hardware default");
  sub->add_flag("--reproducible", args.reproducible,
                "suppress timestamps so identical runs produce identical bytes");
}

int dispatch(const std::string& name, const CommonArgs& args) {
  nevlab::runner::RunOptions opts;
  opts.subcommand = name;
  if (!args.config_path.empty()) opts.cfg = nevlab::config::Config::load(args.config_path);
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    opts.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed >= 0) opts.cfg.set("seed", std::to_string(args.seed));
  opts.out_root = args.out_dir;
  if (const char* env = std::getenv("NEVLAB_OUT"); env && *env) opts.out_root = env;
  opts.threads = args.threads;
  opts.reproducible = args.reproducible;
  return nevlab::runner::run(opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian-motion laboratory for value distribution on model Kahler manifolds"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"ode-check", "solve the curvature comparison equation and verify its growth bounds"},
      {"bm-check", "validate the sampler: exit times, exit law, occupation identities"},
      {"fmt", "scan the first main identity over a radius grid"},
      {"smt", "evaluate the second main inequality and its supporting estimates"},
      {"defect", "estimate defects and test the defect-sum bound"},
      {"calibrate", "freeze comparison and singular-volume constants to JSON"},
  };
  std::vector<CommonArgs> args(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i)
    attach(app.add_subcommand(subs[i].first, subs[i].second), args[i]);

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (app.got_subcommand(subs[i].first)) return dispatch(subs[i].first, args[i]);
    std::cerr << "no subcommand selected\n";
    return nevlab::runner::kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return nevlab::runner::kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return nevlab::runner::kExitNumerical;
  }
}
