// Batch front end: parse a run configuration, execute solve/verify
// pipelines, write paths and reports. See README for the config grammar.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hsde/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CLI::ValidationError("--config", "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

hsde::RunConfig load_with_overrides(const std::string& config_path, std::uint64_t* seed,
                                    int* replications, int* threads) {
  hsde::RunConfig config = hsde::load_config(slurp(config_path));
  if (seed) config.seed = *seed;
  if (replications) config.replications = *replications;
  if (threads) config.threads = *threads;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong solutions of Levy-driven SDEs with Hermite-Sobolev lifted coefficients"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications, threads;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the config seed");
    cmd->add_option("--replications", replications, "override the replication count");
    cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "solve and write per-replication paths");
  add_run_flags(simulate);
  CLI::App* verify = app.add_subcommand("verify", "run the configured checks and reports");
  add_run_flags(verify);

  // Debug utilities over the expansion machinery.
  CLI::App* hermite = app.add_subcommand("hermite", "expansion utilities");
  hermite->require_subcommand(1);
  std::vector<int> order;
  std::vector<double> point;
  double p_order = 0.0;
  int cutoff = 16;
  std::string in_path, out_path;

  CLI::App* heval = hermite->add_subcommand("eval", "evaluate h_n at a point");
  heval->add_option("--n", order, "multi-index entries")->required();
  heval->add_option("--x", point, "evaluation point")->required();

  CLI::App* hproject = hermite->add_subcommand("project", "project exp(-|x|^2/2) (demo function)");
  hproject->add_option("--cutoff", cutoff, "expansion cutoff");
  hproject->add_option("--out", out_path, "write the expansion here");

  CLI::App* hnorm = hermite->add_subcommand("norm", "S_p norm of a serialized expansion");
  hnorm->add_option("--input", in_path, "expansion file")->required();
  hnorm->add_option("--p", p_order, "regularity order")->required();

  CLI::App* htranslate = hermite->add_subcommand("translate", "translate a serialized expansion");
  htranslate->add_option("--input", in_path, "expansion file")->required();
  htranslate->add_option("--z", point, "translation vector")->required();
  htranslate->add_option("--out", out_path, "write the result here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed() || verify->parsed()) {
      hsde::RunConfig config =
          load_with_overrides(config_path, seed ? &*seed : nullptr,
                              replications ? &*replications : nullptr,
                              threads ? &*threads : nullptr);
      return simulate->parsed() ? hsde::run_simulate(config, out_dir)
                                : hsde::run_verify(config, out_dir);
    }

    if (heval->parsed()) {
      hsde::MultiIndex n;
      n.dim = static_cast<int>(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) n.entries[i] = order[i];
      n.validate();
      Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(point.data(), static_cast<long>(point.size()));
      printf("%.17g\n", hsde::hermite_eval(n, x));
    } else if (hproject->parsed()) {
      const auto rule = hsde::default_rule(cutoff);
      const auto y = hsde::project([](const Eigen::VectorXd& x) { return std::exp(-x.squaredNorm() / 2.0); },
                                   1, cutoff, rule);
      const std::string text = hsde::to_text(y);
      if (out_path.empty()) std::cout << text;
      else std::ofstream(out_path, std::ios::binary) << text;
    } else if (hnorm->parsed()) {
      std::ifstream is(in_path, std::ios::binary);
      const auto y = hsde::read_text(is);
      printf("%.17g\n", hsde::norm_p(y, p_order));
    } else if (htranslate->parsed()) {
      std::ifstream is(in_path, std::ios::binary);
      const auto y = hsde::read_text(is);
      Eigen::VectorXd z = Eigen::Map<Eigen::VectorXd>(point.data(), static_cast<long>(point.size()));
      const auto rule = hsde::default_rule(y.cutoff, z.norm());
      const std::string text = hsde::to_text(hsde::translate(y, z, rule));
      if (out_path.empty()) std::cout << text;
      else std::ofstream(out_path, std::ios::binary) << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
