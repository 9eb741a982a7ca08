#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "upcfekete/cli.hpp"

using namespace upcfekete;

int main(int argc, char** argv) {
  CLI::App app{"Fekete points and equidistribution experiments on UPC sets", "upcfekete"};
  std::string command, plan_path, out_dir;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool verbose = false;
  cli::ConstantsArgs constants;
  app.add_option("command", command, "fekete | extremal | hcp | rates | constants | validate-upc")->required();
  app.add_option("--plan", plan_path, "plan document (JSON)");
  app.add_option("--out", out_dir, "output directory, overrides the plan");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "progress on stderr");
  app.add_option("--alpha", constants.alpha, "constants: weight Holder exponent");
  app.add_option("--gamma", constants.gamma, "constants: test-norm exponent");
  app.add_option("--m", constants.m, "constants: cusp exponent");
  app.add_option("--n", constants.n, "constants: dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << '\n' << cli::usage();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << cli::usage();
    return 2;
  }

  if (!cli::is_command(command)) {
    std::cerr << "unknown command '" << command << "'\n" << cli::usage();
    return 2;
  }
  if (command == "constants") return cli::run_constants(constants, std::cout, std::cerr);
  if (plan_path.empty()) {
    std::cerr << command << " needs --plan\n" << cli::usage();
    return 2;
  }

  cli::ExperimentPlan plan;
  try {
    std::ifstream in(plan_path);
    if (!in) {
      std::cerr << cli::json{{"code", "cli.input"}, {"message", "cannot read " + plan_path}}.dump() << '\n';
      return 2;
    }
    plan = cli::parse_plan(cli::json::parse(in));
  } catch (const cli::PlanError& e) {
    std::cerr << cli::json{{"code", e.code()}, {"problems", e.problems()}}.dump() << '\n';
    return 2;
  } catch (const cli::json::exception& e) {
    std::cerr << cli::json{{"code", "cli.input"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  cli::RunOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  options.workers = workers;
  options.verbose = verbose;
  return cli::dispatch(command, plan, options, std::cout, std::cerr);
}
