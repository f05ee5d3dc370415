#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "weaklab/scenarios.hpp"

namespace {

struct ScenarioOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::int64_t seed = -1;
  bool describe = false;
};

int run(const std::string& scenario, const ScenarioOptions& opts) {
  using namespace weaklab;

  if (opts.describe) {
    std::cout << stable_json(describe_scenario(scenario));
    return 0;
  }
  if (opts.config_path.empty()) {
    std::cerr << "error: --config is required (or use --describe)\n";
    return 2;
  }

  std::ifstream in(opts.config_path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << opts.config_path
              << "'\n";
    return 4;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  // Flags override config fields.
  std::optional<std::uint64_t> seed_flag;
  if (opts.seed >= 0) {
    seed_flag = static_cast<std::uint64_t>(opts.seed);
  }
  ScenarioConfig cfg = parse_config(buffer.str(), scenario, seed_flag);
  if (!opts.format.empty()) {
    cfg.format = opts.format;
  }
  if (!opts.out_path.empty()) {
    cfg.out_path = opts.out_path;
  }

  const Report report = run_scenario(cfg);
  const std::string rendered = render_report(report, cfg.format);

  if (cfg.out_path) {
    std::ofstream out(*cfg.out_path, std::ios::binary);
    if (!out) {
      throw IoError("cannot open output file '" + *cfg.out_path + "'");
    }
    out << rendered;
    if (!out) {
      throw IoError("failed writing output file '" + *cfg.out_path + "'");
    }
  } else {
    std::cout << rendered;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weaklab: generalized weak measurement toolkit"};
  app.require_subcommand(1);

  std::map<std::string, ScenarioOptions> options;
  for (const std::string& name : weaklab::scenario_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    ScenarioOptions& opts = options[name];
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--seed", opts.seed, "override the config seed");
    sub->add_option("--out", opts.out_path, "output file (default stdout)");
    sub->add_option("--format", opts.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--describe", opts.describe,
                  "print the parameter schema and exit");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string scenario = app.get_subcommands().front()->get_name();
  try {
    return run(scenario, options[scenario]);
  } catch (const weaklab::ConfigInvalid& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::ExtrapolationDiverged& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return 3;
  } catch (const weaklab::InfeasibleProblem& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return 3;
  } catch (const weaklab::IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return 4;
  } catch (const weaklab::ValidationError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::DimensionMismatch& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::NonHermitianInput& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::LambdaOutOfRange& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::ModeMismatch& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::GridTooCoarse& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::ZeroPostselectionProbability& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::ZeroOutcomeProbability& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const weaklab::ZeroOverlap& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
