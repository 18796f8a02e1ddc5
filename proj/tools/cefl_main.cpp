// cefl: command-line harness for the simulator.
//
//   cefl run      --config c.cfg [--seed S] [--algo A] [--rounds T] [--epsilon E] [--out f.csv]
//   cefl sweep    --config c.cfg --seeds K [--out dir]
//   cefl allocate --config instance.txt
//   cefl verify   --config c.cfg [--seeds K]
//   cefl oracle   --config c.cfg
//
// Exit status: 0 ok, 1 configuration error, 2 oracle failure, 3 verification failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "allocate_instance.hpp"
#include "cefl/allocator.hpp"
#include "cefl/analysis.hpp"
#include "cefl/config.hpp"
#include "cefl/csv.hpp"
#include "cefl/engine.hpp"
#include "cefl/error.hpp"
#include "cefl/fedmath.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitOracle = 2;
constexpr int kExitVerify = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::string> algo;
  std::optional<std::size_t> rounds;
  std::optional<double> epsilon;
  std::size_t seeds = 20;
};

cefl::SimConfig resolve(const Options& o) {
  cefl::SimConfig c = o.config.empty() ? cefl::SimConfig{} : cefl::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.algo) {
    try {
      c.algorithm = cefl::parse_algorithm(*o.algo);
    } catch (const cefl::InvalidInput& e) {
      throw cefl::ConfigError(e.what());
    }
  }
  if (o.rounds) c.rounds = *o.rounds;
  if (o.epsilon) c.target_gap = *o.epsilon;
  c.validate();
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_run(const Options& o) {
  const auto config = resolve(o);
  const auto result = cefl::run_simulation(config);
  if (o.out.empty()) {
    cefl::write_csv(result.traces, std::cout);
  } else {
    cefl::emit_csv(result.traces, o.out);
    const auto& last = result.traces.back();
    std::cerr << "wrote " << result.traces.size() << " rounds to " << o.out << " (loss "
              << fmt(last.loss) << ", uploads " << last.cumulative_uploads << ")\n";
  }
  return kExitOk;
}

std::vector<cefl::SimulationResult> run_seeds(const cefl::SimConfig& base, std::size_t count) {
  std::vector<cefl::SimulationResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += workers) {
        cefl::SimConfig c = base;
        c.seed = base.seed + k;
        try {
          results[k] = cefl::run_simulation(c);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

int cmd_sweep(const Options& o) {
  const auto base = resolve(o);
  if (o.seeds == 0) throw cefl::ConfigError("--seeds must be positive");
  const auto results = run_seeds(base, o.seeds);

  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    for (std::size_t k = 0; k < results.size(); ++k) {
      const auto path = std::filesystem::path(o.out) / ("seed_" + std::to_string(base.seed + k) + ".csv");
      cefl::emit_csv(results[k].traces, path);
    }
  }

  std::cout << "seed,rounds,final_loss,final_gap,cumulative_uploads";
  if (base.target_gap) std::cout << ",uploads_at_epsilon";
  std::cout << '\n';
  double uploads_sum = 0.0;
  std::size_t reached = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& last = results[k].traces.back();
    std::cout << base.seed + k << ',' << results[k].traces.size() << ',' << fmt(last.loss) << ','
              << (last.gap ? fmt(*last.gap) : "") << ',' << last.cumulative_uploads;
    if (base.target_gap) {
      const auto u = cefl::uploads_at_reach(results[k].traces, *base.target_gap);
      std::cout << ',' << (u ? std::to_string(*u) : "");
      if (u) {
        uploads_sum += static_cast<double>(*u);
        ++reached;
      }
    }
    std::cout << '\n';
  }
  if (base.target_gap) {
    std::cerr << reached << " of " << results.size() << " seeds reached gap " << fmt(*base.target_gap);
    if (reached > 0) std::cerr << ", mean uploads " << fmt(uploads_sum / static_cast<double>(reached));
    std::cerr << '\n';
  }
  return kExitOk;
}

int cmd_allocate(const Options& o) {
  if (o.config.empty()) throw cefl::ConfigError("allocate needs --config <instance file>");
  const auto inst = load_instance(o.config);
  const auto plan = cefl::linear_search_allocate(inst.clients, inst.budget, inst.noise_psd_w_per_hz);

  std::cout << "client_id,gain,admitted,bandwidth_hz,power_w\n";
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    std::cout << e.client_id << ',' << fmt(inst.clients[i].gain) << ',' << (e.admitted ? 1 : 0) << ','
              << fmt(e.bandwidth_hz) << ',' << fmt(e.power_w) << '\n';
  }
  std::cerr << "admitted " << plan.admitted_count() << " of " << plan.entries.size() << ", bandwidth "
            << fmt(plan.bandwidth_used()) << " of " << fmt(inst.budget.total_bandwidth_hz) << " Hz\n";

  if (inst.clients.size() <= cefl::kBruteForceLimit) {
    const auto best = cefl::brute_force_allocate(inst.clients, inst.budget, inst.noise_psd_w_per_hz);
    if (best.admitted_count() != plan.admitted_count()) {
      std::cerr << "mismatch: exhaustive search admits " << best.admitted_count() << '\n';
      return kExitVerify;
    }
    std::cerr << "exhaustive search agrees\n";
  }
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const auto base = resolve(o);
  if (o.seeds == 0) throw cefl::ConfigError("--seeds must be positive");
  cefl::SimConfig probe = base;
  probe.rounds = 1;
  if (!cefl::build_federation(probe).f_star) {
    std::cerr << "centralized optimum unavailable, refusing to verify\n";
    return kExitOracle;
  }

  cefl::SimConfig c = base;
  c.target_gap.reset();  // every seed needs the same number of rounds
  const auto results = run_seeds(c, o.seeds);
  std::vector<std::vector<double>> gaps, rhos;
  for (const auto& r : results) {
    gaps.push_back(cefl::gap_series(r));
    rhos.push_back(cefl::rho_series(r));
  }
  const auto step = cefl::verify_rate(gaps, rhos);
  const auto envelope = cefl::verify_envelope(gaps, rhos);

  std::cout << "seeds " << results.size() << ", rounds " << c.rounds << ", algorithm "
            << cefl::to_string(c.algorithm) << '\n';
  std::cout << "per-round rate: " << step.violations << " violations of " << step.round_ok.size()
            << (step.passed() ? "  PASS" : "  FAIL") << '\n';
  std::cout << "envelope:       " << envelope.violations << " violations of " << envelope.round_ok.size()
            << (envelope.passed() ? "  PASS" : "  FAIL") << '\n';

  double rho_sum = 0.0;
  std::size_t rho_n = 0;
  for (const auto& s : rhos) {
    for (double r : s) {
      rho_sum += r;
      ++rho_n;
    }
  }
  const double rho_mean = rho_n ? rho_sum / static_cast<double>(rho_n) : 0.0;
  const double epsilon = base.target_gap.value_or(1e-3);
  const double f0 = step.mean_gap.front();
  std::cout << "mean rho " << fmt(rho_mean) << ", initial mean gap " << fmt(f0) << '\n';
  if (rho_mean > 0.0 && rho_mean < 1.0) {
    std::cout << "rounds to gap " << fmt(epsilon) << ": bound " << cefl::min_rounds_bound(rho_mean, epsilon, f0);
    const auto hit = std::find_if(step.mean_gap.begin(), step.mean_gap.end(),
                                  [&](double g) { return g <= epsilon; });
    if (hit != step.mean_gap.end()) {
      std::cout << ", observed " << (hit - step.mean_gap.begin());
    } else {
      std::cout << ", not reached in " << c.rounds;
    }
    std::cout << '\n';
  }
  return step.passed() && envelope.passed() ? kExitOk : kExitVerify;
}

int cmd_oracle(const Options& o) {
  const auto config = resolve(o);
  cefl::SimConfig probe = config;
  probe.rounds = 1;
  const auto fed = cefl::build_federation(probe);
  std::cout << "L = " << fmt(fed.constants.L) << '\n';
  std::cout << "mu = " << fmt(fed.constants.mu) << '\n';
  std::cout << "eta = " << fmt(fed.eta) << '\n';
  if (!fed.f_star) {
    // Rerun the oracle directly so its diagnostic reaches the user.
    const auto opt = cefl::optimal_value(fed.datasets, fed.loss);
    std::cout << "f_star = " << fmt(opt.f_star) << '\n';
    return kExitOk;
  }
  std::cout << "f_star = " << fmt(*fed.f_star) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Communication-efficient federated learning simulator"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file");
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--algo", o.algo, "cefl | fedavg-uniform | cefl-uniform");
    sub->add_option("--rounds", o.rounds, "number of rounds");
    sub->add_option("--epsilon", o.epsilon, "stop once the optimality gap is at most this");
  };

  auto* run = app.add_subcommand("run", "one simulation, CSV trace");
  add_common(run);
  run->add_option("--out", o.out, "CSV path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "seed sweep, one CSV per seed");
  add_common(sweep);
  sweep->add_option("--seeds", o.seeds, "number of seeds");
  sweep->add_option("--out", o.out, "output directory");

  auto* allocate = app.add_subcommand("allocate", "solve one allocation instance");
  allocate->add_option("--config", o.config, "instance file")->required();

  auto* verify = app.add_subcommand("verify", "empirical convergence-rate check");
  add_common(verify);
  verify->add_option("--seeds", o.seeds, "number of seeds");

  auto* oracle = app.add_subcommand("oracle", "print f*, L, mu and eta");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*allocate) return cmd_allocate(o);
    if (*verify) return cmd_verify(o);
    if (*oracle) return cmd_oracle(o);
  } catch (const cefl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cefl::OracleFailure& e) {
    std::cerr << "oracle failure: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
