// uxcharge: adjust bids for user-experience charges, run auctions over the
// adjusted offers, and simulate the resulting payments.
//
//   uxcharge adjust   <scenario.json> [--strategy S] [--nonnegative-bids] [-o out.json]
//   uxcharge auction  <scenario.json> [--pricing first|second] [--slots k] [--reserve x] [-o out.json]
//   uxcharge simulate <scenario.json> [--trials N] [--seed S] [--model independent|funnel]
//                                     [--strategy S] [--csv summary.csv] [-o out.json]
//
// Exit codes: 0 success, 1 invalid input, 2 I/O failure. Failures print one
// JSON diagnostic record on stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "uxcharge/io.hpp"
#include "uxcharge/uxcharge.hpp"

namespace {

using uxcharge::io::Json;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct IoFailure {
  std::string message;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("uxcharge");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("UXCHARGE_LOG")) {
    const std::string l = level;
    if (l == "error") spdlog::set_level(spdlog::level::err);
    else if (l == "warn") spdlog::set_level(spdlog::level::warn);
    else if (l == "info") spdlog::set_level(spdlog::level::info);
    else if (l == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring unknown UXCHARGE_LOG level '{}'", l);
  }
}

void print_diagnostic(const std::string& kind, const Json& detail) {
  Json record{{"error", kind}};
  for (auto it = detail.begin(); it != detail.end(); ++it) record[it.key()] = it.value();
  std::cerr << record.dump() << "\n";
}

int validation_failure(const uxcharge::ValidationResult& result) {
  print_diagnostic("validation", Json{{"violations", uxcharge::io::to_json(result)}});
  return kExitValidation;
}

int validation_failure(const std::string& code, const std::string& message) {
  uxcharge::ValidationResult result;
  result.add(code, message);
  return validation_failure(result);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure{"cannot open '" + path + "' for reading"};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoFailure{"error reading '" + path + "'"};
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoFailure{"error writing to stdout"};
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure{"cannot open '" + path + "' for writing"};
  out << text;
  out.close();
  if (!out) throw IoFailure{"error writing '" + path + "'"};
}

struct CommonOptions {
  std::string input;
  std::string output;
  std::optional<std::string> strategy;
  bool nonnegative_bids = false;
};

struct AuctionOptions {
  std::optional<std::string> pricing;
  std::optional<std::size_t> slots;
  std::optional<double> reserve;
};

struct SimulateOptions {
  std::optional<long long> trials;
  std::optional<unsigned long long> seed;
  std::optional<std::string> model;
  std::optional<unsigned> threads;
  std::string csv;
};

/// Loads the scenario and applies command-line overrides.
uxcharge::io::ScenarioFile load(const CommonOptions& common, const AuctionOptions& auction,
                                const SimulateOptions& sim) {
  auto file = uxcharge::io::parse_scenario(read_file(common.input));
  auto& s = file.scenario;
  uxcharge::ValidationResult errors;

  if (common.strategy) {
    if (auto parsed = uxcharge::parse_shift_strategy(*common.strategy)) s.strategy = *parsed;
    else errors.add("strategy", "--strategy must be identity, single:<event> or proportional[:events]");
  }
  if (common.nonnegative_bids) s.nonnegative_bids = true;
  if (auction.pricing) {
    if (auto parsed = uxcharge::parse_pricing_rule(*auction.pricing)) s.pricing = *parsed;
    else errors.add("pricing", "--pricing must be first or second");
  }
  if (auction.slots) s.slots.slots = *auction.slots;
  if (auction.reserve) s.reserve = *auction.reserve;
  if (sim.trials) {
    if (*sim.trials < 1) errors.add("trials", "trials must be >= 1");
    else s.trials = static_cast<std::uint64_t>(*sim.trials);
  }
  if (sim.seed) s.seed = *sim.seed;
  if (sim.model) {
    if (auto parsed = uxcharge::parse_dependence(*sim.model)) s.model.dependence = *parsed;
    else errors.add("model", "--model must be independent or funnel");
  }
  if (sim.threads) s.threads = std::max(1U, *sim.threads);

  if (!errors.ok()) throw uxcharge::ValidationError(std::move(errors));
  if (auto check = uxcharge::validate_scenario(s); !check.ok()) throw uxcharge::ValidationError(std::move(check));
  spdlog::info("loaded {} offers and {} adjusted offers from {}", s.offers.size(), file.adjusted_offers.size(),
               common.input);
  return file;
}

int cmd_adjust(const CommonOptions& common) {
  auto file = load(common, {}, {});
  const auto& s = file.scenario;
  uxcharge::ScenarioReport report;
  report.ads = uxcharge::prepare_ads(s);
  for (const auto& ad : report.ads) {
    if (ad.exclusion) spdlog::info("ad '{}' excluded: {}", ad.ad_id, *ad.exclusion);
  }
  write_output(common.output, uxcharge::io::dump_canonical(uxcharge::io::adjust_document(s, report)));
  return 0;
}

int cmd_auction(const CommonOptions& common, const AuctionOptions& auction) {
  auto file = load(common, auction, {});
  const auto& s = file.scenario;
  const auto ads = uxcharge::prepare_ads(s);
  auto bidders = uxcharge::entrants(ads);
  bidders.insert(bidders.end(), file.adjusted_offers.begin(), file.adjusted_offers.end());

  Json excluded = Json::array();
  for (const auto& ad : ads) {
    if (ad.exclusion) excluded.push_back(Json{{"ad_id", ad.ad_id}, {"reason", *ad.exclusion}});
  }

  Json doc{{"format_version", uxcharge::kFormatVersion}, {"command", "auction"}};
  if (bidders.empty()) {
    doc["auction"] = nullptr;
  } else {
    const auto outcome = uxcharge::run_auction(bidders, s.slots, s.pricing, s.reserve);
    doc["auction"] = uxcharge::io::auction_json(outcome, s.slots, s.reserve);
    for (const auto& id : outcome.excluded) {
      excluded.push_back(Json{{"ad_id", id}, {"reason", "negative expected adjusted value"}});
    }
  }
  doc["excluded"] = std::move(excluded);
  write_output(common.output, uxcharge::io::dump_canonical(doc));
  return 0;
}

int cmd_simulate(const CommonOptions& common, const AuctionOptions& auction, const SimulateOptions& sim) {
  auto file = load(common, auction, sim);
  if (!file.adjusted_offers.empty()) {
    return validation_failure("adjusted_offers", "simulate needs raw offers and charges, not adjusted offers");
  }
  const auto& s = file.scenario;
  const auto report = uxcharge::run_scenario(s);
  spdlog::debug("simulated {} ads with {} trials each", report.ads.size(), s.trials);
  write_output(common.output, uxcharge::io::dump_canonical(uxcharge::io::simulate_document(s, report)));
  if (!sim.csv.empty()) write_output(sim.csv, uxcharge::io::summary_csv(report));
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("input", common.input, "Scenario JSON file")->required();
  cmd->add_option("-o,--output", common.output, "Write the report here instead of stdout");
  cmd->add_option("--strategy", common.strategy, "Charge shift: identity, single:EVENT, proportional[:E1,E2]");
  cmd->add_flag("--nonnegative-bids", common.nonnegative_bids, "Require shifted charges d_i <= b_i");
}

void add_auction(CLI::App* cmd, AuctionOptions& auction) {
  cmd->add_option("--pricing", auction.pricing, "Pricing rule: first or second");
  cmd->add_option("--slots", auction.slots, "Number of slots")->check(CLI::PositiveNumber);
  cmd->add_option("--reserve", auction.reserve, "Reserve on expected adjusted value")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Collect user-experience charges in ad auctions"};
  app.require_subcommand(1);

  CommonOptions common;
  AuctionOptions auction;
  SimulateOptions sim;

  auto* adjust = app.add_subcommand("adjust", "Shift charges and compute adjusted bids");
  add_common(adjust, common);

  auto* run = app.add_subcommand("auction", "Run the auction over adjusted offers");
  add_common(run, common);
  add_auction(run, auction);

  auto* simulate = app.add_subcommand("simulate", "Full pipeline with expected and simulated payments");
  add_common(simulate, common);
  add_auction(simulate, auction);
  simulate->add_option("--trials", sim.trials, "Monte Carlo trials per winner");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--model", sim.model, "Event dependence: independent or funnel");
  simulate->add_option("--threads", sim.threads, "Worker threads for Monte Carlo");
  simulate->add_option("--csv", sim.csv, "Also write a CSV summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return validation_failure("usage", e.what());
  }

  try {
    if (adjust->parsed()) return cmd_adjust(common);
    if (run->parsed()) return cmd_auction(common, auction);
    return cmd_simulate(common, auction, sim);
  } catch (const IoFailure& e) {
    print_diagnostic("io", Json{{"message", e.message}});
    return kExitIo;
  } catch (const uxcharge::ValidationError& e) {
    return validation_failure(e.result());
  } catch (const uxcharge::Error& e) {
    return validation_failure("invalid_input", e.what());
  }
}
