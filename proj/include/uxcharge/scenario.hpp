#pragma once
/**
 * @file scenario.hpp
 * @brief End-to-end pipeline: feasibility, charge shifting, bid adjustment,
 *        auction, and expected/simulated payments for every winner.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uxcharge/adjust.hpp"
#include "uxcharge/auction.hpp"
#include "uxcharge/shift.hpp"
#include "uxcharge/sim.hpp"
#include "uxcharge/types.hpp"

namespace uxcharge {

inline constexpr int kFormatVersion = 1;

struct Scenario {
  std::vector<Offer> offers;
  /// One schedule per offer, keyed to that offer's events.
  std::vector<ChargeSchedule> charges;
  ShiftStrategy strategy;
  PricingRule pricing = PricingRule::SecondPrice;
  SlotModel slots;
  double reserve = 0.0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  OutcomeModel model;
  bool nonnegative_bids = false;
  unsigned threads = 1;
};

struct PaymentReport {
  std::size_t slot = 0;
  EventList slot_events;
  EventValues prices;
  double scale = 1.0;
  double next_value = 0.0;
  double expected_payment = 0.0;
  /// Absent when the event set is too large to enumerate.
  std::optional<double> enumerated_payment;
  MonteCarloSummary monte_carlo;
};

struct AdReport {
  std::string ad_id;
  bool feasible = false;
  double expected_offer_value = 0.0;
  double expected_charge = 0.0;
  /// Set when the ad did not enter the auction.
  std::optional<std::string> exclusion;
  std::optional<ShiftPlan> plan;
  std::optional<AdjustedOffer> adjusted;
  /// Set for auction winners.
  std::optional<PaymentReport> payment;
};

struct ScenarioReport {
  std::vector<AdReport> ads;
  /// Absent when no ad entered the auction.
  std::optional<AuctionOutcome> auction;

  [[nodiscard]] std::size_t auctions_run() const noexcept { return auction ? 1 : 0; }

  [[nodiscard]] const AdReport* find(std::string_view ad_id) const {
    for (const auto& a : ads) {
      if (a.ad_id == ad_id) return &a;
    }
    return nullptr;
  }
};

/// Itemized checks over offers, charges, strategy, slots, model and run settings.
inline ValidationResult validate_scenario(const Scenario& s) {
  ValidationResult result;
  if (s.charges.size() != s.offers.size()) {
    result.add("charge_count", "expected one charge schedule per offer");
  }
  std::set<std::string> ids;
  for (std::size_t k = 0; k < s.offers.size(); ++k) {
    const Offer& offer = s.offers[k];
    const std::string where = "offer '" + offer.ad_id + "'";
    if (!ids.insert(offer.ad_id).second) result.add("duplicate_ad_id", "duplicate ad id '" + offer.ad_id + "'");
    result.merge(validate_offer(offer), where);
    if (k < s.charges.size()) result.merge(validate_charges(s.charges[k], offer.events), where);
    result.merge(validate_model(offer.events, s.model), where);

    if (s.strategy.kind == ShiftKind::SingleEvent && !s.strategy.targets.empty()) {
      const auto idx = find_event(offer.events, s.strategy.targets.front());
      if (!idx) {
        result.add("unknown_shift_target", where + ": shift target '" + s.strategy.targets.front() + "' not in events");
      } else if (!(offer.events[*idx].probability > 0.0)) {
        result.add("infeasible_shift_target", where + ": shift target '" + s.strategy.targets.front() +
                                                  "' has zero probability");
      }
    }
    if (s.strategy.kind == ShiftKind::Proportional) {
      for (const auto& t : s.strategy.targets) {
        if (!find_event(offer.events, t)) {
          result.add("unknown_shift_target", where + ": chargeable event '" + t + "' not in events");
        }
      }
    }
  }
  if (s.strategy.kind == ShiftKind::SingleEvent && s.strategy.targets.size() != 1) {
    result.add("shift_strategy", "single-event strategy needs exactly one target");
  }
  result.merge(validate_slot_model(s.slots), "slots");
  for (const auto& [ad, _] : s.slots.click_probs) {
    if (!ids.contains(ad)) result.add("unknown_ad", "slots: click probabilities for unknown ad '" + ad + "'");
  }
  if (!std::isfinite(s.reserve) || s.reserve < 0.0) result.add("reserve", "reserve must be >= 0");
  if (s.trials < 1) result.add("trials", "trials must be >= 1");
  return result;
}

/// Feasibility, shift plan and adjusted bids for every offer, in input order.
/// Does not validate the scenario.
[[nodiscard]] inline std::vector<AdReport> prepare_ads(const Scenario& s) {
  std::vector<AdReport> ads;
  const PlanCheckOptions plan_check{s.nonnegative_bids, kTolerance};

  for (std::size_t k = 0; k < s.offers.size(); ++k) {
    const Offer& offer = s.offers[k];
    const ChargeSchedule& charges = s.charges[k];
    AdReport& ad = ads.emplace_back();
    ad.ad_id = offer.ad_id;
    ad.expected_offer_value = expected_value(offer.bids, offer.events);
    ad.expected_charge = total_expected_charge(charges, offer.events);
    ad.feasible = is_feasible(offer, charges);

    if (!ad.feasible) {
      ad.exclusion = "expected charge exceeds expected offer value";
      continue;
    }
    try {
      ad.plan = make_plan(s.strategy, offer, charges);
    } catch (const Error& e) {
      ad.exclusion = std::string("no shift plan: ") + e.what();
      continue;
    }
    if (auto check = validate_plan(*ad.plan, charges, offer, plan_check); !check.ok()) {
      ad.exclusion = "shift plan rejected: " + check.violations.front().message;
      continue;
    }
    ad.adjusted = adjust_general(offer, *ad.plan);
    if (excluded_from_auction(*ad.adjusted)) ad.exclusion = "negative expected adjusted value";
  }
  return ads;
}

/// Adjusted offers of the ads that enter the auction.
[[nodiscard]] inline std::vector<AdjustedOffer> entrants(std::span<const AdReport> ads) {
  std::vector<AdjustedOffer> out;
  for (const auto& ad : ads) {
    if (!ad.exclusion && ad.adjusted) out.push_back(*ad.adjusted);
  }
  return out;
}

/// Runs the full pipeline. Infeasible ads are reported as excluded; an invalid
/// scenario throws ValidationError.
[[nodiscard]] inline ScenarioReport run_scenario(const Scenario& s) {
  if (auto check = validate_scenario(s); !check.ok()) throw ValidationError(std::move(check));

  ScenarioReport report;
  report.ads = prepare_ads(s);
  const auto bidders = entrants(report.ads);
  if (bidders.empty()) return report;
  report.auction = run_auction(bidders, s.slots, s.pricing, s.reserve);

  for (std::size_t k = 0; k < report.ads.size(); ++k) {
    AdReport& ad = report.ads[k];
    const Winner* w = report.auction->winner(ad.ad_id);
    if (!w) continue;
    PaymentReport pay;
    pay.slot = w->slot;
    pay.slot_events = w->slot_events;
    pay.prices = w->prices;
    pay.scale = w->scale;
    pay.next_value = w->next_value;
    pay.expected_payment = expected_payment(w->prices, ad.plan->shifted, w->slot_events);
    if (w->slot_events.size() <= kMaxEnumeratedEvents) {
      pay.enumerated_payment = enumerate_expected_payment(w->prices, ad.plan->shifted, w->slot_events, s.model);
    }
    pay.monte_carlo = monte_carlo_payment(w->prices, ad.plan->shifted, w->slot_events, s.model,
                                          MonteCarloOptions{s.trials, s.seed, k, s.threads});
    ad.payment = std::move(pay);
  }
  return report;
}

}  // namespace uxcharge
