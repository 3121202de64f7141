#pragma once
/**
 * @file adjust.hpp
 * @brief Pre-auction bid adjustment for user-experience charges.
 *
 * The scalar forms cover the single-event price types directly (per-click
 * bid b with click probability p, per-view bid b, per-view charge v, per-click
 * charge c). They are deliberately independent of adjust_general so the two
 * can be cross-checked. Adjusted bids may be negative; exclusion is decided
 * by the caller.
 */

#include <span>

#include "uxcharge/types.hpp"

namespace uxcharge {

/// CPC bid with a per-view charge. Returns the per-view adjusted bid b*p - v.
[[nodiscard]] constexpr double adjust_cpc_view(double bid, double click_prob, double view_charge) noexcept {
  return bid * click_prob - view_charge;
}

/// CPM bid with a per-view charge: b - v.
[[nodiscard]] constexpr double adjust_cpm_view(double bid, double view_charge) noexcept {
  return bid - view_charge;
}

/// CPM bid with a per-click charge: b - c*p.
[[nodiscard]] constexpr double adjust_cpm_click(double bid, double click_prob, double click_charge) noexcept {
  return bid - click_charge * click_prob;
}

/// CPC bid with both charges: (b - c)*p - v, as a per-view bid.
[[nodiscard]] constexpr double adjust_cpc_both(double bid, double click_prob, double view_charge,
                                               double click_charge) noexcept {
  return (bid - click_charge) * click_prob - view_charge;
}

/// CPM bid with both charges: b - v - c*p.
[[nodiscard]] constexpr double adjust_cpm_both(double bid, double click_prob, double view_charge,
                                               double click_charge) noexcept {
  return bid - view_charge - click_charge * click_prob;
}

/// Per-click form of a per-view adjusted bid. Only defined for p > 0.
[[nodiscard]] inline double per_click_bid(double per_view_bid, double click_prob) {
  if (!(click_prob > 0.0)) throw UndefinedChargeError("per-click bid undefined for zero click probability");
  return per_view_bid / click_prob;
}

/// Sum of amount_i * prob_i over aligned sequences.
[[nodiscard]] inline double expected_value(std::span<const double> amounts, std::span<const double> probs) {
  if (amounts.size() != probs.size()) {
    throw KeyingError("expected_value: " + std::to_string(amounts.size()) + " amounts vs " +
                      std::to_string(probs.size()) + " probabilities");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < amounts.size(); ++i) sum += amounts[i] * probs[i];
  return sum;
}

[[nodiscard]] inline double expected_value(const EventValues& amounts, std::span<const EventSpec> events) {
  amounts.require_keyed_to(events, "expected_value amounts");
  return expected_value(amounts.amounts(), probabilities(events));
}

/// Builds an AdjustedOffer from already-adjusted bids.
[[nodiscard]] inline AdjustedOffer make_adjusted(std::string ad_id, EventList events, EventValues adjusted) {
  const double value = expected_value(adjusted, events);
  return AdjustedOffer{std::move(ad_id), std::move(events), std::move(adjusted), value};
}

/// a_i = b_i - d_i for every event, with the expected adjusted value.
[[nodiscard]] inline AdjustedOffer adjust_general(const Offer& offer, const ShiftPlan& plan) {
  offer.bids.require_keyed_to(offer.events, "offer bids");
  plan.shifted.require_keyed_to(offer.events, "shift plan");
  std::vector<EventValues::Entry> adjusted;
  adjusted.reserve(offer.events.size());
  for (std::size_t i = 0; i < offer.events.size(); ++i) {
    adjusted.push_back({offer.events[i].event_id, offer.bids[i] - plan.shifted[i]});
  }
  return make_adjusted(offer.ad_id, offer.events, EventValues(std::move(adjusted)));
}

/// An ad whose adjusted offer has negative expected value is kept out of the auction.
[[nodiscard]] inline bool excluded_from_auction(const AdjustedOffer& adjusted) noexcept {
  return adjusted.expected_value < 0.0;
}

}  // namespace uxcharge
