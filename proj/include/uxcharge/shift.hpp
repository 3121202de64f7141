#pragma once
/**
 * @file shift.hpp
 * @brief Charge-shift plans.
 *
 * A plan replaces the charges c_i by charges d_i with the same expected total,
 * sum(d_i * p_i) == sum(c_i * p_i). Moving charge onto events the advertiser
 * actually pays for keeps both the expected adjusted value and the expected
 * payment of the ad unchanged.
 *
 * Strategies:
 *   - identity:     d = c
 *   - single-event: the whole expected charge goes to one event, d_t = E / p_t
 *   - proportional: d_i = E * b_i / sum_{j in S} b_j p_j over a chargeable set S,
 *                   which satisfies d_i <= b_i exactly when E <= sum_S b_j p_j
 */

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uxcharge/adjust.hpp"
#include "uxcharge/types.hpp"

namespace uxcharge {

/// E = sum(c_i * p_i).
[[nodiscard]] inline double total_expected_charge(const ChargeSchedule& charges, std::span<const EventSpec> events) {
  charges.charges.require_keyed_to(events, "charge schedule");
  return expected_value(charges.charges.amounts(), probabilities(events));
}

/// Expected offer value covers the expected charge (within kTolerance).
/// False means the ad should be kept out of the auction entirely.
[[nodiscard]] inline bool is_feasible(const Offer& offer, const ChargeSchedule& charges) {
  const double offer_value = expected_value(offer.bids, offer.events);
  return total_expected_charge(charges, offer.events) <= offer_value + kTolerance;
}

[[nodiscard]] inline ShiftPlan shift_identity(const ChargeSchedule& charges) {
  return ShiftPlan{charges.charges, ShiftStrategy::identity()};
}

/// Moves the entire expected charge onto `target`.
[[nodiscard]] inline ShiftPlan shift_single_event(const ChargeSchedule& charges, std::span<const EventSpec> events,
                                                  const std::string& target) {
  const double total = total_expected_charge(charges, events);
  const auto idx = find_event(events, target);
  if (!idx) throw KeyingError("shift target '" + target + "' is not in the event set");
  const double p = events[*idx].probability;
  if (!(p > 0.0)) throw InfeasibleTargetError("shift target '" + target + "' has zero probability");

  std::vector<double> shifted(events.size(), 0.0);
  shifted[*idx] = total / p;
  return ShiftPlan{EventValues::aligned(events, shifted), ShiftStrategy::single(target)};
}

/// Spreads the expected charge over `chargeable` in proportion to bids.
/// An empty set means every event with b_i * p_i > 0. Events with p_i = 0
/// never receive charge.
[[nodiscard]] inline ShiftPlan shift_proportional(const ChargeSchedule& charges, const Offer& offer,
                                                  const std::vector<std::string>& chargeable = {}) {
  offer.bids.require_keyed_to(offer.events, "offer bids");
  const double total = total_expected_charge(charges, offer.events);
  const auto& events = offer.events;

  std::vector<bool> in_set(events.size(), chargeable.empty());
  for (const auto& id : chargeable) {
    auto idx = find_event(events, id);
    if (!idx) throw KeyingError("chargeable event '" + id + "' is not in the event set");
    in_set[*idx] = true;
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!(events[i].probability > 0.0) || !(offer.bids[i] > 0.0)) in_set[i] = false;
  }

  double denominator = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (in_set[i]) denominator += offer.bids[i] * events[i].probability;
  }

  std::vector<double> shifted(events.size(), 0.0);
  if (total == 0.0) {
    return ShiftPlan{EventValues::aligned(events, shifted), ShiftStrategy::proportional(chargeable)};
  }
  if (!(denominator > 0.0)) {
    throw DegenerateDenominatorError("chargeable events of ad '" + offer.ad_id + "' carry zero expected bid");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (in_set[i]) shifted[i] = total * offer.bids[i] / denominator;
  }
  return ShiftPlan{EventValues::aligned(events, shifted), ShiftStrategy::proportional(chargeable)};
}

/// Builds the plan for a named strategy.
[[nodiscard]] inline ShiftPlan make_plan(const ShiftStrategy& strategy, const Offer& offer,
                                         const ChargeSchedule& charges) {
  switch (strategy.kind) {
    case ShiftKind::Identity:
      charges.charges.require_keyed_to(offer.events, "charge schedule");
      return shift_identity(charges);
    case ShiftKind::SingleEvent:
      if (strategy.targets.size() != 1) throw Error("single-event strategy needs exactly one target");
      return shift_single_event(charges, offer.events, strategy.targets.front());
    case ShiftKind::Proportional:
      return shift_proportional(charges, offer, strategy.targets);
  }
  throw Error("unknown shift strategy");
}

/// A plan with d_i <= b_i for all i, or nullopt when none exists
/// (expected charge exceeds expected offer value).
[[nodiscard]] inline std::optional<ShiftPlan> nonnegative_plan(const Offer& offer, const ChargeSchedule& charges) {
  if (!is_feasible(offer, charges)) return std::nullopt;
  if (total_expected_charge(charges, offer.events) <= 0.0) {
    return ShiftPlan{EventValues::zeros(offer.events), ShiftStrategy::proportional()};
  }
  return shift_proportional(charges, offer);
}

struct PlanCheckOptions {
  /// Enforce d_i <= b_i so every adjusted bid stays nonnegative.
  bool nonnegative_bids = false;
  double tolerance = kTolerance;
};

/// Checks the expected-charge identity and, optionally, d_i <= b_i.
[[nodiscard]] inline ValidationResult validate_plan(const ShiftPlan& plan, const ChargeSchedule& charges,
                                                    const Offer& offer, PlanCheckOptions options = {}) {
  ValidationResult result;
  if (!plan.shifted.keyed_to(offer.events)) {
    result.add("plan_keying", "shift plan is not keyed to the offer's event set");
    return result;
  }
  if (!charges.charges.keyed_to(offer.events)) {
    result.add("charge_keying", "charges are not keyed to the offer's event set");
    return result;
  }
  for (const auto& d : plan.shifted.entries()) {
    if (!std::isfinite(d.amount)) result.add("non_finite_charge", "shifted charge on '" + d.event_id + "' is not finite");
  }
  const auto probs = probabilities(offer.events);
  const double shifted_total = expected_value(plan.shifted.amounts(), probs);
  const double charge_total = expected_value(charges.charges.amounts(), probs);
  if (!(std::abs(shifted_total - charge_total) <= options.tolerance)) {
    result.add("expected_charge_mismatch", "expected shifted charge " + std::to_string(shifted_total) +
                                               " != expected charge " + std::to_string(charge_total));
  }
  if (options.nonnegative_bids) {
    for (std::size_t i = 0; i < offer.events.size(); ++i) {
      if (plan.shifted[i] > offer.bids[i] + options.tolerance) {
        result.add("shift_exceeds_bid", "shifted charge on '" + offer.events[i].event_id + "' (" +
                                            std::to_string(plan.shifted[i]) + ") exceeds bid (" +
                                            std::to_string(offer.bids[i]) + ")");
      }
    }
  }
  return result;
}

}  // namespace uxcharge
