#pragma once
/**
 * @file auction.hpp
 * @brief First- and second-price position auctions over adjusted offers.
 *
 * Ads compete on expected adjusted value V = sum(a_i * p_i). Slots are filled
 * greedily from the top: slot j goes to the remaining ad with the highest value
 * at slot j's probabilities. Under second price, the slot-j winner's per-event
 * prices are its own adjusted bids scaled by theta = V_next / V, where V_next
 * is the best remaining competitor's value at the same slot (or the reserve,
 * whichever is larger). Expected payment at the slot is then exactly V_next,
 * and r_i <= a_i for every event.
 */

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "uxcharge/adjust.hpp"
#include "uxcharge/types.hpp"

namespace uxcharge {

/// Slot count and, optionally, per-ad click probabilities by slot.
struct SlotModel {
  std::size_t slots = 1;
  /// ad_id -> click probability at slot 1..k. Ads not listed keep their own
  /// event probabilities at every slot.
  std::map<std::string, std::vector<double>> click_probs;
};

inline ValidationResult validate_slot_model(const SlotModel& model) {
  ValidationResult result;
  if (model.slots < 1) result.add("slot_count", "slot count must be >= 1");
  for (const auto& [ad, probs] : model.click_probs) {
    if (probs.size() != model.slots) {
      result.add("ctr_row_length", "click probabilities for '" + ad + "' must list " +
                                       std::to_string(model.slots) + " slots");
    }
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (!in_unit_interval(probs[j])) {
        result.add("probability_out_of_range", "click probability for '" + ad + "' at slot " +
                                                   std::to_string(j + 1) + " out of range");
      }
      if (j > 0 && probs[j] > probs[j - 1]) {
        result.add("ctr_not_monotone", "click probabilities for '" + ad + "' increase at slot " +
                                           std::to_string(j + 1));
      }
    }
  }
  return result;
}

/// Event probabilities of an ad at a slot (0-based). Click events take the
/// slot's click probability; Conversion events keep their conversion rate per
/// click; View and Custom events are unchanged.
[[nodiscard]] inline EventList events_at_slot(const AdjustedOffer& offer, const SlotModel& model, std::size_t slot) {
  auto it = model.click_probs.find(offer.ad_id);
  if (it == model.click_probs.end() || slot >= it->second.size()) return offer.events;

  const double slot_ctr = it->second[slot];
  const auto click = find_kind(offer.events, EventKind::Click);
  const double base_ctr = click ? offer.events[*click].probability : 0.0;

  EventList out = offer.events;
  for (auto& e : out) {
    if (e.kind == EventKind::Click) {
      e.probability = slot_ctr;
    } else if (e.kind == EventKind::Conversion && base_ctr > 0.0) {
      e.probability = std::min(1.0, e.probability * slot_ctr / base_ctr);
    }
  }
  return out;
}

namespace detail {

inline bool ranks_before(double value_a, const std::string& id_a, double value_b, const std::string& id_b) {
  if (value_a != value_b) return value_a > value_b;
  return id_a < id_b;
}

}  // namespace detail

/// Nonincreasing expected adjusted value; ties by ad_id.
[[nodiscard]] inline std::vector<RankedEntry> rank(std::span<const AdjustedOffer> offers) {
  std::vector<RankedEntry> out;
  out.reserve(offers.size());
  for (const auto& o : offers) out.push_back({o.ad_id, o.expected_value});
  std::sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return detail::ranks_before(a.expected_value, a.ad_id, b.expected_value, b.ad_id);
  });
  return out;
}

/// Runs a position auction. `reserve` is a floor on expected adjusted value.
[[nodiscard]] inline AuctionOutcome run_auction(std::span<const AdjustedOffer> offers, const SlotModel& slots,
                                                PricingRule rule, double reserve = 0.0) {
  if (offers.empty()) throw NoAuctionError("no offers entered into the auction");
  {
    std::set<std::string> ids;
    for (const auto& o : offers) {
      if (!ids.insert(o.ad_id).second) throw Error("duplicate ad id '" + o.ad_id + "' in auction");
    }
  }

  AuctionOutcome outcome;
  outcome.pricing_rule = rule;

  std::vector<const AdjustedOffer*> remaining;
  std::vector<AdjustedOffer> eligible;
  for (const auto& o : offers) {
    if (excluded_from_auction(o)) {
      outcome.excluded.push_back(o.ad_id);
    } else {
      eligible.push_back(o);
    }
  }
  outcome.ranked = rank(eligible);
  for (const auto& o : eligible) remaining.push_back(&o);

  for (std::size_t slot = 0; slot < slots.slots && !remaining.empty(); ++slot) {
    struct Candidate {
      const AdjustedOffer* offer;
      EventList events;
      double value;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(remaining.size());
    for (const auto* o : remaining) {
      EventList ev = events_at_slot(*o, slots, slot);
      const double v = expected_value(o->adjusted, ev);
      candidates.push_back({o, std::move(ev), v});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return detail::ranks_before(a.value, a.offer->ad_id, b.value, b.offer->ad_id);
    });

    const Candidate& top = candidates.front();
    if (top.value < reserve) break;

    const double competitor = candidates.size() > 1 ? candidates[1].value : reserve;
    const double next_value = std::max(competitor, reserve);

    double scale = 1.0;
    if (rule == PricingRule::SecondPrice) scale = top.value > 0.0 ? next_value / top.value : 0.0;

    std::vector<EventValues::Entry> prices;
    prices.reserve(top.offer->adjusted.size());
    for (const auto& a : top.offer->adjusted.entries()) prices.push_back({a.event_id, scale * a.amount});

    Winner w;
    w.ad_id = top.offer->ad_id;
    w.slot = slot + 1;
    w.slot_events = top.events;
    w.adjusted = top.offer->adjusted;
    w.prices = EventValues(std::move(prices));
    w.value = top.value;
    w.next_value = rule == PricingRule::SecondPrice ? next_value : top.value;
    w.scale = scale;
    outcome.winners.push_back(std::move(w));

    remaining.erase(std::find(remaining.begin(), remaining.end(), top.offer));
  }
  return outcome;
}

[[nodiscard]] inline AuctionOutcome run_first_price(std::span<const AdjustedOffer> offers, const SlotModel& slots,
                                                    double reserve = 0.0) {
  return run_auction(offers, slots, PricingRule::FirstPrice, reserve);
}

[[nodiscard]] inline AuctionOutcome run_second_price(std::span<const AdjustedOffer> offers, const SlotModel& slots,
                                                     double reserve = 0.0) {
  return run_auction(offers, slots, PricingRule::SecondPrice, reserve);
}

}  // namespace uxcharge
