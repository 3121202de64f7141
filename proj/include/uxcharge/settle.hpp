#pragma once
/**
 * @file settle.hpp
 * @brief Post-auction charging.
 *
 * settle_general charges sum((r_i + d_i) * e_i) over realized events.
 * settle_classic transcribes the five single-price-type charging rules
 * directly; it does not route through settle_general.
 */

#include <span>
#include <string>
#include <vector>

#include "uxcharge/types.hpp"

namespace uxcharge {

/// Itemized charge (r_i + d_i) * e_i for a winning ad.
[[nodiscard]] inline Settlement settle_general(std::string ad_id, const EventValues& prices, const EventValues& shifted,
                                               std::span<const int> realized) {
  if (!prices.keyed_like(shifted)) throw KeyingError("prices and shift plan cover different events");
  if (prices.size() != realized.size()) {
    throw KeyingError("realized outcome has " + std::to_string(realized.size()) + " entries, expected " +
                      std::to_string(prices.size()));
  }
  Settlement s;
  s.ad_id = std::move(ad_id);
  s.realized.assign(realized.begin(), realized.end());
  std::vector<EventValues::Entry> items;
  items.reserve(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (realized[i] != 0 && realized[i] != 1) throw Error("event indicator must be 0 or 1");
    const double amount = realized[i] == 1 ? prices[i] + shifted[i] : 0.0;
    items.push_back({prices.id(i), amount});
    s.total += amount;
  }
  s.line_items = EventValues(std::move(items));
  return s;
}

/// The five single-price-type charging rules.
enum class ClassicRule {
  CpcView,   // charge r + v/p on click
  CpmView,   // charge r + v on win
  CpmClick,  // charge r + c*p on win
  CpcBoth,   // charge r + c + v/p on click
  CpmBoth,   // charge r + v + c*p on win
};

[[nodiscard]] constexpr PriceType price_type_of(ClassicRule rule) noexcept {
  switch (rule) {
    case ClassicRule::CpcView:
    case ClassicRule::CpcBoth: return PriceType::CPC;
    default: return PriceType::CPM;
  }
}

struct ClassicCharge {
  double price = 0.0;         // r: per-click price for CPC, per-view price for CPM
  double view_charge = 0.0;   // v
  double click_charge = 0.0;  // c
  double click_prob = 0.0;    // p
};

/// Realized charge for a winning ad. CPC rules charge only on a click;
/// CPM rules charge at win time whether or not a click follows.
[[nodiscard]] inline double settle_classic(ClassicRule rule, const ClassicCharge& in, bool clicked) {
  const double r = in.price, v = in.view_charge, c = in.click_charge, p = in.click_prob;
  switch (rule) {
    case ClassicRule::CpcView:
      if (!(p > 0.0)) throw UndefinedChargeError("charge r + v/p undefined for p = 0");
      return clicked ? r + v / p : 0.0;
    case ClassicRule::CpcBoth:
      if (!(p > 0.0)) throw UndefinedChargeError("charge r + c + v/p undefined for p = 0");
      return clicked ? r + c + v / p : 0.0;
    case ClassicRule::CpmView: return r + v;
    case ClassicRule::CpmClick: return r + c * p;
    case ClassicRule::CpmBoth: return r + v + c * p;
  }
  return 0.0;
}

}  // namespace uxcharge
