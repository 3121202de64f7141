#pragma once
// Fixtures and random instance generators shared by the test binaries.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "uxcharge/uxcharge.hpp"

namespace uxcharge::testing {

inline EventList view_click(double click_prob) {
  return {{"view", EventKind::View, 1.0}, {"click", EventKind::Click, click_prob}};
}

inline Offer cpc_offer(std::string id, double bid, double click_prob) {
  auto events = view_click(click_prob);
  return Offer{std::move(id), PriceType::CPC, events, EventValues{{"view", 0.0}, {"click", bid}}};
}

inline Offer cpm_offer(std::string id, double bid, double click_prob) {
  auto events = view_click(click_prob);
  return Offer{std::move(id), PriceType::CPM, events, EventValues{{"view", bid}, {"click", 0.0}}};
}

inline ChargeSchedule view_click_charges(double view_charge, double click_charge) {
  return ChargeSchedule{EventValues{{"view", view_charge}, {"click", click_charge}}};
}

/// |a - b| <= tol * max(1, |a|, |b|).
inline bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// A single-price-type rule expressed on the {view, click} event set: the
/// offer, the charges, the event the whole charge is shifted onto, and the
/// scalar closed form for the expected adjusted value.
struct ClassicCase {
  ClassicRule rule;
  double bid, click_prob, view_charge, click_charge;
  Offer offer;
  ChargeSchedule charges;
  std::string target;
  double closed_form;
};

inline ClassicCase classic_case(ClassicRule rule, double b, double p, double v, double c) {
  ClassicCase k{rule, b, p, v, c, {}, {}, {}, 0.0};
  switch (rule) {
    case ClassicRule::CpcView:
      k.offer = cpc_offer("ad", b, p);
      k.charges = view_click_charges(v, 0.0);
      k.click_charge = 0.0;
      k.target = "click";
      k.closed_form = adjust_cpc_view(b, p, v);
      break;
    case ClassicRule::CpmView:
      k.offer = cpm_offer("ad", b, p);
      k.charges = view_click_charges(v, 0.0);
      k.click_charge = 0.0;
      k.target = "view";
      k.closed_form = adjust_cpm_view(b, v);
      break;
    case ClassicRule::CpmClick:
      k.offer = cpm_offer("ad", b, p);
      k.charges = view_click_charges(0.0, c);
      k.view_charge = 0.0;
      k.target = "view";
      k.closed_form = adjust_cpm_click(b, p, c);
      break;
    case ClassicRule::CpcBoth:
      k.offer = cpc_offer("ad", b, p);
      k.charges = view_click_charges(v, c);
      k.target = "click";
      k.closed_form = adjust_cpc_both(b, p, v, c);
      break;
    case ClassicRule::CpmBoth:
      k.offer = cpm_offer("ad", b, p);
      k.charges = view_click_charges(v, c);
      k.target = "view";
      k.closed_form = adjust_cpm_both(b, p, v, c);
      break;
  }
  return k;
}

inline constexpr ClassicRule kClassicRules[] = {ClassicRule::CpcView, ClassicRule::CpmView, ClassicRule::CpmClick,
                                                ClassicRule::CpcBoth, ClassicRule::CpmBoth};

inline const char* name(ClassicRule rule) {
  switch (rule) {
    case ClassicRule::CpcView: return "cpc_view";
    case ClassicRule::CpmView: return "cpm_view";
    case ClassicRule::CpmClick: return "cpm_click";
    case ClassicRule::CpcBoth: return "cpc_both";
    case ClassicRule::CpmBoth: return "cpm_both";
  }
  return "?";
}

/// Random hybrid offer: View plus 1..(max_events-1) extra events.
struct HybridInstance {
  Offer offer;
  ChargeSchedule charges;
};

inline HybridInstance random_hybrid(std::mt19937_64& rng, std::size_t max_events = 5, std::string id = "ad") {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> extra(1, max_events - 1);
  const std::size_t n = 1 + extra(rng);

  EventList events{{"view", EventKind::View, 1.0}};
  double click_prob = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    EventSpec e;
    if (i == 1) {
      click_prob = 0.01 + 0.99 * unit(rng);
      e = {"click", EventKind::Click, click_prob};
    } else if (i == 2) {
      e = {"conversion", EventKind::Conversion, click_prob * unit(rng)};
    } else {
      e = {"custom" + std::to_string(i), EventKind::Custom, unit(rng)};
    }
    events.push_back(e);
  }
  std::vector<double> bids(n), charges(n);
  for (std::size_t i = 0; i < n; ++i) {
    bids[i] = unit(rng) < 0.3 ? 0.0 : unit(rng);
    charges[i] = unit(rng) < 0.4 ? 0.0 : 0.5 * unit(rng);
  }
  Offer offer{std::move(id), PriceType::Hybrid, events, EventValues::aligned(events, bids)};
  return {offer, ChargeSchedule{EventValues::aligned(events, charges)}};
}

}  // namespace uxcharge::testing
