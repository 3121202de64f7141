#pragma once
/**
 * @file types.hpp
 * @brief Domain types shared by the bid-adjustment, charge-shifting, auction,
 *        settlement and simulation layers.
 *
 * Money and probabilities are plain doubles. Per-event quantities (bids,
 * charges, shifted charges, prices) are carried as EventValues: an ordered list
 * of (event id, amount) pairs keyed to the event set of the offer they belong
 * to. Operations that combine per-event quantities check keying and throw
 * KeyingError on mismatch.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uxcharge {

/// Absolute tolerance for validation-time comparisons.
inline constexpr double kTolerance = 1e-9;

// ============================================================================
// Errors
// ============================================================================

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two per-event collections do not cover the same events in the same order.
class KeyingError : public Error {
 public:
  using Error::Error;
};

/// A single-event shift targets an event that can never occur.
class InfeasibleTargetError : public Error {
 public:
  using Error::Error;
};

/// Proportional shift over a set of events carrying zero expected bid.
class DegenerateDenominatorError : public Error {
 public:
  using Error::Error;
};

class NoAuctionError : public Error {
 public:
  using Error::Error;
};

/// Per-click charge requested for a zero click probability.
class UndefinedChargeError : public Error {
 public:
  using Error::Error;
};

class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

// ============================================================================
// Enumerations
// ============================================================================

enum class EventKind { View, Click, Conversion, Custom };
enum class PriceType { CPM, CPC, Hybrid };
enum class PricingRule { FirstPrice, SecondPrice };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::View: return "view";
    case EventKind::Click: return "click";
    case EventKind::Conversion: return "conversion";
    case EventKind::Custom: return "custom";
  }
  return "custom";
}

inline std::string_view to_string(PriceType type) {
  switch (type) {
    case PriceType::CPM: return "cpm";
    case PriceType::CPC: return "cpc";
    case PriceType::Hybrid: return "hybrid";
  }
  return "hybrid";
}

inline std::string_view to_string(PricingRule rule) {
  return rule == PricingRule::FirstPrice ? "first" : "second";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "view") return EventKind::View;
  if (s == "click") return EventKind::Click;
  if (s == "conversion") return EventKind::Conversion;
  if (s == "custom") return EventKind::Custom;
  return std::nullopt;
}

inline std::optional<PriceType> parse_price_type(std::string_view s) {
  if (s == "cpm") return PriceType::CPM;
  if (s == "cpc") return PriceType::CPC;
  if (s == "hybrid") return PriceType::Hybrid;
  return std::nullopt;
}

inline std::optional<PricingRule> parse_pricing_rule(std::string_view s) {
  if (s == "first") return PricingRule::FirstPrice;
  if (s == "second") return PricingRule::SecondPrice;
  return std::nullopt;
}

// ============================================================================
// Events
// ============================================================================

struct EventSpec {
  std::string event_id;
  EventKind kind = EventKind::Custom;
  double probability = 0.0;

  bool operator==(const EventSpec&) const = default;
};

using EventList = std::vector<EventSpec>;

/// Index of the first event of the given kind, if any.
inline std::optional<std::size_t> find_kind(std::span<const EventSpec> events, EventKind kind) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].kind == kind) return i;
  }
  return std::nullopt;
}

inline std::optional<std::size_t> find_event(std::span<const EventSpec> events,
                                             std::string_view event_id) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].event_id == event_id) return i;
  }
  return std::nullopt;
}

inline std::vector<double> probabilities(std::span<const EventSpec> events) {
  std::vector<double> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.probability);
  return out;
}

// ============================================================================
// EventValues
// ============================================================================

/// Ordered per-event amounts keyed by event id.
class EventValues {
 public:
  struct Entry {
    std::string event_id;
    double amount = 0.0;
    bool operator==(const Entry&) const = default;
  };

  EventValues() = default;
  EventValues(std::initializer_list<Entry> entries) : entries_(entries) {}
  explicit EventValues(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  /// Values aligned with an event list.
  static EventValues aligned(std::span<const EventSpec> events, std::span<const double> amounts) {
    if (events.size() != amounts.size()) {
      throw KeyingError("expected " + std::to_string(events.size()) + " per-event values, got " +
                        std::to_string(amounts.size()));
    }
    std::vector<Entry> entries;
    entries.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      entries.push_back({events[i].event_id, amounts[i]});
    }
    return EventValues(std::move(entries));
  }

  static EventValues zeros(std::span<const EventSpec> events) {
    std::vector<double> z(events.size(), 0.0);
    return aligned(events, z);
  }

  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] const Entry& entry(std::size_t i) const { return entries_.at(i); }
  [[nodiscard]] const std::string& id(std::size_t i) const { return entries_.at(i).event_id; }
  [[nodiscard]] double operator[](std::size_t i) const { return entries_[i].amount; }
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

  [[nodiscard]] std::optional<double> find(std::string_view event_id) const {
    for (const auto& e : entries_) {
      if (e.event_id == event_id) return e.amount;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::vector<double> amounts() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.amount);
    return out;
  }

  /// True when ids match the event list one-to-one and in order.
  [[nodiscard]] bool keyed_to(std::span<const EventSpec> events) const {
    if (events.size() != entries_.size()) return false;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].event_id != entries_[i].event_id) return false;
    }
    return true;
  }

  [[nodiscard]] bool keyed_like(const EventValues& other) const {
    if (other.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (id(i) != other.id(i)) return false;
    }
    return true;
  }

  void require_keyed_to(std::span<const EventSpec> events, std::string_view what) const {
    if (!keyed_to(events)) {
      throw KeyingError(std::string(what) + " is not keyed to the event set");
    }
  }

  bool operator==(const EventValues&) const = default;

 private:
  std::vector<Entry> entries_;
};

// ============================================================================
// Offers, charges, plans
// ============================================================================

/// An advertiser's per-event bids b_i.
struct Offer {
  std::string ad_id;
  PriceType price_type = PriceType::Hybrid;
  EventList events;
  EventValues bids;

  bool operator==(const Offer&) const = default;
};

/// Per-event user-experience charges c_i.
struct ChargeSchedule {
  EventValues charges;

  bool operator==(const ChargeSchedule&) const = default;
};

enum class ShiftKind { Identity, SingleEvent, Proportional };

struct ShiftStrategy {
  ShiftKind kind = ShiftKind::Identity;
  /// SingleEvent: the receiving event. Proportional: the chargeable set
  /// (empty means every event with positive expected bid).
  std::vector<std::string> targets;

  static ShiftStrategy identity() { return {}; }
  static ShiftStrategy single(std::string target) { return {ShiftKind::SingleEvent, {std::move(target)}}; }
  static ShiftStrategy proportional(std::vector<std::string> chargeable = {}) {
    return {ShiftKind::Proportional, std::move(chargeable)};
  }

  bool operator==(const ShiftStrategy&) const = default;
};

/// "identity", "single:<event>", "proportional" or "proportional:<e1>,<e2>".
inline std::string to_string(const ShiftStrategy& s) {
  switch (s.kind) {
    case ShiftKind::Identity: return "identity";
    case ShiftKind::SingleEvent: return "single:" + (s.targets.empty() ? std::string() : s.targets[0]);
    case ShiftKind::Proportional: {
      std::string out = "proportional";
      for (std::size_t i = 0; i < s.targets.size(); ++i) {
        out += (i == 0 ? ":" : ",");
        out += s.targets[i];
      }
      return out;
    }
  }
  return "identity";
}

inline std::optional<ShiftStrategy> parse_shift_strategy(std::string_view s) {
  if (s == "identity") return ShiftStrategy::identity();
  if (s.starts_with("single:") && s.size() > 7) return ShiftStrategy::single(std::string(s.substr(7)));
  if (s == "proportional") return ShiftStrategy::proportional();
  if (s.starts_with("proportional:") && s.size() > 13) {
    std::vector<std::string> ids;
    std::string_view rest = s.substr(13);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto token = rest.substr(0, comma);
      if (token.empty()) return std::nullopt;
      ids.emplace_back(token);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
      if (rest.empty()) return std::nullopt;
    }
    return ShiftStrategy::proportional(std::move(ids));
  }
  return std::nullopt;
}

/// Redistributed charges d_i.
struct ShiftPlan {
  EventValues shifted;
  ShiftStrategy strategy;

  bool operator==(const ShiftPlan&) const = default;
};

/// Bids entered into the auction, a_i = b_i - d_i, with their expected value.
struct AdjustedOffer {
  std::string ad_id;
  EventList events;
  EventValues adjusted;
  double expected_value = 0.0;
};

// ============================================================================
// Auction and settlement records
// ============================================================================

struct RankedEntry {
  std::string ad_id;
  double expected_value = 0.0;
};

struct Winner {
  std::string ad_id;
  std::size_t slot = 0;  // 1-based
  /// Event probabilities at the won slot.
  EventList slot_events;
  /// Adjusted bids the ad entered with.
  EventValues adjusted;
  /// Per-event auction prices r_i.
  EventValues prices;
  /// Own expected adjusted value at the slot.
  double value = 0.0;
  /// Competing value (runner-up or reserve) that set the price.
  double next_value = 0.0;
  /// Price scale; prices = scale * adjusted.
  double scale = 1.0;
};

struct AuctionOutcome {
  PricingRule pricing_rule = PricingRule::SecondPrice;
  std::vector<RankedEntry> ranked;
  std::vector<Winner> winners;
  /// Ads removed before ranking (negative expected adjusted value).
  std::vector<std::string> excluded;

  [[nodiscard]] const Winner* winner(std::string_view ad_id) const {
    for (const auto& w : winners) {
      if (w.ad_id == ad_id) return &w;
    }
    return nullptr;
  }
};

struct Settlement {
  std::string ad_id;
  std::vector<int> realized;
  EventValues line_items;
  double total = 0.0;
};

// ============================================================================
// Validation
// ============================================================================

struct Violation {
  std::string code;
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  explicit operator bool() const noexcept { return ok(); }

  [[nodiscard]] bool has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
  }

  void add(std::string code, std::string message) {
    violations.push_back({std::move(code), std::move(message)});
  }

  void merge(ValidationResult other, std::string_view prefix = {}) {
    for (auto& v : other.violations) {
      if (!prefix.empty()) v.message = std::string(prefix) + ": " + v.message;
      violations.push_back(std::move(v));
    }
  }
};

/// Carries every violation found while validating an input.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationResult result)
      : Error(result.violations.empty() ? "validation failed" : result.violations.front().message),
        result_(std::move(result)) {}

  [[nodiscard]] const ValidationResult& result() const noexcept { return result_; }

 private:
  ValidationResult result_;
};

inline bool in_unit_interval(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

/// Event-set checks: unique ids, probabilities in [0,1], exactly one View with p=1.
inline ValidationResult validate_events(std::span<const EventSpec> events) {
  ValidationResult result;
  std::set<std::string> seen;
  std::size_t views = 0;
  for (const auto& e : events) {
    if (e.event_id.empty()) result.add("empty_event_id", "event id must not be empty");
    if (!seen.insert(e.event_id).second) {
      result.add("duplicate_event_id", "duplicate event id '" + e.event_id + "'");
    }
    if (!in_unit_interval(e.probability)) {
      result.add("probability_out_of_range",
                 "probability out of range for event '" + e.event_id + "': " + std::to_string(e.probability));
    }
    if (e.kind == EventKind::View) {
      ++views;
      if (e.probability != 1.0) {
        result.add("view_probability", "View event must have p=1 (event '" + e.event_id + "')");
      }
    }
  }
  if (views == 0) result.add("missing_view_event", "event set has no View event");
  if (views > 1) result.add("multiple_view_events", "event set has more than one View event");
  return result;
}

/// Accepts iff every Offer invariant holds; reports every violation.
inline ValidationResult validate_offer(const Offer& offer) {
  ValidationResult result = validate_events(offer.events);
  if (offer.ad_id.empty()) result.add("empty_ad_id", "ad id must not be empty");

  for (const auto& e : offer.events) {
    if (!offer.bids.find(e.event_id)) {
      result.add("missing_bid", "no bid for event '" + e.event_id + "'");
    }
  }
  for (const auto& b : offer.bids.entries()) {
    auto idx = find_event(offer.events, b.event_id);
    if (!idx) {
      result.add("unknown_event", "bid on unknown event '" + b.event_id + "'");
      continue;
    }
    if (!std::isfinite(b.amount) || b.amount < 0.0) {
      result.add("negative_bid", "bid on event '" + b.event_id + "' must be >= 0");
    }
    const EventKind kind = offer.events[*idx].kind;
    if (b.amount != 0.0) {
      if (offer.price_type == PriceType::CPM && kind != EventKind::View) {
        result.add("bid_outside_price_type", "CPM offer bids on non-View event '" + b.event_id + "'");
      }
      if (offer.price_type == PriceType::CPC && kind != EventKind::Click) {
        result.add("bid_outside_price_type", "CPC offer bids on non-Click event '" + b.event_id + "'");
      }
    }
  }
  if (result.ok() && !offer.bids.keyed_to(offer.events)) {
    result.add("bid_order", "bids must be listed in event order");
  }
  return result;
}

inline ValidationResult validate_charges(const ChargeSchedule& charges, std::span<const EventSpec> events) {
  ValidationResult result;
  if (!charges.charges.keyed_to(events)) {
    result.add("charge_keying", "charges are not keyed to the offer's event set");
  }
  for (const auto& c : charges.charges.entries()) {
    if (!std::isfinite(c.amount) || c.amount < 0.0) {
      result.add("negative_charge", "charge on event '" + c.event_id + "' must be >= 0");
    }
  }
  return result;
}

/// Every non-View event implies View; Conversion implies Click when the set has a Click.
inline bool funnel_consistent(std::span<const EventSpec> events, std::span<const int> realized) {
  if (events.size() != realized.size()) return false;
  const auto view = find_kind(events, EventKind::View);
  const bool has_click = find_kind(events, EventKind::Click).has_value();
  bool any_click = false;
  const bool viewed = view && realized[*view] == 1;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].kind == EventKind::Click && realized[i] == 1) any_click = true;
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (realized[i] != 1) continue;
    if (events[i].kind != EventKind::View && !viewed) return false;
    if (events[i].kind == EventKind::Conversion && has_click && !any_click) return false;
  }
  return true;
}

}  // namespace uxcharge
