#pragma once
/**
 * @file io.hpp
 * @brief JSON scenario files and report documents.
 *
 * Scenario file (format_version 1):
 *
 *   {
 *     "format_version": 1,
 *     "events":  [{"id": "view", "kind": "view", "prob": 1.0}, ...],   default event set
 *     "charges": {"view": 0.05},                                       default charges
 *     "offers": [
 *       {"ad_id": "A", "price_type": "cpc", "bids": {"click": 2.0},
 *        "events": [...], "charges": {...}}                            per-offer overrides
 *     ],
 *     "adjusted_offers": [{"ad_id": "X", "events": [...], "adjusted": {...}}],
 *                                                                      (or an `adjust` output document)
 *     "strategy": "identity" | "single:<event>" | "proportional[:e1,e2]",
 *     "pricing": "first" | "second",
 *     "slots": {"k": 1, "ctr_matrix": {"A": [0.1, 0.05]}},
 *     "reserve": 0.0,
 *     "trials": 10000, "seed": 0, "model": "independent" | "funnel",
 *     "nonnegative_bids": false
 *   }
 *
 * Bids and charges omitted for an event default to 0. Reports are written with
 * keys in insertion order and every floating-point number printed with 17
 * significant digits, so identical inputs give byte-identical output.
 */

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "uxcharge/auction.hpp"
#include "uxcharge/scenario.hpp"
#include "uxcharge/types.hpp"

namespace uxcharge::io {

using Json = nlohmann::ordered_json;

// ============================================================================
// Canonical output
// ============================================================================

inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline void write(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) os << ",\n";
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float: os << format_number(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

}  // namespace detail

/// Pretty-printed JSON with 17-significant-digit floats and a trailing newline.
inline std::string dump_canonical(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write(os, j, indent, 0);
  os << "\n";
  return os.str();
}

// ============================================================================
// Domain values <-> JSON
// ============================================================================

inline Json to_json(const EventSpec& e) {
  return Json{{"id", e.event_id}, {"kind", std::string(to_string(e.kind))}, {"prob", e.probability}};
}

inline Json to_json(std::span<const EventSpec> events) {
  Json arr = Json::array();
  for (const auto& e : events) arr.push_back(to_json(e));
  return arr;
}

inline Json to_json(const EventValues& values) {
  Json obj = Json::object();
  for (const auto& e : values.entries()) obj[e.event_id] = e.amount;
  return obj;
}

inline Json to_json(const Offer& offer) {
  return Json{{"ad_id", offer.ad_id},
              {"price_type", std::string(to_string(offer.price_type))},
              {"events", to_json(offer.events)},
              {"bids", to_json(offer.bids)}};
}

inline Json to_json(const ShiftPlan& plan) {
  return Json{{"strategy", to_string(plan.strategy)}, {"shifted", to_json(plan.shifted)}};
}

namespace detail {

inline const Json* member(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

class Reader {
 public:
  ValidationResult result;

  double number(const Json& j, const std::string& where) {
    if (!j.is_number()) {
      result.add("type", where + " must be a number");
      return 0.0;
    }
    return j.get<double>();
  }

  std::string string(const Json& j, const std::string& where) {
    if (!j.is_string()) {
      result.add("type", where + " must be a string");
      return {};
    }
    return j.get<std::string>();
  }

  std::uint64_t count(const Json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    result.add("type", where + " must be a nonnegative integer");
    return 0;
  }

  EventList events(const Json& j, const std::string& where) {
    EventList out;
    if (!j.is_array()) {
      result.add("type", where + " must be an array");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      const Json& e = j[i];
      const std::string at = where + "[" + std::to_string(i) + "]";
      if (!e.is_object()) {
        result.add("type", at + " must be an object");
        continue;
      }
      EventSpec spec;
      if (auto* id = member(e, "id")) spec.event_id = string(*id, at + ".id");
      else result.add("missing_field", at + ".id is required");
      if (auto* kind = member(e, "kind")) {
        auto parsed = parse_event_kind(string(*kind, at + ".kind"));
        if (parsed) spec.kind = *parsed;
        else result.add("event_kind", at + ".kind must be view, click, conversion or custom");
      } else {
        result.add("missing_field", at + ".kind is required");
      }
      if (auto* p = member(e, "prob")) spec.probability = number(*p, at + ".prob");
      else result.add("missing_field", at + ".prob is required");
      out.push_back(std::move(spec));
    }
    return out;
  }

  /// Map {event_id: amount} aligned to events; omitted events get 0.
  EventValues values(const Json* j, std::span<const EventSpec> events, const std::string& where) {
    std::vector<double> amounts(events.size(), 0.0);
    if (j) {
      if (!j->is_object()) {
        result.add("type", where + " must be an object");
      } else {
        for (auto it = j->begin(); it != j->end(); ++it) {
          auto idx = find_event(events, it.key());
          if (!idx) {
            result.add("unknown_event", where + " names unknown event '" + it.key() + "'");
            continue;
          }
          amounts[*idx] = number(it.value(), where + "." + it.key());
        }
      }
    }
    return EventValues::aligned(events, amounts);
  }
};

}  // namespace detail

/// Parses an offer object; `default_events` is used when it has no "events".
inline Offer offer_from_json(const Json& j, const EventList& default_events, ValidationResult& errors,
                             const std::string& where = "offer") {
  detail::Reader r;
  Offer offer;
  if (!j.is_object()) {
    errors.add("type", where + " must be an object");
    return offer;
  }
  if (auto* id = detail::member(j, "ad_id")) offer.ad_id = r.string(*id, where + ".ad_id");
  else r.result.add("missing_field", where + ".ad_id is required");
  if (auto* pt = detail::member(j, "price_type")) {
    auto parsed = parse_price_type(r.string(*pt, where + ".price_type"));
    if (parsed) offer.price_type = *parsed;
    else r.result.add("price_type", where + ".price_type must be cpm, cpc or hybrid");
  } else {
    r.result.add("missing_field", where + ".price_type is required");
  }
  if (auto* ev = detail::member(j, "events")) offer.events = r.events(*ev, where + ".events");
  else offer.events = default_events;
  offer.bids = r.values(detail::member(j, "bids"), offer.events, where + ".bids");
  errors.merge(std::move(r.result));
  return offer;
}

inline Offer offer_from_json(const Json& j) {
  ValidationResult errors;
  Offer offer = offer_from_json(j, {}, errors);
  if (!errors.ok()) throw ValidationError(std::move(errors));
  return offer;
}

inline ChargeSchedule charges_from_json(const Json& j, std::span<const EventSpec> events) {
  detail::Reader r;
  ChargeSchedule c{r.values(&j, events, "charges")};
  if (!r.result.ok()) throw ValidationError(std::move(r.result));
  return c;
}

// ============================================================================
// Scenario files
// ============================================================================

struct ScenarioFile {
  Scenario scenario;
  /// Pre-adjusted offers, entered into the auction as given.
  std::vector<AdjustedOffer> adjusted_offers;
};

/// Parses and structurally checks a scenario document. Throws ValidationError
/// listing every problem found.
inline ScenarioFile scenario_from_json(const Json& doc) {
  detail::Reader r;
  ScenarioFile out;
  Scenario& s = out.scenario;
  if (!doc.is_object()) {
    r.result.add("type", "scenario must be a JSON object");
    throw ValidationError(std::move(r.result));
  }

  if (auto* v = detail::member(doc, "format_version")) {
    if (!v->is_number_integer() || v->get<std::int64_t>() != kFormatVersion) {
      r.result.add("format_version", "unsupported format_version " + v->dump() + " (expected " +
                                         std::to_string(kFormatVersion) + ")");
    }
  } else {
    r.result.add("format_version", "format_version is required");
  }
  if (!r.result.ok()) throw ValidationError(std::move(r.result));

  EventList default_events;
  if (auto* ev = detail::member(doc, "events")) default_events = r.events(*ev, "events");
  const Json* default_charges = detail::member(doc, "charges");

  if (auto* offers = detail::member(doc, "offers")) {
    if (!offers->is_array()) {
      r.result.add("type", "offers must be an array");
    } else {
      for (std::size_t i = 0; i < offers->size(); ++i) {
        const std::string where = "offers[" + std::to_string(i) + "]";
        Offer offer = offer_from_json((*offers)[i], default_events, r.result, where);
        const Json* charge_doc = default_charges;
        if ((*offers)[i].is_object()) {
          if (auto* c = detail::member((*offers)[i], "charges")) charge_doc = c;
        }
        ChargeSchedule charges{r.values(charge_doc, offer.events, where + ".charges")};
        s.offers.push_back(std::move(offer));
        s.charges.push_back(std::move(charges));
      }
    }
  }

  // An `adjust` output document lists its adjusted offers under "ads".
  const Json* adj = detail::member(doc, "adjusted_offers");
  if (auto* cmd = detail::member(doc, "command"); !adj && cmd && *cmd == "adjust") adj = detail::member(doc, "ads");
  if (adj) {
    if (!adj->is_array()) {
      r.result.add("type", "adjusted_offers must be an array");
    } else {
      for (std::size_t i = 0; i < adj->size(); ++i) {
        const Json& a = (*adj)[i];
        const std::string where = "adjusted_offers[" + std::to_string(i) + "]";
        if (!a.is_object()) {
          r.result.add("type", where + " must be an object");
          continue;
        }
        std::string id;
        if (auto* v = detail::member(a, "ad_id")) id = r.string(*v, where + ".ad_id");
        else r.result.add("missing_field", where + ".ad_id is required");
        EventList events = default_events;
        if (auto* ev = detail::member(a, "events")) events = r.events(*ev, where + ".events");
        r.result.merge(validate_events(events), where);
        EventValues adjusted = r.values(detail::member(a, "adjusted"), events, where + ".adjusted");
        for (const auto& e : adjusted.entries()) {
          if (!std::isfinite(e.amount)) r.result.add("non_finite", where + ".adjusted." + e.event_id + " is not finite");
        }
        out.adjusted_offers.push_back(make_adjusted(std::move(id), std::move(events), std::move(adjusted)));
      }
    }
  }

  if (auto* v = detail::member(doc, "strategy")) {
    auto parsed = parse_shift_strategy(r.string(*v, "strategy"));
    if (parsed) s.strategy = *parsed;
    else r.result.add("strategy", "strategy must be identity, single:<event> or proportional[:events]");
  }
  if (auto* v = detail::member(doc, "pricing")) {
    auto parsed = parse_pricing_rule(r.string(*v, "pricing"));
    if (parsed) s.pricing = *parsed;
    else r.result.add("pricing", "pricing must be first or second");
  }
  if (auto* v = detail::member(doc, "slots")) {
    if (!v->is_object()) {
      r.result.add("type", "slots must be an object");
    } else {
      if (auto* k = detail::member(*v, "k")) s.slots.slots = r.count(*k, "slots.k");
      if (auto* m = detail::member(*v, "ctr_matrix")) {
        if (!m->is_object()) {
          r.result.add("type", "slots.ctr_matrix must be an object");
        } else {
          for (auto it = m->begin(); it != m->end(); ++it) {
            std::vector<double> row;
            if (!it.value().is_array()) {
              r.result.add("type", "slots.ctr_matrix." + it.key() + " must be an array");
              continue;
            }
            for (const auto& p : it.value()) row.push_back(r.number(p, "slots.ctr_matrix." + it.key()));
            s.slots.click_probs[it.key()] = std::move(row);
          }
        }
      }
    }
  }
  if (auto* v = detail::member(doc, "reserve")) s.reserve = r.number(*v, "reserve");
  if (auto* v = detail::member(doc, "trials")) s.trials = r.count(*v, "trials");
  if (auto* v = detail::member(doc, "seed")) s.seed = r.count(*v, "seed");
  if (auto* v = detail::member(doc, "model")) {
    auto parsed = parse_dependence(r.string(*v, "model"));
    if (parsed) s.model.dependence = *parsed;
    else r.result.add("model", "model must be independent or funnel");
  }
  if (auto* v = detail::member(doc, "nonnegative_bids")) {
    if (v->is_boolean()) s.nonnegative_bids = v->get<bool>();
    else r.result.add("type", "nonnegative_bids must be a boolean");
  }

  if (!r.result.ok()) throw ValidationError(std::move(r.result));
  return out;
}

inline ScenarioFile parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    ValidationResult result;
    result.add("json_syntax", e.what());
    throw ValidationError(std::move(result));
  }
  return scenario_from_json(doc);
}

// ============================================================================
// Reports
// ============================================================================

inline Json to_json(const ValidationResult& result) {
  Json arr = Json::array();
  for (const auto& v : result.violations) arr.push_back(Json{{"code", v.code}, {"message", v.message}});
  return arr;
}

inline Json ranking_json(const AuctionOutcome& outcome) {
  Json arr = Json::array();
  for (const auto& e : outcome.ranked) {
    arr.push_back(Json{{"ad_id", e.ad_id}, {"expected_adjusted_value", e.expected_value}});
  }
  return arr;
}

inline Json winner_json(const Winner& w) {
  return Json{{"ad_id", w.ad_id},
              {"slot", w.slot},
              {"value", w.value},
              {"next_value", w.next_value},
              {"price_scale", w.scale},
              {"slot_events", to_json(w.slot_events)},
              {"prices", to_json(w.prices)}};
}

inline Json auction_json(const AuctionOutcome& outcome, const SlotModel& slots, double reserve) {
  Json winners = Json::array();
  for (const auto& w : outcome.winners) winners.push_back(winner_json(w));
  Json excluded = Json::array();
  for (const auto& id : outcome.excluded) excluded.push_back(id);
  return Json{{"pricing", std::string(to_string(outcome.pricing_rule))},
              {"slots", slots.slots},
              {"reserve", reserve},
              {"ranking", ranking_json(outcome)},
              {"winners", std::move(winners)},
              {"excluded", std::move(excluded)}};
}

/// Per-event amount charged when the event occurs: r_i + d_i.
inline Json event_charges_json(const EventValues& prices, const EventValues& shifted) {
  Json obj = Json::object();
  for (std::size_t i = 0; i < prices.size(); ++i) obj[prices.id(i)] = prices[i] + shifted[i];
  return obj;
}

inline Json ad_json(const AdReport& ad, const Offer& offer) {
  Json j{{"ad_id", ad.ad_id},
         {"price_type", std::string(to_string(offer.price_type))},
         {"events", to_json(offer.events)},
         {"bids", to_json(offer.bids)},
         {"expected_offer_value", ad.expected_offer_value},
         {"expected_charge", ad.expected_charge},
         {"feasible", ad.feasible}};
  if (ad.plan) j["shift_plan"] = to_json(*ad.plan);
  if (ad.adjusted) {
    j["adjusted"] = to_json(ad.adjusted->adjusted);
    j["expected_adjusted_value"] = ad.adjusted->expected_value;
  }
  if (ad.exclusion) j["excluded"] = *ad.exclusion;
  return j;
}

inline Json adjust_document(const Scenario& s, const ScenarioReport& report) {
  Json ads = Json::array();
  Json excluded = Json::array();
  for (std::size_t k = 0; k < report.ads.size(); ++k) {
    const AdReport& ad = report.ads[k];
    if (ad.exclusion) {
      excluded.push_back(Json{{"ad_id", ad.ad_id},
                              {"reason", *ad.exclusion},
                              {"expected_offer_value", ad.expected_offer_value},
                              {"expected_charge", ad.expected_charge}});
    } else {
      ads.push_back(ad_json(ad, s.offers[k]));
    }
  }
  return Json{{"format_version", kFormatVersion},
              {"command", "adjust"},
              {"strategy", to_string(s.strategy)},
              {"nonnegative_bids", s.nonnegative_bids},
              {"ads", std::move(ads)},
              {"excluded", std::move(excluded)}};
}

inline Json simulate_document(const Scenario& s, const ScenarioReport& report) {
  Json ads = Json::array();
  for (std::size_t k = 0; k < report.ads.size(); ++k) {
    const AdReport& ad = report.ads[k];
    Json j = ad_json(ad, s.offers[k]);
    if (ad.payment) {
      const PaymentReport& p = *ad.payment;
      j["outcome"] = Json{{"slot", p.slot},
                          {"slot_events", to_json(p.slot_events)},
                          {"prices", to_json(p.prices)},
                          {"price_scale", p.scale},
                          {"next_value", p.next_value},
                          {"event_charges", event_charges_json(p.prices, ad.plan->shifted)},
                          {"expected_payment", p.expected_payment},
                          {"enumerated_payment", p.enumerated_payment ? Json(*p.enumerated_payment) : Json()},
                          {"monte_carlo", Json{{"trials", p.monte_carlo.trials},
                                               {"mean", p.monte_carlo.mean},
                                               {"stderr", p.monte_carlo.std_error}}}};
    } else {
      j["outcome"] = nullptr;
    }
    ads.push_back(std::move(j));
  }
  Json doc{{"format_version", kFormatVersion},
           {"command", "simulate"},
           {"strategy", to_string(s.strategy)},
           {"model", std::string(to_string(s.model.dependence))},
           {"trials", s.trials},
           {"seed", s.seed},
           {"auctions", report.auctions_run()},
           {"ads", std::move(ads)}};
  doc["auction"] = report.auction ? auction_json(*report.auction, s.slots, s.reserve) : Json();
  return doc;
}

/// CSV summary: ad_id,expected_adjusted_value,slot,expected_payment,mc_mean,mc_stderr.
inline std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string summary_csv(const ScenarioReport& report) {
  std::string out = "ad_id,expected_adjusted_value,slot,expected_payment,mc_mean,mc_stderr\n";
  for (const auto& ad : report.ads) {
    out += csv_field(ad.ad_id);
    out += ',';
    if (ad.adjusted) out += format_number(ad.adjusted->expected_value);
    out += ',';
    if (ad.payment) {
      out += std::to_string(ad.payment->slot) + ',' + format_number(ad.payment->expected_payment) + ',' +
             format_number(ad.payment->monte_carlo.mean) + ',' + format_number(ad.payment->monte_carlo.std_error);
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace uxcharge::io
