#pragma once
/**
 * @file sim.hpp
 * @brief Expected payment: closed form, exact enumeration over the joint event
 *        law, and seeded Monte Carlo.
 *
 * Only the marginals p_i enter the closed form. Two joint laws are provided
 * for the enumeration and sampling paths:
 *   - Independent: every event is an independent Bernoulli(p_i)
 *   - Funnel:      View -> Click -> Conversion. Click and Custom events occur
 *                  only after a view, conversions only after the click (when
 *                  the set has one), with conditionals p_child / p_parent so
 *                  the marginals are reproduced exactly.
 *
 * Monte Carlo draws every trial from its own substream, derived from
 * (seed, stream, trial index), and reduces per fixed-size chunk in chunk order.
 * Results are therefore identical for any thread count.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "uxcharge/types.hpp"

namespace uxcharge {

enum class Dependence { Independent, Funnel };

inline std::string_view to_string(Dependence d) { return d == Dependence::Independent ? "independent" : "funnel"; }

inline std::optional<Dependence> parse_dependence(std::string_view s) {
  if (s == "independent") return Dependence::Independent;
  if (s == "funnel") return Dependence::Funnel;
  return std::nullopt;
}

struct OutcomeModel {
  Dependence dependence = Dependence::Independent;
};

/// Joint law of the event indicators as a forest of conditional Bernoullis.
struct EventLaw {
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  std::vector<std::size_t> parent;
  /// P(e_i = 1 | e_parent = 1), or the marginal when there is no parent.
  std::vector<double> conditional;
  /// Parents precede children.
  std::vector<std::size_t> order;

  [[nodiscard]] std::size_t size() const noexcept { return parent.size(); }
};

namespace detail {

inline std::size_t funnel_parent(std::span<const EventSpec> events, std::size_t i) {
  const auto view = find_kind(events, EventKind::View);
  const auto click = find_kind(events, EventKind::Click);
  switch (events[i].kind) {
    case EventKind::View: return EventLaw::kNoParent;
    case EventKind::Conversion:
      if (click) return *click;
      [[fallthrough]];
    default: return view ? *view : EventLaw::kNoParent;
  }
}

}  // namespace detail

/// Derived conditionals must lie in [0,1].
inline ValidationResult validate_model(std::span<const EventSpec> events, const OutcomeModel& model) {
  ValidationResult result;
  for (const auto& e : events) {
    if (!in_unit_interval(e.probability)) {
      result.add("probability_out_of_range", "probability out of range for event '" + e.event_id + "'");
    }
  }
  if (!result.ok() || model.dependence == Dependence::Independent) return result;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::size_t parent = detail::funnel_parent(events, i);
    if (parent == EventLaw::kNoParent) continue;
    if (events[i].probability > events[parent].probability) {
      result.add("funnel_conditional", "event '" + events[i].event_id + "' is more likely than its funnel parent '" +
                                           events[parent].event_id + "'");
    }
  }
  return result;
}

[[nodiscard]] inline EventLaw build_law(std::span<const EventSpec> events, const OutcomeModel& model) {
  if (auto check = validate_model(events, model); !check.ok()) throw Error(check.violations.front().message);
  EventLaw law;
  const std::size_t n = events.size();
  law.parent.assign(n, EventLaw::kNoParent);
  law.conditional.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (model.dependence == Dependence::Funnel) law.parent[i] = detail::funnel_parent(events, i);
    const std::size_t parent = law.parent[i];
    if (parent == EventLaw::kNoParent) {
      law.conditional[i] = events[i].probability;
    } else {
      const double pp = events[parent].probability;
      law.conditional[i] = pp > 0.0 ? std::min(1.0, events[i].probability / pp) : 0.0;
    }
  }
  std::vector<int> depth(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; law.parent[j] != EventLaw::kNoParent; j = law.parent[j]) ++depth[i];
  }
  law.order.resize(n);
  std::iota(law.order.begin(), law.order.end(), std::size_t{0});
  std::stable_sort(law.order.begin(), law.order.end(), [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });
  return law;
}

/// Probability of one joint outcome.
[[nodiscard]] inline double outcome_probability(const EventLaw& law, std::span<const int> realized) {
  double prob = 1.0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    const std::size_t parent = law.parent[i];
    if (parent != EventLaw::kNoParent && realized[parent] == 0) {
      if (realized[i] == 1) return 0.0;
      continue;
    }
    prob *= realized[i] == 1 ? law.conditional[i] : 1.0 - law.conditional[i];
  }
  return prob;
}

/// Closed form sum((r_i + d_i) * p_i).
[[nodiscard]] inline double expected_payment(const EventValues& prices, const EventValues& shifted,
                                             std::span<const EventSpec> events) {
  prices.require_keyed_to(events, "prices");
  shifted.require_keyed_to(events, "shift plan");
  double sum = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) sum += (prices[i] + shifted[i]) * events[i].probability;
  return sum;
}

inline constexpr std::size_t kMaxEnumeratedEvents = 20;

/// Exact expectation of sum((r_i + d_i) * e_i) by summing over all 2^n outcomes.
[[nodiscard]] inline double enumerate_expected_payment(const EventValues& prices, const EventValues& shifted,
                                                       std::span<const EventSpec> events, const OutcomeModel& model) {
  prices.require_keyed_to(events, "prices");
  shifted.require_keyed_to(events, "shift plan");
  const std::size_t n = events.size();
  if (n > kMaxEnumeratedEvents) {
    throw EnumerationLimitError("cannot enumerate " + std::to_string(n) + " events (limit " +
                                std::to_string(kMaxEnumeratedEvents) + ")");
  }
  const EventLaw law = build_law(events, model);
  std::vector<int> realized(n, 0);
  double sum = 0.0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) realized[i] = static_cast<int>((mask >> i) & 1U);
    const double prob = outcome_probability(law, realized);
    if (prob == 0.0) continue;
    double charge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (realized[i] == 1) charge += prices[i] + shifted[i];
    }
    sum += prob * charge;
  }
  return sum;
}

// ============================================================================
// Random streams
// ============================================================================

/// SplitMix64 output function.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 generator; one instance per (seed, stream, trial).
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    return SplitMix64(mix64(mix64(seed + kGamma) ^ mix64(stream * kGamma + 1)) + mix64(index * kGamma + 2));
  }

  constexpr std::uint64_t next() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform double in [0, 1).
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Draws a joint outcome from the law.
inline void sample_outcome(const EventLaw& law, SplitMix64& rng, std::span<int> realized) {
  for (std::size_t i : law.order) {
    const std::size_t parent = law.parent[i];
    const double u = rng.uniform();
    if (parent != EventLaw::kNoParent && realized[parent] == 0) {
      realized[i] = 0;
    } else {
      realized[i] = u < law.conditional[i] ? 1 : 0;
    }
  }
}

struct MonteCarloSummary {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct MonteCarloOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  /// Substream selector, e.g. the ad's position in the scenario.
  std::uint64_t stream = 0;
  unsigned threads = 1;
};

inline constexpr std::uint64_t kMonteCarloChunk = 1U << 14;

namespace detail {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    n = total;
  }
};

}  // namespace detail

/// Sample mean and standard error of the realized charge sum((r_i + d_i) * e_i).
[[nodiscard]] inline MonteCarloSummary monte_carlo_payment(const EventValues& prices, const EventValues& shifted,
                                                           std::span<const EventSpec> events,
                                                           const OutcomeModel& model, const MonteCarloOptions& opts) {
  if (opts.trials < 1) throw Error("trials must be >= 1");
  prices.require_keyed_to(events, "prices");
  shifted.require_keyed_to(events, "shift plan");
  const EventLaw law = build_law(events, model);
  const std::size_t n = events.size();
  std::vector<double> amount(n);
  for (std::size_t i = 0; i < n; ++i) amount[i] = prices[i] + shifted[i];

  const std::uint64_t chunks = (opts.trials + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<detail::Moments> partial(chunks);

  auto run_chunk = [&](std::uint64_t chunk) {
    std::vector<int> realized(n, 0);
    detail::Moments m;
    const std::uint64_t begin = chunk * kMonteCarloChunk;
    const std::uint64_t end = std::min(opts.trials, begin + kMonteCarloChunk);
    for (std::uint64_t t = begin; t < end; ++t) {
      auto rng = SplitMix64::substream(opts.seed, opts.stream, t);
      sample_outcome(law, rng, realized);
      double charge = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (realized[i] == 1) charge += amount[i];
      }
      m.push(charge);
    }
    partial[chunk] = m;
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += threads) run_chunk(c);
      });
    }
  }

  detail::Moments total;
  for (const auto& m : partial) total.merge(m);

  MonteCarloSummary out;
  out.trials = opts.trials;
  out.mean = total.mean;
  out.std_error = total.n > 1.0 ? std::sqrt(total.m2 / (total.n - 1.0)) / std::sqrt(total.n) : 0.0;
  return out;
}

}  // namespace uxcharge
