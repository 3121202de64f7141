#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uxcharge/types.hpp"

namespace uxcharge {
namespace {

using testing::cpc_offer;

TEST(ValidateOffer, CanonicalCpcOfferIsValid) {
  const Offer offer = cpc_offer("A", 2.0, 0.1);
  EXPECT_TRUE(validate_offer(offer).ok());
}

TEST(ValidateOffer, ProbabilityAboveOne) {
  Offer offer = cpc_offer("A", 2.0, 0.1);
  offer.events[1].probability = 1.3;
  const auto result = validate_offer(offer);
  EXPECT_FALSE(result.ok());
  EXPECT_TRUE(result.has("probability_out_of_range"));
}

TEST(ValidateOffer, ViewMustBeCertain) {
  Offer offer = cpc_offer("A", 2.0, 0.1);
  offer.events[0].probability = 0.9;
  const auto result = validate_offer(offer);
  ASSERT_TRUE(result.has("view_probability"));
  EXPECT_NE(result.violations.front().message.find("View event must have p=1"), std::string::npos);
}

TEST(ValidateOffer, ReportsEveryViolation) {
  Offer offer;
  offer.ad_id = "bad";
  offer.price_type = PriceType::Hybrid;
  offer.events = {{"click", EventKind::Click, 0.1}, {"click", EventKind::Click, -0.2}};
  offer.bids = EventValues{{"click", -1.0}, {"click", 0.0}};
  const auto result = validate_offer(offer);
  EXPECT_TRUE(result.has("duplicate_event_id"));
  EXPECT_TRUE(result.has("probability_out_of_range"));
  EXPECT_TRUE(result.has("negative_bid"));
  EXPECT_TRUE(result.has("missing_view_event"));
}

TEST(ValidateOffer, PriceTypeRestrictsBids) {
  Offer cpm = testing::cpm_offer("M", 1.0, 0.1);
  EXPECT_TRUE(validate_offer(cpm).ok());
  cpm.bids = EventValues{{"view", 1.0}, {"click", 0.5}};
  EXPECT_TRUE(validate_offer(cpm).has("bid_outside_price_type"));

  Offer cpc = cpc_offer("C", 1.0, 0.1);
  cpc.bids = EventValues{{"view", 0.1}, {"click", 1.0}};
  EXPECT_TRUE(validate_offer(cpc).has("bid_outside_price_type"));

  cpc.price_type = PriceType::Hybrid;
  EXPECT_TRUE(validate_offer(cpc).ok());
}

TEST(ValidateOffer, BidsMustCoverEvents) {
  Offer offer = cpc_offer("A", 2.0, 0.1);
  offer.bids = EventValues{{"click", 2.0}};
  EXPECT_TRUE(validate_offer(offer).has("missing_bid"));
  offer.bids = EventValues{{"view", 0.0}, {"click", 2.0}, {"purchase", 1.0}};
  EXPECT_TRUE(validate_offer(offer).has("unknown_event"));
}

TEST(ValidateCharges, NegativeAndMiskeyed) {
  const auto events = testing::view_click(0.1);
  EXPECT_TRUE(validate_charges(testing::view_click_charges(0.05, 0.0), events).ok());
  EXPECT_TRUE(validate_charges(testing::view_click_charges(-0.05, 0.0), events).has("negative_charge"));
  EXPECT_TRUE(validate_charges(ChargeSchedule{EventValues{{"view", 0.1}}}, events).has("charge_keying"));
}

TEST(EventValues, KeyingChecks) {
  const auto events = testing::view_click(0.1);
  const EventValues ok{{"view", 1.0}, {"click", 2.0}};
  const EventValues swapped{{"click", 2.0}, {"view", 1.0}};
  EXPECT_TRUE(ok.keyed_to(events));
  EXPECT_FALSE(swapped.keyed_to(events));
  EXPECT_THROW(swapped.require_keyed_to(events, "x"), KeyingError);
  const std::vector<double> one{1.0};
  EXPECT_THROW((void)EventValues::aligned(events, one), KeyingError);
  EXPECT_EQ(ok.find("click"), 2.0);
  EXPECT_FALSE(ok.find("conversion").has_value());
}

TEST(ShiftStrategyText, ParsesAndPrints) {
  for (const char* text : {"identity", "single:click", "proportional", "proportional:click,conv"}) {
    auto parsed = parse_shift_strategy(text);
    ASSERT_TRUE(parsed) << text;
    EXPECT_EQ(to_string(*parsed), text);
  }
  EXPECT_FALSE(parse_shift_strategy("single:"));
  EXPECT_FALSE(parse_shift_strategy("proportional:a,,b"));
  EXPECT_FALSE(parse_shift_strategy("proportional:a,"));
  EXPECT_FALSE(parse_shift_strategy("greedy"));
}

TEST(FunnelConsistency, ClickImpliesView) {
  const EventList events{{"view", EventKind::View, 1.0},
                         {"click", EventKind::Click, 0.1},
                         {"conv", EventKind::Conversion, 0.01}};
  EXPECT_TRUE(funnel_consistent(events, std::vector<int>{1, 1, 1}));
  EXPECT_TRUE(funnel_consistent(events, std::vector<int>{1, 0, 0}));
  EXPECT_TRUE(funnel_consistent(events, std::vector<int>{0, 0, 0}));
  EXPECT_FALSE(funnel_consistent(events, std::vector<int>{0, 1, 0}));
  EXPECT_FALSE(funnel_consistent(events, std::vector<int>{1, 0, 1}));
}

}  // namespace
}  // namespace uxcharge
