/* Copyright 2026 The dcce Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <doctest.h>

#include <algorithm>
#include <random>

#include "errors.hpp"
#include "procurement.hpp"
#include "testing.hpp"

using namespace dcce;
using doctest::Approx;

namespace {

// Two candidates with hand-checked totals at eta = 1:
// X earns 1,000,000 USD for 1,000 t, Y earns 900,000 USD for 500 t.
struct XyFixture {
  DeploymentScenario base;
  std::vector<Candidate> candidates;
  Context context;
};

XyFixture xy_fixture() {
  XyFixture f;
  f.base = testing::s0_scenario();
  f.base.baseline.platform.tdp_w = 1000.0;
  f.base.lifetime_years = 1.0;
  f.base.gross_income = 2'000'000.0;

  PlatformSpec x = testing::s0_candidate_platform();
  x.id = "X";
  x.unit_price = 6'860.0;
  x.tdp_w = 1000.0;
  x.embodied = EmbodiedComponents{};
  x.embodied.ic = 11'240.0;
  PlatformSpec y = x;
  y.id = "Y";
  y.unit_price = 15'430.0;
  y.embodied.ic = 5'620.0;
  f.candidates = {{x, testing::uniform_gains(2, 2, 1000)}, {y, testing::uniform_gains(2, 4, 1000)}};

  f.context = testing::s0_context();
  f.context.elec_price = 1.5;
  f.context.carbon_intensity = 1.0;
  f.context.pue = 1.0;
  return f;
}

const ProcurementOption& find(const OptionSet& set, const std::string& id, bool decommission) {
  return *std::find_if(set.options.begin(), set.options.end(), [&](const ProcurementOption& o) {
    return o.platform_id == id && o.decommission == decommission;
  });
}

}  // namespace

TEST_CASE("parse_cap") {
  CHECK(parse_cap("none").kind == CapPolicy::Kind::kNone);
  CHECK(parse_cap("iso-carbon").kind == CapPolicy::Kind::kIsoCarbon);
  CHECK(parse_cap("iso-power").kind == CapPolicy::Kind::kIsoPower);
  const auto abs = parse_cap("abs:1.5e6");
  CHECK(abs.kind == CapPolicy::Kind::kAbsoluteCarbon);
  CHECK(abs.budget_kg == 1.5e6);
  CHECK_THROWS_AS(parse_cap("abs:-3"), InvalidInput);
  CHECK_THROWS_AS(parse_cap("abs:"), InvalidInput);
  CHECK_THROWS_AS(parse_cap("iso"), InvalidInput);
}

TEST_CASE("evaluate_options on the two-candidate fixture") {
  const auto f = xy_fixture();
  const auto set = evaluate_options(f.base, f.candidates, f.context, 1.0);
  REQUIRE(set.options.size() == 4);
  CHECK(set.baseline_cfp == Approx(876'000.0).epsilon(1e-12));
  CHECK(set.baseline_power_w == Approx(100'000.0));
  const auto& x = find(set, "X", true);
  const auto& y = find(set, "Y", true);
  CHECK(x.profit == Approx(1'000'000.0).epsilon(1e-12));
  CHECK(x.footprint == Approx(1'000'000.0).epsilon(1e-12));
  CHECK(y.profit == Approx(900'000.0).epsilon(1e-12));
  CHECK(y.footprint == Approx(500'000.0).epsilon(1e-12));
  CHECK(x.device_count == Approx(50.0));
  CHECK(x.power_w == Approx(50'000.0));
  const auto& keep = find(set, "X", false);
  CHECK(keep.device_count == 0.0);
  CHECK(keep.profit == Approx(686'000.0).epsilon(1e-12));
  CHECK(keep.footprint == Approx(876'000.0).epsilon(1e-12));
  CHECK(keep.power_w == Approx(100'000.0));

  const auto grown = evaluate_options(f.base, f.candidates, f.context, 3.0);
  CHECK(find(grown, "Y", false).device_count == Approx(100.0));
  CHECK(find(grown, "Y", false).power_w == Approx(200'000.0));
}

TEST_CASE("optimize") {
  const auto f = xy_fixture();
  const auto free = optimize(f.base, f.candidates, f.context, 1.0, CapPolicy::none());
  CHECK(free.chosen_platform == "X");
  CHECK(free.decommission);
  CHECK_FALSE(free.binding_cap);

  const auto capped = optimize(f.base, f.candidates, f.context, 1.0, CapPolicy::absolute(600'000.0));
  CHECK(capped.chosen_platform == "Y");
  CHECK(capped.binding_cap == CapPolicy::Kind::kAbsoluteCarbon);
  CHECK(capped.footprint <= 600'000.0);

  const auto iso = optimize(f.base, f.candidates, f.context, 1.0, CapPolicy::iso_carbon());
  CHECK(iso.chosen_platform == "Y");

  SUBCASE("an identity candidate keeps the legacy fleet") {
    auto s = testing::identity_scenario();
    const std::vector<Candidate> same{{s.candidate, s.workload}};
    const auto ctx = testing::s0_context();
    const auto plan = optimize(s, same, ctx, 2.0, CapPolicy::none());
    CHECK_FALSE(plan.decommission);
    const double baseline_opex = scenario_costs(s, ctx).baseline.opex_fin;
    CHECK(plan.profit == Approx((s.gross_income - baseline_opex) * 2.0));
  }

  SUBCASE("no feasible plan lists every violation") {
    try {
      optimize(f.base, f.candidates, f.context, 1.0, CapPolicy::absolute(1.0));
      FAIL("expected NoFeasiblePlan");
    } catch (const NoFeasiblePlan& e) {
      CHECK(e.violations().size() == 4);
    }
  }
  CHECK_THROWS_AS(optimize(f.base, std::vector<Candidate>{}, f.context, 1.0, CapPolicy::none()), InvalidInput);
}

TEST_CASE("optimize matches brute-force enumeration") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rc = testing::random_case(rng);
    const int n = 1 + trial % 8;
    std::vector<Candidate> cands;
    for (int i = 0; i < n; ++i) {
      const auto other = testing::random_case(rng);
      Candidate c{other.scenario.candidate, other.scenario.workload};
      c.platform.id = "c" + std::to_string(i);
      c.workload.entries[0].power_w = rc.scenario.baseline.platform.tdp_w;
      cands.push_back(c);
    }
    const double eta = rc.scenario.demand_growth;
    const auto& base = rc.scenario;

    struct Brute {
      std::string id;
      bool keep;
      double profit, cfp, power;
    };
    std::vector<Brute> all;
    double base_cfp = 0.0;
    const double base_power = base.baseline.count * base.baseline.platform.tdp_w * base.baseline.utilization;
    for (const auto& c : cands) {
      auto s = base;
      s.candidate = c.platform;
      const double a = c.workload.entries[0].acceleration;
      const double e = c.workload.entries[0].efficiency;
      const auto o = testing::oracle_costs(s, rc.context, a, e);
      base_cfp = o.base_cfp;
      const double tf = o.up_opex_fin + o.up_capex_fin;
      const double tc = o.up_opex_cfp + o.up_capex_cfp;
      const double n_new = base.baseline.count / a;
      all.push_back({c.platform.id, false, (base.gross_income - tf) * eta, tc * eta,
                     c.platform.tdp_w * n_new * eta * base.baseline.utilization});
      all.push_back({c.platform.id, true, (base.gross_income - tf) * eta + tf - o.base_fin,
                     tc * eta + o.base_cfp - tc,
                     c.platform.tdp_w * n_new * (eta - 1) * base.baseline.utilization + base_power});
    }

    for (auto kind : {CapPolicy::Kind::kNone, CapPolicy::Kind::kIsoCarbon, CapPolicy::Kind::kIsoPower}) {
      const Brute* best = nullptr;
      for (const auto& b : all) {
        if (kind == CapPolicy::Kind::kIsoCarbon && b.cfp > base_cfp * (1 + 1e-9)) continue;
        if (kind == CapPolicy::Kind::kIsoPower && b.power > base_power * (1 + 1e-9)) continue;
        if (best == nullptr || b.profit > best->profit) best = &b;
      }
      CapPolicy cap{kind, 0.0};
      if (best == nullptr) {
        CHECK_THROWS_AS(optimize(base, cands, rc.context, eta, cap), NoFeasiblePlan);
        continue;
      }
      const auto plan = optimize(base, cands, rc.context, eta, cap);
      CHECK(plan.profit == Approx(best->profit).epsilon(1e-9));
    }
  }
}

TEST_CASE("removing the winner never raises the optimum") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rc = testing::random_case(rng);
    std::vector<Candidate> cands;
    for (int i = 0; i < 4; ++i) {
      const auto other = testing::random_case(rng);
      cands.push_back({other.scenario.candidate, other.scenario.workload});
      cands.back().platform.id = "c" + std::to_string(i);
    }
    const auto plan = optimize(rc.scenario, cands, rc.context, rc.scenario.demand_growth, CapPolicy::none());
    std::erase_if(cands, [&](const Candidate& c) { return c.platform.id == plan.chosen_platform; });
    const auto next = optimize(rc.scenario, cands, rc.context, rc.scenario.demand_growth, CapPolicy::none());
    CHECK(next.profit <= plan.profit);
  }
}

TEST_CASE("pivot incentive") {
  const auto f = xy_fixture();
  const auto pivot = pivot_incentive(f.base, f.candidates, f.context, 1.0);
  REQUIRE(pivot.status == PivotResult::Status::kFound);
  CHECK(pivot.usd_per_t == Approx(200.0).epsilon(1e-12));
  CHECK(pivot.best->chosen_platform == "X");
  CHECK(pivot.cap_best->chosen_platform == "Y");
  CHECK(pivot.displaced->chosen_platform == "X");

  SUBCASE("the unconstrained choice flips at the pivot") {
    const double w = pivot.usd_per_t;
    auto priced = f.context;
    priced.carbon_price_op_usd_per_t = priced.carbon_price_ca_usd_per_t = w * (1 + 1e-6);
    CHECK(optimize(f.base, f.candidates, priced, 1.0, CapPolicy::none()).chosen_platform == "Y");
    priced.carbon_price_op_usd_per_t = priced.carbon_price_ca_usd_per_t = w * (1 - 1e-6);
    CHECK(optimize(f.base, f.candidates, priced, 1.0, CapPolicy::none()).chosen_platform == "X");
  }

  SUBCASE("the context's own carbon price does not move the pivot") {
    auto priced = f.context;
    priced.carbon_price_op_usd_per_t = 50.0;
    CHECK(pivot_incentive(f.base, f.candidates, priced, 1.0).usd_per_t == Approx(200.0));
  }

  SUBCASE("identical candidates have no pivot") {
    auto twins = f.candidates;
    twins[0] = twins[1];
    twins[0].platform.id = "Y2";
    CHECK(pivot_incentive(f.base, twins, f.context, 1.0).status == PivotResult::Status::kSamePlan);
  }
  CHECK_THROWS_AS(pivot_incentive(f.base, std::span(f.candidates).first(1), f.context, 1.0), InvalidInput);
}

TEST_CASE("pivot flips the unconstrained choice on random candidate sets") {
  std::mt19937_64 rng(99);
  int found = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto rc = testing::random_case(rng);
    rc.scenario.demand_growth = 1.0;
    std::vector<Candidate> cands;
    const int n = 2 + trial % 7;
    for (int i = 0; i < n; ++i) {
      const auto other = testing::random_case(rng);
      cands.push_back({other.scenario.candidate, other.scenario.workload});
      cands.back().platform.id = "c" + std::to_string(i);
    }
    const auto pivot = pivot_incentive(rc.scenario, cands, rc.context, 1.0);
    if (pivot.status != PivotResult::Status::kFound) continue;
    ++found;
    // Lifetime extensions are identical whichever candidate names them.
    auto same = [](const ProcurementPlan& a, const ProcurementPlan& b) {
      return a.decommission == b.decommission && a.footprint == b.footprint && a.device_count == b.device_count;
    };
    auto priced = rc.context;
    priced.carbon_price_op_usd_per_t = priced.carbon_price_ca_usd_per_t = pivot.usd_per_t * (1 + 1e-6);
    CHECK(same(optimize(rc.scenario, cands, priced, 1.0, CapPolicy::none()), *pivot.cap_best));
    priced.carbon_price_op_usd_per_t = priced.carbon_price_ca_usd_per_t = pivot.usd_per_t * (1 - 1e-6);
    const auto below = optimize(rc.scenario, cands, priced, 1.0, CapPolicy::none());
    CHECK(same(below, *pivot.displaced));
    CHECK_FALSE(same(below, *pivot.cap_best));
  }
  CHECK(found > 100);
}

TEST_CASE("required_grid_ci") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  const auto r = required_grid_ci(s, ctx, 2.0, true);
  REQUIRE(r.status == GridCiResult::Status::kSolved);
  CHECK(r.ci == Approx(0.3143835616).epsilon(1e-9));

  auto cleaner = ctx;
  cleaner.carbon_intensity = r.ci;
  cleaner.goal = GoalPolicy::absolute(700'800.0);
  CHECK(max_sustainable_growth(s, cleaner, true).eta == Approx(2.0).epsilon(1e-9));

  const double current = max_sustainable_growth(s, ctx, true).eta;
  const auto at = required_grid_ci(s, ctx, current, true);
  CHECK(at.status == GridCiResult::Status::kAlreadyAttainable);
  CHECK(at.ci == ctx.carbon_intensity);

  // 700,800 / 75,000 = 9.34 is the embodied-only ceiling.
  CHECK(required_grid_ci(s, ctx, 10.0, true).status == GridCiResult::Status::kUnreachable);

  SUBCASE("retention round trip") {
    auto abs = ctx;
    abs.goal = GoalPolicy::absolute(900'000.0);
    const auto k = required_grid_ci(s, abs, 2.0, false);
    REQUIRE(k.status == GridCiResult::Status::kSolved);
    auto at_k = abs;
    at_k.carbon_intensity = k.ci;
    CHECK(max_sustainable_growth(s, at_k, false).eta == Approx(2.0).epsilon(1e-9));
    CHECK(k.ci < ctx.carbon_intensity);
  }
}

TEST_CASE("required_grid_ci round trips on random scenarios") {
  std::mt19937_64 rng(31);
  int solved = 0;
  for (int i = 0; i < 500; ++i) {
    const auto rc = testing::random_case(rng);
    for (bool keep : {true, false}) {
      const auto current = max_sustainable_growth(rc.scenario, rc.context, keep);
      if (!current.bounded) continue;
      const double target = std::max(1.0, current.eta) * 1.3;
      const auto r = required_grid_ci(rc.scenario, rc.context, target, keep);
      if (r.status != GridCiResult::Status::kSolved) continue;
      CHECK(r.ci <= rc.context.carbon_intensity);
      auto ctx = rc.context;
      ctx.goal = GoalPolicy::absolute(carbon_goal(rc.scenario, rc.context));
      ctx.carbon_intensity = r.ci;
      CHECK(max_sustainable_growth(rc.scenario, ctx, keep).eta == Approx(target).epsilon(1e-9));
      ++solved;
    }
  }
  CHECK(solved > 100);
}

TEST_CASE("sweep_locations") {
  const auto s = testing::s0_scenario();
  auto a = testing::s0_context();
  a.location = "b-site";
  auto b = a;
  b.location = "a-site";
  b.elec_price = 0.2;
  auto broken = a;
  broken.location = "c-site";
  broken.pue = 0.5;
  const std::vector<Context> ctxs{a, b, broken};
  const auto out = sweep_locations(s, ctxs, 2.0);
  REQUIRE(out.size() == 3);
  CHECK(out[0].location == "a-site");
  CHECK(out[1].location == "b-site");
  CHECK(out[0].max_growth.eta == out[1].max_growth.eta);
  CHECK(out[0].required_incentive.usd_per_t != out[1].required_incentive.usd_per_t);
  CHECK(out[1].required_incentive.usd_per_t == Approx(2603.8812785).epsilon(1e-9));
  CHECK(out[1].max_growth.eta == Approx(1.6473906911).epsilon(1e-9));
  CHECK(out[1].required_ci.ci == Approx(0.3143835616).epsilon(1e-9));
  CHECK_FALSE(out[2].error.empty());

  const std::vector<Context> reversed{broken, b, a};
  const auto again = sweep_locations(s, reversed, 2.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(again[i].location == out[i].location);
    CHECK(again[i].required_incentive.usd_per_t == out[i].required_incentive.usd_per_t);
  }
}
