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

#include <cmath>
#include <random>

#include "balance.hpp"
#include "dse.hpp"
#include "errors.hpp"
#include "testing.hpp"

using namespace dcce;
using doctest::Approx;

TEST_CASE("design_point_cost") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  CHECK(design_point_cost({2, 2}, s, ctx, 1.0, CostDimension::kFinancial) == Approx(1'087'600.0).epsilon(1e-12));
  CHECK(design_point_cost({2, 2}, s, ctx, 1.0, CostDimension::kCarbon) == Approx(425'400.0).epsilon(1e-12));
  CHECK(design_point_cost({2, 2}, s, ctx, 3.0, CostDimension::kCarbon) == Approx(3 * 425'400.0).epsilon(1e-12));

  const auto id = testing::identity_scenario();
  CHECK(design_point_cost({1, 1}, id, ctx, 1.0, CostDimension::kFinancial) ==
        Approx(scenario_costs(id, ctx).baseline.opex_fin).epsilon(1e-12));
  CHECK_THROWS_AS(design_point_cost({0, 1}, s, ctx, 1.0, CostDimension::kFinancial), InvalidInput);
  CHECK_THROWS_AS(design_point_cost({1, 1}, s, ctx, 0.5, CostDimension::kFinancial), InvalidInput);
}

TEST_CASE("design_point_cost is strictly decreasing in both gains") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  for (auto dim : {CostDimension::kFinancial, CostDimension::kCarbon}) {
    for (double x = 0.5; x < 30; x *= 1.5) {
      CHECK(design_point_cost({x * 1.1, 3}, s, ctx, 1.0, dim) < design_point_cost({x, 3}, s, ctx, 1.0, dim));
      CHECK(design_point_cost({3, x * 1.1}, s, ctx, 1.0, dim) < design_point_cost({3, x}, s, ctx, 1.0, dim));
    }
  }
}

TEST_CASE("log_space") {
  const auto v = log_space(0.5, 32.0, 256);
  REQUIRE(v.size() == 256);
  CHECK(v.front() == 0.5);
  CHECK(v.back() == 32.0);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
  CHECK(log_space(2.0, 8.0, 3)[1] == Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(log_space(0.0, 1.0, 4), InvalidInput);
}

TEST_CASE("threshold curves") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  const auto curves = threshold_curves(s, ctx, {1.5, 2.0}, 500.0, CurveSampling{0.5, 32, 257});
  REQUIRE(curves.size() == 5);
  CHECK(curves[0].kind == ThresholdCurve::Kind::kSustainableUpgrade);
  CHECK(curves[1].kind == ThresholdCurve::Kind::kSustainableGrowth);
  CHECK(curves[2].eta == 2.0);
  CHECK(curves[3].kind == ThresholdCurve::Kind::kViableUpgrade);
  CHECK(curves[4].kind == ThresholdCurve::Kind::kIncentivized);

  SUBCASE("sustainable upgrade at a = 2") {
    const auto one = threshold_curves(s, ctx, {}, 0.0, CurveSampling{2.0, 2.0, 1});
    REQUIRE(one[0].points.size() == 1);
    CHECK(one[0].points[0].efficiency == Approx(1.1198465964).epsilon(1e-9));
  }

  SUBCASE("large acceleration drives the sustainable curve to e = 1") {
    const auto far = threshold_curves(s, ctx, {}, 0.0, CurveSampling{1e9, 1e9, 1});
    CHECK(far[0].points[0].efficiency == Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("zero incentive reproduces the viable curve") {
    const auto zero = threshold_curves(s, ctx, {}, 0.0);
    REQUIRE(zero[1].points.size() == zero[2].points.size());
    for (std::size_t i = 0; i < zero[1].points.size(); ++i) {
      CHECK(zero[1].points[i] == zero[2].points[i]);
    }
  }

  SUBCASE("every point re-evaluates to its budget") {
    for (const auto& curve : curves) {
      const CarbonPrices prices{curve.incentive_usd_per_t / 1000.0, 0.0};
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (i > 0) CHECK(curve.points[i].acceleration > curve.points[i - 1].acceleration);
        const double cost = design_point_cost(curve.points[i], s, ctx, curve.eta, curve.dimension, prices);
        CHECK(cost == Approx(curve.budget).epsilon(1e-9));
      }
    }
  }

  SUBCASE("infeasible curves are empty") {
    auto rich = s;
    rich.candidate.unit_price = 1e9;
    const auto c = threshold_curves(rich, ctx, {}, 0.0);
    CHECK(c[1].empty());
  }
  CHECK_THROWS_AS(threshold_curves(s, ctx, {0.5}, 0.0), InvalidInput);
}

TEST_CASE("evaluate_grid") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  GridSpec spec;
  spec.a_min = spec.e_min = 0.5;
  spec.a_max = spec.e_max = 8.0;
  spec.a_resolution = spec.e_resolution = 5;  // 0.5, 1, 2, 4, 8
  const auto grid = evaluate_grid(s, ctx, spec, 1.5, 2603.8812785388127);
  REQUIRE(grid.cells.size() == 25);
  const auto& center = grid.at(2, 2);
  CHECK(grid.accelerations[2] == Approx(2.0).epsilon(1e-15));
  CHECK(center.cost_fin == Approx(1'087'600.0).epsilon(1e-12));
  CHECK_FALSE(center.viable);
  CHECK(center.sustainable);
  CHECK(center.scalable);  // 425,400 x 1.5 <= 700,800

  SUBCASE("viable cells are upward closed and sustainable flips once") {
    GridSpec wide;
    wide.a_resolution = wide.e_resolution = 64;
    const auto g = evaluate_grid(s, ctx, wide, 2.0, 1000.0);
    for (std::size_t ai = 0; ai < g.accelerations.size(); ++ai) {
      int flips = 0;
      for (std::size_t ei = 0; ei < g.efficiencies.size(); ++ei) {
        const auto& c = g.at(ai, ei);
        if (ei > 0 && c.sustainable != g.at(ai, ei - 1).sustainable) ++flips;
        if (c.viable) {
          if (ai + 1 < g.accelerations.size()) CHECK(g.at(ai + 1, ei).viable);
          if (ei + 1 < g.efficiencies.size()) CHECK(g.at(ai, ei + 1).viable);
        }
        CHECK(c.sustainable == (c.cost_cfp <= scenario_costs(s, ctx).baseline.opex_cfp));
        if (c.viable) CHECK(c.viable_incentivized);
      }
      CHECK(flips <= 1);
    }
  }

  SUBCASE("a cell exactly on the threshold counts as satisfied") {
    auto tie = testing::identity_scenario();
    GridSpec one{1.0, 1.0, 1.0, 1.0, 1, 1};
    const auto g = evaluate_grid(tie, ctx, one, 1.0);
    CHECK(g.cells[0].viable);
    CHECK(g.cells[0].sustainable);
  }
}

TEST_CASE("project_trend_point") {
  const DoublingRates rates{12.0, 24.0, 3.0, -4.0};
  const auto p = project_trend_point(rates, 4.0, FrontierMode::kTopPerformance);
  CHECK(p.acceleration == Approx(16.0).epsilon(1e-15));
  CHECK(p.efficiency == Approx(4.0).epsilon(1e-15));
  const auto q = project_trend_point(rates, 4.0, FrontierMode::kTopEfficiency);
  CHECK(q.acceleration == Approx(std::exp2(48.0 / 15.0)));
  CHECK(q.efficiency == Approx(std::exp2(48.0 / 20.0)));

  const auto bert = project_trend_point({15.0, 21.0, 0.0, 0.0}, 4.0, FrontierMode::kTopPerformance);
  CHECK(bert.acceleration == Approx(9.1895868400).epsilon(1e-9));
  CHECK(bert.efficiency == Approx(4.8760546168).epsilon(1e-9));

  for (double t1 : {0.5, 1.0, 2.5}) {
    for (double t2 : {0.25, 3.0}) {
      const auto a = project_trend_point(rates, t1, FrontierMode::kTopEfficiency);
      const auto b = project_trend_point(rates, t2, FrontierMode::kTopEfficiency);
      const auto ab = project_trend_point(rates, t1 + t2, FrontierMode::kTopEfficiency);
      CHECK(a.acceleration * b.acceleration == Approx(ab.acceleration).epsilon(1e-12));
      CHECK(a.efficiency * b.efficiency == Approx(ab.efficiency).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(project_trend_point({12.0, 24.0, -12.0, 0.0}, 1.0, FrontierMode::kTopEfficiency), InvalidInput);
}

TEST_CASE("iso_edp_solve") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  const auto sol = iso_edp_solve(4.0, 1.5, s, ctx);
  REQUIRE(sol.roots.size() == 2);
  CHECK(sol.roots[0].efficiency == Approx(1.7441807409).epsilon(1e-9));
  CHECK(sol.roots[0].acceleration == Approx(2.2933403095).epsilon(1e-9));
  CHECK(sol.roots[1].efficiency == Approx(10.7144859258).epsilon(1e-9));
  CHECK(sol.roots[1].acceleration == Approx(0.3733263572).epsilon(1e-9));
  REQUIRE(sol.max_eta);
  CHECK(*sol.max_eta > 1.5);

  SUBCASE("roots satisfy both constraints") {
    for (double eta : {1.0, 1.2, 1.5, 1.9}) {
      const auto r = iso_edp_solve(4.0, eta, s, ctx);
      for (const auto& p : r.roots) {
        CHECK(p.acceleration * p.efficiency == Approx(4.0).epsilon(1e-12));
        const auto costs = scenario_costs(s, ctx, p);
        CHECK(max_sustainable_growth(costs, carbon_goal(costs, ctx), true).eta == Approx(eta).epsilon(1e-9));
      }
    }
  }

  SUBCASE("a fine scan of the line finds no other crossings") {
    const auto costs0 = scenario_costs(s, ctx);
    const double goal = carbon_goal(costs0, ctx);
    auto growth = [&](double e) {
      const auto c = scenario_costs(s, ctx, DesignPoint{4.0 / e, e});
      return max_sustainable_growth(c, goal, true).eta - 1.5;
    };
    int crossings = 0;
    const auto es = log_space(0.05, 400.0, 20000);
    for (std::size_t i = 1; i < es.size(); ++i) {
      if ((growth(es[i - 1]) < 0) != (growth(es[i]) < 0)) ++crossings;
    }
    CHECK(crossings == 2);
  }

  SUBCASE("targets beyond the line maximum have no roots") {
    const auto none = iso_edp_solve(4.0, 10.0, s, ctx);
    CHECK(none.roots.empty());
    CHECK_FALSE(none.diagnostic.empty());
  }

  SUBCASE("retaining legacy") {
    auto abs_ctx = ctx;
    abs_ctx.goal = GoalPolicy::absolute(1.2e6);
    const auto r = iso_edp_solve(4.0, 1.5, s, abs_ctx, false);
    for (const auto& p : r.roots) {
      const auto costs = scenario_costs(s, abs_ctx, p);
      CHECK(max_sustainable_growth(costs, 1.2e6, false).eta == Approx(1.5).epsilon(1e-9));
    }
    CHECK_FALSE(r.roots.empty());
  }
  CHECK_THROWS_AS(iso_edp_solve(0.0, 1.5, s, ctx), InvalidInput);
}

TEST_CASE("design_incentive") {
  const auto s = testing::s0_scenario();
  const auto ctx = testing::s0_context();
  CHECK(design_incentive({2, 2}, {2, 2}, s, ctx).kind == Incentive::Kind::kZero);

  const auto sol = iso_edp_solve(4.0, 1.5, s, ctx);
  const auto inc = design_incentive(sol.roots[0], {2, 2}, s, ctx);
  REQUIRE(inc.kind == Incentive::Kind::kValue);
  CHECK(inc.usd_per_t == Approx(2666.6240876 - 2603.8812785).epsilon(1e-6));

  CHECK(design_incentive({2, 2}, sol.roots[0], s, ctx).kind == Incentive::Kind::kZero);
  CHECK(design_incentive({2, 1}, {2, 2}, s, ctx).kind == Incentive::Kind::kNotSustainable);
}
