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

#include "service.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "balance.hpp"
#include "dse.hpp"
#include "errors.hpp"
#include "procurement.hpp"
#include "trends.hpp"

namespace dcce {

using json = nlohmann::ordered_json;

RequestError::RequestError(std::vector<FieldError> errors)
    : std::invalid_argument(errors.empty() ? "malformed request"
                                           : (errors.front().field.empty() ? "" : errors.front().field + ": ") +
                                                 errors.front().message),
      errors_(std::move(errors)) {}

RequestError::RequestError(std::string field, std::string message)
    : RequestError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Typed access to one request object. Every key read is recorded so that
// finish() can reject the rest.
class Reader {
 public:
  Reader(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw RequestError(path_, "expected an object");
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = value_.find(key);
    if (it == value_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) throw RequestError(field(key), "expected a number");
    return v->get<double>();
  }
  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  std::optional<std::string> string(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) throw RequestError(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_boolean()) throw RequestError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::vector<std::string> strings(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return {};
    if (v->is_string()) return {v->get<std::string>()};
    if (!v->is_array()) throw RequestError(field(key), "expected a list of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) throw RequestError(field(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return {};
    if (v->is_number()) return {v->get<double>()};
    if (!v->is_array()) throw RequestError(field(key), "expected a number or a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) throw RequestError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  std::string field(const std::string& key) const { return join_path(path_, key); }

  void finish() const {
    std::vector<FieldError> unknown;
    for (const auto& [key, _] : value_.items()) {
      if (!seen_.contains(key)) unknown.push_back({join_path(path_, key), "unknown field"});
    }
    if (!unknown.empty()) throw RequestError(std::move(unknown));
  }

 private:
  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json point_json(const DesignPoint& p) { return {{"acceleration", p.acceleration}, {"efficiency", p.efficiency}}; }

json cost_json(const CostBreakdown& c) {
  return {{"opex_usd", c.opex_fin},  {"capex_usd", c.capex_fin},    {"opex_kg", c.opex_cfp},
          {"capex_kg", c.capex_cfp}, {"total_usd", c.total_fin()}, {"total_kg", c.total_cfp()}};
}

json quadrant_json(const Quadrant& q) {
  return {{"viable", q.viable}, {"sustainable", q.sustainable}, {"label", to_string(q.label)}, {"slug", slug(q.label)}};
}

// Tagged incentive. Markers never carry a number in usd_per_t.
json incentive_json(const Incentive& inc) {
  json out = {{"kind", marker(inc.kind)}};
  if (inc.has_value()) out["usd_per_t"] = inc.usd_per_t;
  if (inc.kind == Incentive::Kind::kNotFeasible) out["break_even_usd_per_t"] = inc.break_even_usd_per_t;
  return out;
}

json incentive_number(const Incentive& inc) { return inc.has_value() ? json(inc.usd_per_t) : json(nullptr); }

json growth_json(const GrowthLimit& g) {
  return {{"bounded", g.bounded}, {"eta", g.bounded ? json(g.eta) : json(nullptr)}};
}

json plan_json(const ProcurementPlan& p) {
  return {{"platform_id", p.chosen_platform},
          {"decommission", p.decommission},
          {"device_count", p.device_count},
          {"profit_usd", p.profit},
          {"footprint_kg", p.footprint},
          {"max_growth", growth_json(p.max_growth)},
          {"binding_cap", p.binding_cap ? json(to_string(*p.binding_cap)) : json(nullptr)}};
}

json doubling_json(const DoublingTime& d) {
  return {{"improving", d.improving},
          {"months", d.improving ? json(d.months) : json(nullptr)},
          {"std_months", d.improving ? json(d.std_months) : json(nullptr)},
          {"slope_log2_per_month", d.slope_per_month},
          {"samples", d.samples}};
}

json goal_json(const GoalPolicy& g) {
  if (g.kind == GoalPolicy::Kind::kIsoCarbon) return "iso-carbon";
  return {{"absolute", g.budget_kg}};
}

json platform_json(const PlatformSpec& p) {
  const auto& e = p.embodied;
  return {{"id", p.id},
          {"vendor", p.vendor},
          {"release_date", format_date(p.release_date)},
          {"unit_price_usd", p.unit_price},
          {"tdp_w", p.tdp_w},
          {"n_slots", e.n_slots},
          {"embodied_kg",
           {{"ic", e.ic},
            {"mem", e.mem},
            {"mainboard", e.mainboard},
            {"assembly", e.assembly},
            {"transport", e.transport},
            {"cooling", e.cooling},
            {"server_base", e.server_base}}},
          {"unit_footprint_kg", embodied_unit_footprint(e)}};
}

json context_json(const Context& c) {
  return {{"location", c.location},
          {"ci_kg_per_kwh", c.carbon_intensity},
          {"elec_price_usd_per_kwh", c.elec_price},
          {"pue", c.pue},
          {"carbon_price_op_usd_per_t", c.carbon_price_op_usd_per_t},
          {"carbon_price_ca_usd_per_t", c.carbon_price_ca_usd_per_t},
          {"goal", goal_json(c.goal)},
          {"dc_count", c.dc_count}};
}

// Scenario, candidate and context chosen by a request, after overrides.
struct Selection {
  ScenarioFile file;
  DeploymentScenario scenario;
  Context context;
};

ScenarioFile select_scenario_file(const Dataset& d, Reader& r) {
  const json* v = r.raw("scenario");
  if (v == nullptr) {
    if (d.scenarios.size() == 1) return d.scenarios.front();
    throw RequestError("scenario", d.scenarios.empty() ? "required: the dataset has no scenarios"
                                                       : "required: the dataset has several scenarios");
  }
  if (v->is_string()) {
    try {
      return d.scenario(v->get<std::string>());
    } catch (const NotFound& e) {
      throw RequestError("scenario", e.what());
    }
  }
  if (v->is_object()) {
    try {
      return parse_scenario_json(v->dump(), "inline");
    } catch (const InvalidInput& e) {
      throw RequestError("scenario", e.what());
    }
  }
  throw RequestError("scenario", "expected a scenario id or a scenario object");
}

void apply_scenario_overrides(ScenarioFile& f, Reader& r) {
  const json* v = r.raw("overrides");
  if (v == nullptr) return;
  Reader o(*v, "overrides");
  if (auto x = o.number("demand_growth")) f.demand_growth = *x;
  if (auto x = o.number("lifetime_years")) f.lifetime_years = *x;
  if (auto x = o.number("utilization")) f.utilization = *x;
  if (auto x = o.boolean("decommission")) f.decommission = *x;
  if (auto x = o.number("count")) {
    if (*x != std::floor(*x) || *x < 1) throw RequestError("overrides.count", "expected a positive integer");
    f.count = static_cast<std::int64_t>(*x);
  }
  if (auto x = o.number("gross_income_usd")) {
    f.gross_income_usd = *x;
    f.reference_price_usd_per_hour.reset();
  }
  if (auto x = o.number("reference_price_usd_per_hour")) {
    f.reference_price_usd_per_hour = *x;
    f.gross_income_usd.reset();
  }
  if (auto x = o.string("rounding")) {
    if (*x == "continuous") {
      f.rounding = Rounding::kContinuous;
    } else if (*x == "ceil") {
      f.rounding = Rounding::kCeil;
    } else {
      throw RequestError("overrides.rounding", "expected continuous or ceil");
    }
  }
  o.finish();
}

Context select_context(const Dataset& d, Reader& r) {
  const json* v = r.raw("context");
  Context c;
  if (v == nullptr) {
    if (d.contexts.size() != 1) throw RequestError("context", "required: name a location or pass a context object");
    c = d.contexts.front();
  } else if (v->is_string()) {
    try {
      c = d.context(v->get<std::string>());
    } catch (const NotFound& e) {
      throw RequestError("context", e.what());
    }
  } else if (v->is_object()) {
    try {
      c = parse_context_json(v->dump());
    } catch (const InvalidInput& e) {
      throw RequestError("context", e.what());
    }
  } else {
    throw RequestError("context", "expected a location name or a context object");
  }

  if (const json* ov = r.raw("context_overrides")) {
    Reader o(*ov, "context_overrides");
    if (auto x = o.number("ci_kg_per_kwh")) c.carbon_intensity = *x;
    if (auto x = o.number("elec_price_usd_per_kwh")) c.elec_price = *x;
    if (auto x = o.number("pue")) c.pue = *x;
    if (auto x = o.number("carbon_price_usd_per_t")) {
      c.carbon_price_op_usd_per_t = *x;
      c.carbon_price_ca_usd_per_t = *x;
    }
    if (auto x = o.number("carbon_price_op_usd_per_t")) c.carbon_price_op_usd_per_t = *x;
    if (auto x = o.number("carbon_price_ca_usd_per_t")) c.carbon_price_ca_usd_per_t = *x;
    if (auto x = o.number("absolute_goal_kg")) c.goal = GoalPolicy::absolute(*x);
    o.finish();
  }
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw RequestError("context", e.what());
  }
  return c;
}

Selection select(const Dataset& d, Reader& r, bool with_context = true) {
  Selection s;
  s.file = select_scenario_file(d, r);
  apply_scenario_overrides(s.file, r);
  auto candidate = r.string("candidate").value_or("");
  if (!candidate.empty() &&
      std::find(s.file.candidate_ids.begin(), s.file.candidate_ids.end(), candidate) == s.file.candidate_ids.end()) {
    throw RequestError("candidate", "'" + candidate + "' is not a candidate of scenario '" + s.file.id + "'");
  }
  s.scenario = resolve_scenario(d, s.file, candidate);
  if (with_context) s.context = select_context(d, r);
  return s;
}

json header(std::string_view command, const Selection* s) {
  json out = {{"schema_version", kSchemaVersion}, {"command", command}};
  if (s != nullptr) {
    out["scenario"] = s->scenario.id;
    out["baseline"] = s->scenario.baseline.platform.id;
    out["candidate"] = s->scenario.candidate.id;
    if (!s->context.location.empty()) out["context"] = context_json(s->context);
  }
  return out;
}

}  // namespace

Service::Service(Dataset dataset) : dataset_(std::move(dataset)) {}

const std::vector<std::string>& Service::commands() {
  static const std::vector<std::string> names = {"evaluate", "dse",       "optimize", "trends",   "design",
                                                 "sweep",    "platforms", "contexts", "scenarios"};
  return names;
}

json Service::run(std::string_view command, const json& request) const {
  using Handler = json (Service::*)(const json&) const;
  static const std::map<std::string, Handler, std::less<>> handlers = {
      {"evaluate", &Service::evaluate}, {"dse", &Service::dse},
      {"optimize", &Service::optimize}, {"trends", &Service::trends},
      {"design", &Service::design},     {"sweep", &Service::sweep},
      {"platforms", &Service::platforms}, {"contexts", &Service::contexts},
      {"scenarios", &Service::scenarios},
  };
  auto it = handlers.find(command);
  if (it == handlers.end()) throw NotFound("unknown command '" + std::string(command) + "'");
  const json empty = json::object();
  return (this->*(it->second))(request.is_null() ? empty : request);
}

json Service::evaluate(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  const auto sel = select(dataset_, r);
  r.finish();

  const auto& s = sel.scenario;
  const auto report = assess(s, sel.context);
  const auto priced = scenario_costs(s, sel.context, CarbonPrices::from_context(sel.context));

  json out = header("evaluate", &sel);
  out["inputs"] = {{"lifetime_years", s.lifetime_years},
                   {"demand_growth", s.demand_growth},
                   {"decommission", s.decommission},
                   {"gross_income_usd", s.gross_income},
                   {"baseline_count", s.baseline.count},
                   {"utilization", s.baseline.utilization}};
  out["gains"] = point_json(report.costs.gains);
  out["costs"] = {{"baseline", cost_json(report.costs.baseline)},
                  {"upgrade", cost_json(report.costs.upgrade)},
                  {"grid_kwh", report.costs.grid_kwh},
                  {"new_devices", report.costs.devices},
                  {"unit_footprint_kg", report.costs.unit_footprint_kg}};
  out["quadrant"] = quadrant_json(report.quadrant);
  out["quadrant_incentivized"] = quadrant_json(classify(priced));
  out["required_incentive_usd_per_t"] = incentive_number(report.required_incentive);
  out["required_incentive"] = incentive_json(report.required_incentive);
  out["carbon_goal_kg"] = report.carbon_goal_kg;
  out["max_sustainable_growth"] = {{"upgrade", growth_json(report.max_growth_upgrade)},
                                   {"extend", growth_json(report.max_growth_extend)}};
  out["at_growth"] = {{"eta", report.demand_growth},
                      {"decommission", report.decommission},
                      {"profit_usd", report.profit_at_growth},
                      {"footprint_kg", report.cfp_at_growth},
                      {"within_goal", report.cfp_at_growth <= report.carbon_goal_kg}};
  return out;
}

json Service::dse(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  const auto sel = select(dataset_, r);

  auto etas = r.numbers("eta");
  if (etas.empty()) {
    etas = {1.0};
    if (sel.scenario.demand_growth != 1.0) etas.push_back(sel.scenario.demand_growth);
  }
  const double w = r.number("carbon_price_usd_per_t", sel.context.carbon_price_op_usd_per_t);

  CurveSampling sampling;
  if (const json* v = r.raw("curve")) {
    Reader c(*v, "curve");
    sampling.a_min = c.number("a_min", sampling.a_min);
    sampling.a_max = c.number("a_max", sampling.a_max);
    sampling.points = static_cast<int>(c.number("points", sampling.points));
    c.finish();
  }

  std::optional<GridSpec> grid_spec = GridSpec{};
  if (const json* v = r.raw("grid")) {
    if (v->is_boolean()) {
      if (!v->get<bool>()) grid_spec.reset();
    } else {
      Reader g(*v, "grid");
      grid_spec->a_min = g.number("a_min", grid_spec->a_min);
      grid_spec->a_max = g.number("a_max", grid_spec->a_max);
      grid_spec->e_min = g.number("e_min", grid_spec->e_min);
      grid_spec->e_max = g.number("e_max", grid_spec->e_max);
      if (auto n = g.number("resolution")) grid_spec->a_resolution = grid_spec->e_resolution = static_cast<int>(*n);
      grid_spec->a_resolution = static_cast<int>(g.number("a_resolution", grid_spec->a_resolution));
      grid_spec->e_resolution = static_cast<int>(g.number("e_resolution", grid_spec->e_resolution));
      g.finish();
    }
  }
  const double grid_eta = r.number("grid_eta", *std::max_element(etas.begin(), etas.end()));
  r.finish();

  json out = header("dse", &sel);
  out["gains"] = point_json(equivalent_gains(sel.scenario.workload));
  out["carbon_price_usd_per_t"] = w;
  json curves = json::array();
  for (const auto& c : threshold_curves(sel.scenario, sel.context, etas, w, sampling)) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back({p.acceleration, p.efficiency});
    curves.push_back({{"kind", to_string(c.kind)},
                      {"dimension", c.dimension == CostDimension::kCarbon ? "carbon" : "financial"},
                      {"eta", c.eta},
                      {"incentive_usd_per_t", c.incentive_usd_per_t},
                      {"budget", c.budget},
                      {"empty", c.empty()},
                      {"points", std::move(pts)}});
  }
  out["curves"] = std::move(curves);

  if (grid_spec) {
    const auto grid = evaluate_grid(sel.scenario, sel.context, *grid_spec, grid_eta, w);
    json cost_usd = json::array(), cost_kg = json::array(), viable = json::array(), sustainable = json::array(),
         scalable = json::array(), incentivized = json::array();
    for (const auto& cell : grid.cells) {
      cost_usd.push_back(cell.cost_fin);
      cost_kg.push_back(cell.cost_cfp);
      viable.push_back(cell.viable);
      sustainable.push_back(cell.sustainable);
      scalable.push_back(cell.scalable);
      incentivized.push_back(cell.viable_incentivized);
    }
    out["grid"] = {{"eta", grid.eta},
                   {"incentive_usd_per_t", grid.incentive_usd_per_t},
                   {"layout", "efficiency-major"},
                   {"accelerations", grid.accelerations},
                   {"efficiencies", grid.efficiencies},
                   {"cost_usd", std::move(cost_usd)},
                   {"cost_kg", std::move(cost_kg)},
                   {"viable", std::move(viable)},
                   {"sustainable", std::move(sustainable)},
                   {"scalable", std::move(scalable)},
                   {"viable_incentivized", std::move(incentivized)}};
  } else {
    out["grid"] = nullptr;
  }
  return out;
}

json Service::optimize(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  auto sel = select(dataset_, r);

  auto ids = r.strings("candidates");
  if (!ids.empty()) {
    for (const auto& id : ids) {
      if (std::find_if(dataset_.platforms.begin(), dataset_.platforms.end(),
                       [&](const PlatformSpec& p) { return p.id == id; }) == dataset_.platforms.end()) {
        throw RequestError("candidates", "unknown platform '" + id + "'");
      }
    }
    sel.file.candidate_ids = ids;
  }

  CapPolicy cap;
  if (const json* v = r.raw("cap")) {
    try {
      if (v->is_string()) {
        cap = parse_cap(v->get<std::string>());
      } else if (v->is_object()) {
        Reader c(*v, "cap");
        const auto kind = c.string("kind").value_or("none");
        cap = kind == "absolute" ? CapPolicy::absolute(c.number("budget_kg", 0.0)) : parse_cap(kind);
        c.finish();
        if (cap.kind == CapPolicy::Kind::kAbsoluteCarbon && !(cap.budget_kg > 0.0)) {
          throw InvalidInput("absolute cap needs a positive budget_kg");
        }
      } else {
        throw InvalidInput("expected none|iso-carbon|iso-power|abs:<kg> or {kind, budget_kg}");
      }
    } catch (const InvalidInput& e) {
      throw RequestError("cap", e.what());
    }
  }
  const double eta = r.number("eta", sel.scenario.demand_growth);
  r.finish();

  const auto candidates = resolve_candidates(dataset_, sel.file);
  const auto set = evaluate_options(sel.scenario, candidates, sel.context, eta);

  json out = header("optimize", &sel);
  out.erase("candidate");
  out["candidates"] = sel.file.candidate_ids;
  out["eta"] = eta;
  out["cap"] = {{"kind", to_string(cap.kind)},
                {"budget_kg", cap.kind == CapPolicy::Kind::kAbsoluteCarbon ? json(cap.budget_kg) : json(nullptr)}};
  out["baseline"] = {{"footprint_kg", set.baseline_cfp}, {"power_w", set.baseline_power_w}};

  json options = json::array();
  for (const auto& o : set.options) {
    const auto why = cap_violation(o, set, cap);
    options.push_back({{"platform_id", o.platform_id},
                       {"decommission", o.decommission},
                       {"device_count", o.device_count},
                       {"profit_usd", o.profit},
                       {"footprint_kg", o.footprint},
                       {"power_w", o.power_w},
                       {"max_growth", growth_json(o.max_growth)},
                       {"within_cap", !why.has_value()},
                       {"cap_violation", why ? json(*why) : json(nullptr)}});
  }
  out["options"] = std::move(options);

  try {
    out["plan"] = plan_json(select_plan(set, cap));
  } catch (const NoFeasiblePlan& e) {
    out["plan"] = {{"marker", "no_feasible_plan"}, {"message", e.what()}, {"violations", e.violations()}};
  }

  json pivot;
  try {
    const auto p = pivot_incentive(sel.scenario, candidates, sel.context, eta);
    pivot = {{"status", to_string(p.status)},
             {"usd_per_t", p.status == PivotResult::Status::kFound ? json(p.usd_per_t) : json(nullptr)},
             {"best", p.best ? plan_json(*p.best) : json(nullptr)},
             {"cap_best", p.cap_best ? plan_json(*p.cap_best) : json(nullptr)},
             {"displaced", p.displaced ? plan_json(*p.displaced) : json(nullptr)}};
  } catch (const InvalidInput& e) {
    pivot = {{"status", "not_applicable"}, {"usd_per_t", nullptr}, {"message", e.what()}};
  }
  out["pivot"] = std::move(pivot);
  return out;
}

json Service::trends(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  const auto filter = r.strings("benchmarks");
  const double years = r.number("years_ahead", 4.0);
  r.finish();
  if (!(years >= 0.0)) throw RequestError("years_ahead", "must be non-negative");

  const auto records = dataset_.trend_records();
  std::set<std::string> known;
  for (const auto& rec : records) known.insert(rec.benchmark);
  for (const auto& name : filter) {
    if (!known.contains(name)) throw RequestError("benchmarks", "unknown benchmark '" + name + "'");
  }

  const auto fits = fit_trends(records, filter);
  json rows = json::array();
  for (const auto& f : fits) {
    json row = {{"benchmark", f.benchmark}, {"ok", f.ok()}, {"error", f.ok() ? json(nullptr) : json(f.error)}};
    if (f.ok()) {
      row["perf"] = doubling_json(f.perf);
      row["eff"] = doubling_json(f.eff);
      row["shift"] = f.shift ? json{{"perf_months", f.shift->perf_shift_months},
                                    {"eff_months", f.shift->eff_shift_months}}
                             : json(nullptr);
      json projection = nullptr;
      if (f.perf.improving && f.eff.improving) {
        try {
          projection = {
              {"top_performance", point_json(project_trend_point(f.rates(), years, FrontierMode::kTopPerformance))}};
          if (f.shift) {
            projection["top_efficiency"] =
                point_json(project_trend_point(f.rates(), years, FrontierMode::kTopEfficiency));
          }
        } catch (const InvalidInput&) {
          projection = nullptr;
        }
      }
      row["projection"] = std::move(projection);
    }
    rows.push_back(std::move(row));
  }

  json out = header("trends", nullptr);
  out["years_ahead"] = years;
  out["fits"] = std::move(rows);
  out["efficiency_lag_percent"] = efficiency_lag(fits);
  return out;
}

json Service::design(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  const auto sel = select(dataset_, r);
  const auto k_request = r.number("k");
  const auto eta_request = r.number("eta_target");

  DesignPoint trend = equivalent_gains(sel.scenario.workload);
  std::string trend_source = "scenario";
  if (const json* v = r.raw("trend")) {
    Reader t(*v, "trend");
    const auto benchmark = t.string("benchmark");
    const double years = t.number("years_ahead", sel.scenario.lifetime_years);
    const auto mode_name = t.string("frontier").value_or("top-performance");
    t.finish();
    if (!benchmark) throw RequestError("trend.benchmark", "required");
    const auto mode = parse_frontier_mode(mode_name);
    if (!mode) throw RequestError("trend.frontier", "expected top-performance or top-efficiency");
    const auto fits = fit_trends(dataset_.trend_records(), {*benchmark});
    if (fits.empty()) throw RequestError("trend.benchmark", "unknown benchmark '" + *benchmark + "'");
    if (!fits.front().ok()) throw RequestError("trend.benchmark", fits.front().error);
    try {
      trend = project_trend_point(fits.front().rates(), years, *mode);
    } catch (const InvalidInput& e) {
      throw RequestError("trend", e.what());
    }
    trend_source = "trend:" + *benchmark;
  }
  r.finish();

  const double k = k_request.value_or(trend.acceleration * trend.efficiency);
  if (!(k > 0.0)) throw RequestError("k", "must be positive");

  struct Row {
    std::string label;
    double eta;
    const DesignTarget* reference;
  };
  std::vector<Row> targets;
  if (eta_request) {
    targets.push_back({"requested", *eta_request, nullptr});
  } else if (!dataset_.design_targets.empty()) {
    for (const auto& t : dataset_.design_targets) targets.push_back({t.label, t.demand_growth, &t});
  } else {
    targets.push_back({"scenario", sel.scenario.demand_growth, nullptr});
  }

  const auto& s = sel.scenario;
  const auto trend_costs = scenario_costs(s, sel.context, trend);
  const auto trend_limit = max_sustainable_growth(trend_costs, carbon_goal(trend_costs, sel.context), s.decommission);

  json rows = json::array();
  for (const auto& t : targets) {
    if (!(t.eta >= 1.0)) throw RequestError("eta_target", "must be at least 1");
    json row = {{"label", t.label}, {"eta_target", t.eta}};
    const bool trend_suffices = !trend_limit.bounded || t.eta <= trend_limit.eta;
    if (trend_suffices) {
      row["status"] = "trend_suffices";
      row["roots"] = json::array();
      row["max_eta_on_line"] = nullptr;
      row["design"] = point_json(trend);
      row["design_incentive"] = incentive_json(Incentive::zero());
      row["design_incentive_usd_per_t"] = 0.0;
    } else {
      const auto sol = iso_edp_solve(k, t.eta, s, sel.context, s.decommission);
      json roots = json::array();
      std::optional<std::size_t> best;
      std::vector<Incentive> incentives;
      for (std::size_t i = 0; i < sol.roots.size(); ++i) {
        incentives.push_back(design_incentive(sol.roots[i], trend, s, sel.context));
        json root = point_json(sol.roots[i]);
        root["design_incentive"] = incentive_json(incentives.back());
        root["design_incentive_usd_per_t"] = incentive_number(incentives.back());
        roots.push_back(std::move(root));
        if (incentives.back().has_value() &&
            (!best || incentives.back().usd_per_t < incentives[*best].usd_per_t)) {
          best = i;
        }
      }
      row["status"] = sol.roots.empty() ? "unreachable" : "solved";
      row["roots"] = std::move(roots);
      row["max_eta_on_line"] = nullable(sol.max_eta);
      if (!sol.diagnostic.empty()) row["diagnostic"] = sol.diagnostic;
      if (best) {
        row["design"] = point_json(sol.roots[*best]);
        row["design_incentive"] = incentive_json(incentives[*best]);
        row["design_incentive_usd_per_t"] = incentives[*best].usd_per_t;
      } else {
        row["design"] = sol.roots.empty() ? json(nullptr) : point_json(sol.roots.front());
        row["design_incentive"] =
            sol.roots.empty() ? json{{"kind", "unreachable"}} : incentive_json(Incentive::not_sustainable());
        row["design_incentive_usd_per_t"] = nullptr;
      }
    }
    if (t.reference != nullptr) {
      row["reference"] = {{"acceleration", t.reference->acceleration},
                          {"efficiency", t.reference->efficiency},
                          {"edp_product", t.reference->acceleration * t.reference->efficiency},
                          {"design_incentive_usd_per_t", nullable(t.reference->design_incentive_usd_per_t)}};
    } else {
      row["reference"] = nullptr;
    }
    rows.push_back(std::move(row));
  }

  json out = header("design", &sel);
  out["k"] = k;
  out["trend"] = point_json(trend);
  out["trend_source"] = trend_source;
  out["trend_max_growth"] = growth_json(trend_limit);
  out["rows"] = std::move(rows);
  return out;
}

json Service::sweep(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  const auto sel = select(dataset_, r, false);
  const double eta = r.number("eta_target", sel.scenario.demand_growth);
  const auto wanted = r.strings("locations");
  r.finish();
  if (!(eta > 0.0)) throw RequestError("eta_target", "must be positive");

  std::vector<Context> contexts;
  for (const auto& name : wanted) {
    try {
      contexts.push_back(dataset_.context(name));
    } catch (const NotFound& e) {
      throw RequestError("locations", e.what());
    }
  }
  if (wanted.empty()) contexts = dataset_.contexts;
  if (contexts.empty()) throw RequestError("locations", "the dataset has no contexts");

  json rows = json::array();
  for (const auto& o : sweep_locations(sel.scenario, contexts, eta)) {
    json row = {{"location", o.location}, {"ci_kg_per_kwh", o.current_ci}, {"dc_count", o.dc_weight}};
    if (!o.error.empty()) {
      row["error"] = o.error;
    } else {
      row["error"] = nullptr;
      row["quadrant"] = quadrant_json(o.quadrant);
      row["required_incentive_usd_per_t"] = incentive_number(o.required_incentive);
      row["required_incentive"] = incentive_json(o.required_incentive);
      row["max_growth"] = growth_json(o.max_growth);
      row["required_ci"] = {
          {"status", to_string(o.required_ci.status)},
          {"ci_kg_per_kwh",
           o.required_ci.status == GridCiResult::Status::kUnreachable ? json(nullptr) : json(o.required_ci.ci)}};
    }
    rows.push_back(std::move(row));
  }

  json out = header("sweep", &sel);
  out["eta_target"] = eta;
  out["decommission"] = sel.scenario.decommission;
  out["locations"] = std::move(rows);
  return out;
}

json Service::platforms(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  r.finish();
  json out = header("platforms", nullptr);
  out["platforms"] = json::array();
  for (const auto& p : dataset_.platforms) out["platforms"].push_back(platform_json(p));
  return out;
}

json Service::contexts(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  r.finish();
  json out = header("contexts", nullptr);
  out["contexts"] = json::array();
  for (const auto& c : dataset_.contexts) out["contexts"].push_back(context_json(c));
  return out;
}

json Service::scenarios(const json& request) const {
  Reader r(request, "");
  r.raw("seed");
  r.finish();
  json out = header("scenarios", nullptr);
  out["scenarios"] = json::array();
  for (const auto& s : dataset_.scenarios) {
    json workload = json::array();
    for (const auto& w : s.workload) {
      json entry = {{"app", w.app}, {"weight", w.weight}};
      entry["synthetic"] = w.synthetic ? point_json(*w.synthetic) : json(nullptr);
      workload.push_back(std::move(entry));
    }
    out["scenarios"].push_back({{"id", s.id},
                                {"baseline_platform_id", s.baseline_platform_id},
                                {"count", s.count},
                                {"utilization", s.utilization},
                                {"candidate_ids", s.candidate_ids},
                                {"lifetime_years", s.lifetime_years},
                                {"demand_growth", s.demand_growth},
                                {"decommission", s.decommission},
                                {"gross_income_usd", nullable(s.gross_income_usd)},
                                {"reference_price_usd_per_hour", nullable(s.reference_price_usd_per_hour)},
                                {"workload", std::move(workload)}});
  }
  return out;
}

std::string render_json(const json& value) { return value.dump(2) + "\n"; }

json error_body(std::string_view type, std::string_view message, const std::vector<FieldError>& fields) {
  json diagnostics = json::array();
  for (const auto& f : fields) diagnostics.push_back({{"field", f.field}, {"message", f.message}});
  return {{"schema_version", kSchemaVersion},
          {"error", {{"type", type}, {"message", message}, {"diagnostics", std::move(diagnostics)}}}};
}

}  // namespace dcce
