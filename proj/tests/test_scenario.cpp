#include "doctest.h"
#include "gen.hpp"

#include "ngpon/catalog.hpp"
#include "ngpon/harness.hpp"
#include "ngpon/scenario.hpp"

#include <sstream>

using namespace ngpon;
using nlohmann::json;

namespace {

json base() { return scenario_to_json(metro_uniform()); }

} // namespace

TEST_CASE("builtin scenarios round-trip through JSON")
{
    for (const auto& n : builtin_names()) {
        CAPTURE(n);
        const json a = scenario_to_json(builtin_scenario(n));
        CHECK(scenario_to_json(parse_scenario(a)) == a);
    }
    CHECK_THROWS_AS(builtin_scenario("nope"), ScenarioError);
}

TEST_CASE("property: random scenarios round-trip and rebuild the same capacity")
{
    gen::Gen g(61);
    for (int c = 0; c < 30; ++c) {
        CAPTURE(c);
        Scenario s = g.scenario();
        s.load_fractions = {0.1, 0.5};
        const json a = scenario_to_json(s);
        const Scenario t = parse_scenario(a);
        CHECK(scenario_to_json(t) == a);
        const Instance x(s), y(t);
        CHECK(x.capacity().max_rt_bps == y.capacity().max_rt_bps);
        CHECK(x.load_grid() == y.load_grid());
    }
}

TEST_CASE("minimal scenario uses the defaults")
{
    const Scenario s = parse_scenario(json::parse(R"({"topology": {"onus": [{"tdm": 8}]}})"));
    CHECK(s.topology.cos == 1);
    CHECK(s.mode == CarrierMode::Reflection);
    CHECK(s.lengths.mean_bits() == 6328);
    const Instance inst(s);
    CHECK(inst.capacity().bottleneck_constraint().family == ConstraintFamily::TdmUp);
}

TEST_CASE("invalid scenarios are rejected")
{
    auto rejects = [](const json& j) {
        CHECK_THROWS_AS(
            {
                const Scenario s = parse_scenario(j);
                const Instance inst(s);
            },
            ScenarioError);
    };
    json j = base();
    j["topology"]["bogus"] = 1;
    rejects(j);
    j = base();
    j["extra"] = true;
    rejects(j);
    j = base();
    j["topology"]["cos"] = "four";
    rejects(j);
    j = base();
    j["topology"]["cos"] = 0;
    rejects(j);
    j = base();
    j["topology"]["tdm_bps"] = {1e9, 1e9};
    rejects(j);
    j = base();
    j["mode"] = "sideways";
    rejects(j);
    j = base();
    j["load"] = {{"fractions", {0.5, 0.2}}};
    rejects(j);
    j = base();
    j["traffic"] = {{"kind", "uniform"}, {"sigma_pps", -1.0}};
    rejects(j);
    j = scenario_to_json(single_tree(OnuMix{8, 8, 0}, PonType::Gpon));
    j["mode"] = "empty";
    rejects(j);
    j = scenario_to_json(appendix_nonuniform_dst(0.75));
    j["traffic"]["beta"] = 0.01;
    rejects(j);
}

TEST_CASE("explicit traffic matrices")
{
    json j = json::parse(R"({"topology": {"onus": [{"tdm": 2, "wdm": 1}]},
                             "traffic": {"kind": "matrix", "entries": [[1, 2, 100.0], [2, 3, 50.0]]}})");
    const Instance inst(parse_scenario(j));
    CHECK(inst.pattern().T(1, 2) == 100.0);
    CHECK(inst.pattern().T(2, 3) == 50.0);
    CHECK(inst.pattern().total_pps() == 150.0);
    j["traffic"]["entries"] = json::parse("[[1, 99, 1.0]]");
    CHECK_THROWS_AS(Instance(parse_scenario(j)), ScenarioError);
}

TEST_CASE("load grids")
{
    Scenario s = metro_uniform();
    s.load_fractions = {0.25, 0.5};
    const Instance a(s);
    REQUIRE(a.load_grid().size() == 2);
    CHECK(a.load_grid()[0] == doctest::Approx(0.25 * 28.40625e9).epsilon(1e-12));
    CHECK(a.load_grid()[1] == doctest::Approx(0.5 * 28.40625e9).epsilon(1e-12));
    s.load_fractions.clear();
    s.load_bps = {1e9, 2e9};
    const Instance b(s);
    CHECK(b.load_grid() == std::vector<double>{1e9, 2e9});
    CHECK(b.at_rate(3e9).total_pps() * 6328 == doctest::Approx(3e9).epsilon(1e-12));
}

TEST_CASE("comparison rows skip unstable points and flag tolerance violations")
{
    const Instance inst(single_tree(OnuMix{32, 0, 0}, PonType::Epon));
    SweepOptions opt;
    std::vector<SweepPoint> pts = run_sweep(inst, {0.3e9, 1.2e9}, opt);
    REQUIRE(pts.size() == 2);
    for (auto& p : pts) {
        p.simulated = true;
        ClassStats c;
        c.name = "tdm_up";
        c.mean_s = 1.1 * p.analytic.class_delay("tdm_up");
        c.ci_halfwidth_s = 1e-6;
        p.sim.classes = {c};
    }
    const auto loose = compare_points(pts, {"tdm_up"}, 0.15);
    REQUIRE(loose.size() == 2);
    CHECK_FALSE(loose[0].unstable);
    CHECK(loose[0].pass);
    CHECK(loose[1].unstable);
    CHECK(all_pass(loose));
    const auto tight = compare_points(pts, {"tdm_up"}, 0.05);
    CHECK_FALSE(all_pass(tight));
    std::ostringstream os;
    write_comparison_csv(os, tight);
    CHECK(os.str().rfind("r_T_bps,class,analytic_D_s,simulated_D_s,ci_halfwidth_s,relative_gap,result\n", 0) == 0);
    CHECK(os.str().find(",FAIL\n") != std::string::npos);
    CHECK(os.str().find(",skipped\n") != std::string::npos);
}
