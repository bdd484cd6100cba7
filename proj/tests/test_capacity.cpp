#include "doctest.h"
#include "gen.hpp"

#include "ngpon/capacity.hpp"
#include "ngpon/catalog.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace ngpon;

namespace {

void same(const std::vector<double>& a, const std::vector<double>& b)
{
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

} // namespace

TEST_CASE("property: parallel load kernel matches the serial reference")
{
    gen::Gen g(31);
    for (int c = 0; c < 40; ++c) {
        CAPTURE(c);
        const Scenario s = g.scenario();
        const Topology t = build_topology(s.topology);
        const RouteTable r(t);
        const TrafficMatrices m = generate_traffic(t, s.traffic);
        const LoadReport a = channel_loads(r, m, 6328);
        const LoadReport b = channel_loads_parallel(r, m, 6328);
        same(a.tdm_up, b.tdm_up);
        same(a.wdm_up, b.wdm_up);
        same(a.tdm_down, b.tdm_down);
        same(a.wdm_down, b.wdm_down);
        same(a.psc, b.psc);
        same(a.ring, b.ring);
        same(a.awg, b.awg);
        same(a.onu_up, b.onu_up);
        same(a.onu_awg, b.onu_awg);
        CHECK(a.r_T_bps == doctest::Approx(b.r_T_bps).epsilon(1e-12));
    }
}

TEST_CASE("property: bounds do not depend on the pattern's scale")
{
    gen::Gen g(32);
    for (int c = 0; c < 40; ++c) {
        CAPTURE(c);
        const Scenario s = g.scenario();
        const Topology t = build_topology(s.topology);
        const RouteTable r(t);
        TrafficMatrices m = generate_traffic(t, s.traffic);
        const CapacityReport a = constraint_bounds(r, m, 6328, s.mode);
        m.scale(g.real(0.01, 100));
        const CapacityReport b = constraint_bounds(r, m, 6328, s.mode);
        REQUIRE(a.constraints.size() == b.constraints.size());
        for (std::size_t i = 0; i < a.constraints.size(); ++i)
            CHECK(a.constraints[i].bound_bps == doctest::Approx(b.constraints[i].bound_bps).epsilon(1e-12));
        CHECK(a.bottleneck == b.bottleneck);
    }
}

TEST_CASE("property: the bottleneck is the tightest bound and scales to capacity")
{
    gen::Gen g(33);
    for (int c = 0; c < 40; ++c) {
        CAPTURE(c);
        const Scenario s = g.scenario();
        const Instance inst(s);
        const CapacityReport& rep = inst.capacity();
        REQUIRE(rep.bottleneck >= 0);
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& b : rep.constraints) {
            lo = std::min(lo, b.bound_bps);
            // At r_T = bound the constraint's load equals its capacity.
            CHECK(b.load_bps / rep.pattern_rt_bps * b.bound_bps == doctest::Approx(b.capacity_bps).epsilon(1e-12));
        }
        CHECK(rep.max_rt_bps == lo);
        CHECK(rep.bottleneck_constraint().bound_bps == lo);
        // First constraint at the minimum wins.
        for (int i = 0; i < rep.bottleneck; ++i)
            CHECK(rep.constraints[static_cast<std::size_t>(i)].bound_bps > lo * (1 + 1e-12));
    }
}

TEST_CASE("property: upstream tree loads equal the ONUs' non-AWG traffic")
{
    gen::Gen g(34);
    for (int c = 0; c < 30; ++c) {
        CAPTURE(c);
        const Scenario s = g.scenario();
        const Topology t = build_topology(s.topology);
        const RouteTable r(t);
        const TrafficMatrices m = generate_traffic(t, s.traffic);
        const LoadReport l = channel_loads(r, m, 6328);
        for (const auto& co : t.cos) {
            double up = 0;
            for (NodeId o : co.onus) up += m.T.row_sum(o.v) * 6328;
            CHECK(l.tdm_up[static_cast<std::size_t>(co.index)] + l.wdm_up[static_cast<std::size_t>(co.index)] ==
                  doctest::Approx(up).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: empty carrier halves the WDM bound on symmetric trees")
{
    gen::Gen g(35);
    for (int c = 0; c < 40; ++c) {
        CAPTURE(c);
        OnuMix mix = g.mix(16);
        if (mix.wdm + mix.lr == 0) mix.wdm = 1;
        Scenario s = single_tree(mix, PonType::Epon);
        s.topology.wdm_channels = {g.integer(1, 4)};
        const Instance refl(s);
        s.mode = CarrierMode::EmptyCarrier;
        const Instance empty(s);
        CHECK(empty.capacity().family_min(ConstraintFamily::WdmEmpty) ==
              doctest::Approx(0.5 * refl.capacity().family_min(ConstraintFamily::WdmUp)).epsilon(1e-12));
    }
    Scenario m = metro_uniform();
    const Instance refl(m);
    m.mode = CarrierMode::EmptyCarrier;
    const Instance empty(m);
    CHECK(empty.capacity().family_min(ConstraintFamily::WdmEmpty) ==
          doctest::Approx(0.5 * refl.capacity().family_min(ConstraintFamily::WdmUp)).epsilon(1e-12));
}

TEST_CASE("capacity CSV")
{
    const Instance inst(metro_uniform());
    std::ostringstream os;
    write_capacity_csv(os, inst.capacity());
    const std::string csv = os.str();
    CHECK(csv.rfind("constraint,bound_bps,binding\n", 0) == 0);
    CHECK(csv.find("wdm_up[0],2.840625e+10,1\n") != std::string::npos);
}
