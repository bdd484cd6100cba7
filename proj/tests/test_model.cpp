#include "doctest.h"
#include "gen.hpp"

#include "ngpon/catalog.hpp"
#include "ngpon/model.hpp"

#include <cmath>

using namespace ngpon;

TEST_CASE("appendix layout")
{
    const Topology t = build_topology(appendix_uniform(16, 8, 8).topology);
    CHECK(t.cos.size() == 4);
    CHECK(t.ring_positions == 16);
    // Hotspot CO has no tree; three plain COs with 32 ONUs each.
    CHECK(t.eta() == 3 * 32 + 12 + 1);
    CHECK(t.eta_lh() == 3 * 8 + 1);
    int hotspots = 0;
    for (const auto& co : t.cos) {
        hotspots += co.hotspot;
        CHECK(t.co_at_pos[static_cast<std::size_t>(co.ring_pos)] == co.index);
        if (!co.hotspot) CHECK(co.onus.size() == 32);
    }
    CHECK(hotspots == 1);
    // Node ids: COs first, then ring nodes.
    CHECK(t.node(NodeId{0}).kind != NodeKind::RingNode);
    CHECK(t.node(NodeId{4}).kind == NodeKind::RingNode);
}

TEST_CASE("packet length distributions")
{
    const auto f = PacketLengthDist::fixed_bits(8000);
    CHECK(f.deterministic());
    CHECK(f.mean_bits() == 8000);
    CHECK(f.variance_bits2() == 0);
    const auto u = PacketLengthDist::uniform_bytes(100, 100);
    CHECK(u.mean_bits() == 800);
    CHECK(u.variance_bits2() == 0);
    std::mt19937_64 rng(3);
    const auto e = PacketLengthDist::ethernet();
    for (int i = 0; i < 1000; ++i) {
        const auto b = e.sample_bits(rng);
        CHECK(b % 8 == 0);
        CHECK(b >= 512);
        CHECK(b <= 12144);
    }
}

TEST_CASE("property: node rates follow the source weights")
{
    gen::Gen g(11);
    for (int c = 0; c < 60; ++c) {
        CAPTURE(c);
        const Scenario s = g.scenario();
        const Topology t = build_topology(s.topology);
        const TrafficMatrices m = generate_traffic(t, s.traffic);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const NodeId id{static_cast<std::uint32_t>(i)};
            const double row = m.T.row_sum(i) + m.TA.row_sum(i);
            const double want = t.generates_traffic(id) ? s.traffic.sigma_pps * rate_weight(t, s.traffic, id) : 0.0;
            CHECK(row == doctest::Approx(want).epsilon(1e-12));
            CHECK(m.T(i, i) == 0);
            CHECK(m.TA(i, i) == 0);
            for (std::size_t j = 0; j < t.size(); ++j) {
                const NodeId jd{static_cast<std::uint32_t>(j)};
                if (m.TA(i, j) > 0) CHECK(awg_eligible(t, id, jd));
                if (awg_eligible(t, id, jd)) CHECK(m.T(i, j) == 0);
            }
        }
    }
}

TEST_CASE("property: beta redirects LR and hotspot traffic")
{
    gen::Gen g(12);
    for (int c = 0; c < 30; ++c) {
        CAPTURE(c);
        Scenario s = appendix_nonuniform_dst(0.75);
        s.topology.onus = {OnuMix{g.integer(1, 8), g.integer(0, 8), g.integer(1, 8)}};
        const int n = s.topology.onus[0].total();
        s.topology.onus_per_pon = 0;
        s.traffic.n_low = g.integer(0, n);
        s.traffic.n_med = g.integer(0, n - s.traffic.n_low);
        s.traffic.n_high = n - s.traffic.n_low - s.traffic.n_med;
        const Topology t = build_topology(s.topology);
        const double lo = (t.eta_lh() - 1.0) / (t.eta() - 1.0);
        s.traffic.beta = g.real(lo, 1.0);
        const TrafficMatrices m = generate_traffic(t, s.traffic);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!is_lr_or_hotspot(t.nodes[i].kind)) continue;
            double to_lh = 0, all = 0;
            for (std::size_t j = 0; j < t.size(); ++j) {
                const double x = m.T(i, j) + m.TA(i, j);
                all += x;
                if (is_lr_or_hotspot(t.nodes[j].kind)) to_lh += x;
            }
            CHECK(to_lh / all == doctest::Approx(s.traffic.beta).epsilon(1e-12));
        }
    }
}

TEST_CASE("beta at its lower bound equals source-only non-uniformity")
{
    Scenario s = appendix_nonuniform_dst(0.75);
    const Topology t = build_topology(s.topology);
    s.traffic.beta = (t.eta_lh() - 1.0) / (t.eta() - 1.0);
    const TrafficMatrices a = generate_traffic(t, s.traffic);
    s.traffic.kind = TrafficKind::NonuniformSrc;
    const TrafficMatrices b = generate_traffic(t, s.traffic);
    for (std::size_t k = 0; k < a.T.data().size(); ++k) {
        CHECK(a.T.data()[k] == doctest::Approx(b.T.data()[k]).epsilon(1e-12));
        CHECK(a.TA.data()[k] == doctest::Approx(b.TA.data()[k]).epsilon(1e-12));
    }
}

TEST_CASE("beta below its bound is rejected")
{
    Scenario s = appendix_nonuniform_dst(0.75);
    const Topology t = build_topology(s.topology);
    s.traffic.beta = 0.5 * (t.eta_lh() - 1.0) / (t.eta() - 1.0);
    CHECK_THROWS_AS(generate_traffic(t, s.traffic), ScenarioError);
}

TEST_CASE("aggregate rate equals total packets times mean length")
{
    const Scenario s = appendix_uniform(16, 8, 8);
    const Topology t = build_topology(s.topology);
    const TrafficMatrices m = generate_traffic(t, s.traffic);
    const auto agg = aggregate_rates(t, m, 6328);
    CHECK(agg.r_T_bps == doctest::Approx(m.total_pps() * 6328).epsilon(1e-12));
    CHECK(total_rate_bps(m, 6328) == doctest::Approx(agg.r_T_bps).epsilon(1e-12));
    // Ring-position aggregates cover exactly the ring-routed traffic between distinct positions.
    double cross = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            if (t.nodes[i].ring_pos != t.nodes[j].ring_pos) cross += m.T(i, j);
    CHECK(agg.sigma_pos.total() == doctest::Approx(cross).epsilon(1e-12));
}
