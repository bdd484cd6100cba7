#include "doctest.h"
#include "gen.hpp"

#include "ngpon/catalog.hpp"
#include "ngpon/routing.hpp"

#include <algorithm>
#include <map>
#include <sstream>

using namespace ngpon;

namespace {

// Follows a metro path from ring position a; returns the final position or -1 on a broken chain.
int walk(const Topology& t, const LinkSpace& s, int a, const Path& p)
{
    int cur = a;
    for (LinkId e : p.links) {
        const DirectedLink d = s.describe(e);
        if (d.kind == LinkKind::RingHop) {
            if (d.from != cur) return -1;
            cur = s.ring_head(e);
        } else if (d.kind == LinkKind::PscIngress) {
            if (t.cos[static_cast<std::size_t>(d.from)].ring_pos != cur) return -1;
            cur = t.cos[static_cast<std::size_t>(d.to)].ring_pos;
        } else {
            return -1;
        }
    }
    return cur;
}

int brute_hops(const Topology& t, const RouteTable& r, int a, int b)
{
    int best = r.ring_distance(a, b);
    if (!t.has_psc()) return best;
    for (const auto& k : t.cos)
        for (const auto& l : t.cos)
            if (k.index != l.index)
                best = std::min(best, r.ring_distance(a, k.ring_pos) + 1 + r.ring_distance(l.ring_pos, b));
    return best;
}

} // namespace

TEST_CASE("property: metro routes are shortest, connected and sum to one")
{
    gen::Gen g(21);
    for (int c = 0; c < 80; ++c) {
        CAPTURE(c);
        const Topology t = build_topology(g.scenario().topology);
        const RouteTable r(t);
        for (int a = 0; a < t.ring_positions; ++a)
            for (int b = 0; b < t.ring_positions; ++b) {
                if (a == b) continue;
                CAPTURE(a);
                CAPTURE(b);
                const auto& paths = r.between(a, b);
                REQUIRE(!paths.empty());
                double sum = 0;
                const int want = brute_hops(t, r, a, b);
                for (const auto& p : paths) {
                    sum += p.probability;
                    CHECK(walk(t, r.links(), a, p) == b);
                    CHECK(static_cast<int>(p.links.size()) == want);
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
                // Link probabilities are the path mass through each link.
                std::map<LinkId, double> mass;
                for (const auto& p : paths)
                    for (LinkId e : p.links) mass[e] += p.probability;
                const auto& lp = r.link_probs(a, b);
                CHECK(lp.size() == mass.size());
                for (const auto& [e, q] : lp) CHECK(q == doctest::Approx(mass[e]).epsilon(1e-12));
            }
    }
}

TEST_CASE("diametric ring pairs split evenly")
{
    Scenario s = appendix_uniform(32, 0, 0);
    s.topology.psc = false;
    const Topology t = build_topology(s.topology);
    const RouteTable r(t);
    const int L = t.ring_positions;
    REQUIRE(L % 2 == 0);
    const auto& paths = r.between(0, L / 2);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].probability == 0.5);
    CHECK(paths[1].probability == 0.5);
}

TEST_CASE("full node routes add tree channels")
{
    const Scenario s = appendix_uniform(16, 8, 8);
    const Topology t = build_topology(s.topology);
    const RouteTable r(t);
    const auto& co0 = t.cos[1];
    const auto& co1 = t.cos[2];
    const NodeId tdm = co0.onus.front();
    const NodeId wdm = co1.onus[16];
    REQUIRE(t.node(wdm).kind == NodeKind::WdmOnu);
    for (const auto& p : r.route(tdm, wdm)) {
        REQUIRE(p.links.size() >= 2);
        const auto first = r.links().describe(p.links.front());
        const auto last = r.links().describe(p.links.back());
        CHECK(first.kind == LinkKind::TreeUp);
        CHECK(first.channel == TreeChannel::Tdm);
        CHECK(last.kind == LinkKind::TreeDown);
        CHECK(last.channel == TreeChannel::Wdm);
    }
}

TEST_CASE("traversal probabilities and their CSV")
{
    const Scenario s = metro_uniform();
    const Topology t = build_topology(s.topology);
    const RouteTable r(t);
    const TrafficMatrices m = generate_traffic(t, s.traffic);
    const auto probs = traversal_probs(r, m);
    for (std::size_t i = 0; i < t.size(); i += 7)
        for (std::size_t j = 0; j < t.size(); j += 5) {
            const NodeId a{static_cast<std::uint32_t>(i)}, b{static_cast<std::uint32_t>(j)};
            for (const auto& [e, q] : probs.links(a, b)) {
                CHECK(q > 0);
                CHECK(q <= 1.0 + 1e-12);
                CHECK(probs.probability(a, b, e) == q);
            }
        }
    std::ostringstream os;
    probs.write_csv(os);
    const std::string csv = os.str();
    CHECK(csv.rfind("i,j,link,probability\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') > 1000);
}
