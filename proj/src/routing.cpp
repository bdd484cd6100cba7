#include "ngpon/routing.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "ngpon/format.hpp"

namespace ngpon {

LinkSpace::LinkSpace(const Topology& topo)
    : L_(topo.ring_positions), P_(static_cast<int>(topo.cos.size()))
{
    psc_base_ = static_cast<LinkId>(topo.has_ring() ? 2 * L_ : 0);
    up_base_ = psc_base_ + static_cast<LinkId>(P_ * P_);
    down_base_ = up_base_ + static_cast<LinkId>(P_ * 2);
}

DirectedLink LinkSpace::describe(LinkId id) const
{
    DirectedLink d;
    if (id < psc_base_) {
        d.kind = LinkKind::RingHop;
        d.from = static_cast<int>(id / 2);
        d.direction = static_cast<int>(id % 2);
        d.to = ring_head(id);
    } else if (id < up_base_) {
        d.kind = LinkKind::PscIngress;
        d.from = static_cast<int>(id - psc_base_) / P_;
        d.to = static_cast<int>(id - psc_base_) % P_;
    } else if (id < down_base_) {
        d.kind = LinkKind::TreeUp;
        d.from = d.to = static_cast<int>(id - up_base_) / 2;
        d.channel = static_cast<TreeChannel>((id - up_base_) % 2);
    } else {
        d.kind = LinkKind::TreeDown;
        d.from = d.to = static_cast<int>(id - down_base_) / 2;
        d.channel = static_cast<TreeChannel>((id - down_base_) % 2);
    }
    return d;
}

int LinkSpace::ring_head(LinkId id) const
{
    const int pos = static_cast<int>(id / 2);
    return id % 2 == 0 ? (pos + 1) % L_ : (pos + L_ - 1) % L_;
}

std::string LinkSpace::name(LinkId id) const
{
    const DirectedLink d = describe(id);
    const char* ch = d.channel == TreeChannel::Tdm ? "tdm" : "wdm";
    switch (d.kind) {
    case LinkKind::RingHop: return "ring:" + std::to_string(d.from) + ">" + std::to_string(d.to);
    case LinkKind::PscIngress: return "psc:" + std::to_string(d.from) + ">" + std::to_string(d.to);
    case LinkKind::TreeUp: return "up:" + std::to_string(d.from) + ":" + ch;
    case LinkKind::TreeDown: return "down:" + std::to_string(d.from) + ":" + ch;
    }
    return "?";
}

TreeChannel tree_channel(NodeKind k) { return uses_wdm(k) ? TreeChannel::Wdm : TreeChannel::Tdm; }

int RouteTable::ring_distance(int a, int b) const
{
    const int cw = ((b - a) % L_ + L_) % L_;
    return std::min(cw, L_ - cw);
}

namespace {

// All shortest ring walks from a to b (one, or two on a diametric tie).
std::vector<std::vector<LinkId>> ring_legs(const LinkSpace& s, int L, int a, int b)
{
    if (a == b) return {{}};
    const int cw = ((b - a) % L + L) % L;
    const int ccw = L - cw;
    std::vector<std::vector<LinkId>> out;
    auto walk = [&](int dir, int n) {
        std::vector<LinkId> v;
        int p = a;
        for (int h = 0; h < n; ++h) {
            v.push_back(s.ring(p, dir));
            p = dir == 0 ? (p + 1) % L : (p + L - 1) % L;
        }
        out.push_back(std::move(v));
    };
    if (cw <= ccw) walk(0, cw);
    if (ccw <= cw) walk(1, ccw);
    return out;
}

} // namespace

RouteTable::RouteTable(const Topology& topo)
    : topo_(&topo), space_(topo), L_(topo.ring_positions)
{
    paths_.resize(static_cast<std::size_t>(L_ * L_));
    const int P = static_cast<int>(topo.cos.size());
    for (int a = 0; a < L_; ++a) {
        for (int b = 0; b < L_; ++b) {
            if (a == b) continue;
            std::vector<std::vector<LinkId>> cand;
            int best = std::numeric_limits<int>::max();
            auto offer = [&](std::vector<LinkId> links, int hops) {
                if (hops < best) {
                    best = hops;
                    cand.clear();
                }
                if (hops == best) cand.push_back(std::move(links));
            };
            for (auto& leg : ring_legs(space_, L_, a, b)) {
                const int h = static_cast<int>(leg.size());
                offer(std::move(leg), h);
            }
            if (topo.has_psc()) {
                for (int k = 0; k < P; ++k) {
                    const int pk = topo.cos[static_cast<std::size_t>(k)].ring_pos;
                    const int dk = ring_distance(a, pk);
                    if (dk + 1 > best) continue;
                    for (int l = 0; l < P; ++l) {
                        if (l == k) continue;
                        const int pl = topo.cos[static_cast<std::size_t>(l)].ring_pos;
                        const int hops = dk + 1 + ring_distance(pl, b);
                        if (hops > best) continue;
                        for (const auto& first : ring_legs(space_, L_, a, pk))
                            for (const auto& last : ring_legs(space_, L_, pl, b)) {
                                std::vector<LinkId> v = first;
                                v.push_back(space_.psc(k, l));
                                v.insert(v.end(), last.begin(), last.end());
                                offer(std::move(v), hops);
                            }
                    }
                }
            }
            if (cand.empty()) throw ScenarioError("routing: unreachable ring position pair");
            auto& dst = paths_[static_cast<std::size_t>(a * L_ + b)];
            const double p = 1.0 / static_cast<double>(cand.size());
            for (auto& c : cand) dst.push_back(Path{std::move(c), p});
        }
    }
    link_probs_.resize(paths_.size());
    for (std::size_t ab = 0; ab < paths_.size(); ++ab) {
        std::map<LinkId, double> acc;
        for (const auto& p : paths_[ab])
            for (LinkId e : p.links) acc[e] += p.probability;
        link_probs_[ab].assign(acc.begin(), acc.end());
    }
}

std::vector<Path> RouteTable::route(NodeId i, NodeId j) const
{
    if (i == j) throw std::invalid_argument("route: source equals destination");
    const Topology& t = *topo_;
    if (awg_eligible(t, i, j)) throw std::invalid_argument("route: AWG pairs are not ring/PSC routed");
    const Node& a = t.node(i);
    const Node& b = t.node(j);
    std::vector<LinkId> head, tail;
    if (is_onu(a.kind)) head.push_back(space_.tree_up(a.co, tree_channel(a.kind)));
    if (is_onu(b.kind)) tail.push_back(space_.tree_down(b.co, tree_channel(b.kind)));
    std::vector<Path> out;
    if (a.ring_pos == b.ring_pos) {
        Path p;
        p.links = head;
        p.links.insert(p.links.end(), tail.begin(), tail.end());
        out.push_back(std::move(p));
        return out;
    }
    for (const auto& mid : between(a.ring_pos, b.ring_pos)) {
        Path p;
        p.probability = mid.probability;
        p.links = head;
        p.links.insert(p.links.end(), mid.links.begin(), mid.links.end());
        p.links.insert(p.links.end(), tail.begin(), tail.end());
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Path> route(NodeId i, NodeId j, const RouteTable& table) { return table.route(i, j); }

LinkTraversalProbs::LinkTraversalProbs(const RouteTable& table, const TrafficMatrices& m)
    : table_(&table), m_(&m)
{
}

std::vector<std::pair<LinkId, double>> LinkTraversalProbs::links(NodeId i, NodeId j) const
{
    const Topology& t = table_->topology();
    const LinkSpace& s = table_->links();
    const Node& a = t.node(i);
    const Node& b = t.node(j);
    std::vector<std::pair<LinkId, double>> out;
    if (is_onu(a.kind)) out.emplace_back(s.tree_up(a.co, tree_channel(a.kind)), 1.0);
    if (a.ring_pos != b.ring_pos) {
        const auto& mid = table_->link_probs(a.ring_pos, b.ring_pos);
        out.insert(out.end(), mid.begin(), mid.end());
    }
    if (is_onu(b.kind)) out.emplace_back(s.tree_down(b.co, tree_channel(b.kind)), 1.0);
    std::sort(out.begin(), out.end());
    return out;
}

double LinkTraversalProbs::probability(NodeId i, NodeId j, LinkId e) const
{
    for (const auto& [id, p] : links(i, j))
        if (id == e) return p;
    return 0.0;
}

void LinkTraversalProbs::write_csv(std::ostream& os) const
{
    os << "i,j,link,probability\n";
    const auto n = m_->T.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (m_->T(i, j) <= 0) continue;
            for (const auto& [e, p] : links(NodeId{static_cast<std::uint32_t>(i)}, NodeId{static_cast<std::uint32_t>(j)}))
                os << i << ',' << j << ',' << table_->links().name(e) << ',' << fmt_sig(p) << '\n';
        }
}

LinkTraversalProbs traversal_probs(const RouteTable& table, const TrafficMatrices& m)
{
    return LinkTraversalProbs(table, m);
}

} // namespace ngpon
