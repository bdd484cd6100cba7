#pragma once

#include "ngpon/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ngpon {

enum class LinkKind : std::uint8_t { RingHop, PscIngress, TreeUp, TreeDown };
enum class TreeChannel : std::uint8_t { Tdm = 0, Wdm = 1 };

using LinkId = std::uint32_t;

struct DirectedLink {
    LinkKind kind = LinkKind::RingHop;
    int from = 0;      // ring position, source CO, or tree CO
    int to = 0;        // ring position or destination CO
    int direction = 0; // ring only: 0 clockwise, 1 counter-clockwise
    TreeChannel channel = TreeChannel::Tdm;
};

// Dense numbering of every directed link: ring hops, PSC ingress (k,l), tree channels.
class LinkSpace {
public:
    explicit LinkSpace(const Topology& topo);

    LinkId ring(int pos, int dir) const { return static_cast<LinkId>(pos * 2 + dir); }
    LinkId psc(int k, int l) const { return psc_base_ + static_cast<LinkId>(k * P_ + l); }
    LinkId tree_up(int k, TreeChannel ch) const { return up_base_ + static_cast<LinkId>(k * 2 + static_cast<int>(ch)); }
    LinkId tree_down(int k, TreeChannel ch) const { return down_base_ + static_cast<LinkId>(k * 2 + static_cast<int>(ch)); }
    std::size_t size() const { return down_base_ + static_cast<std::size_t>(P_) * 2; }
    std::size_t ring_links() const { return psc_base_; }

    DirectedLink describe(LinkId id) const;
    std::string name(LinkId id) const;
    int ring_head(LinkId id) const; // position the ring hop leads to
    bool is_ring(LinkId id) const { return id < psc_base_; }
    bool is_psc(LinkId id) const { return id >= psc_base_ && id < up_base_; }

private:
    int L_, P_;
    LinkId psc_base_, up_base_, down_base_;
};

struct Path {
    std::vector<LinkId> links;
    double probability = 1.0;
};

// Shortest-hop routes between ring positions; a PSC transit counts as one hop,
// equal-hop alternatives share the probability equally.
class RouteTable {
public:
    explicit RouteTable(const Topology& topo);

    const LinkSpace& links() const { return space_; }
    const std::vector<Path>& between(int a, int b) const { return paths_[static_cast<std::size_t>(a * L_ + b)]; }
    // Per-link traversal probability between two positions, sorted by LinkId.
    const std::vector<std::pair<LinkId, double>>& link_probs(int a, int b) const
    {
        return link_probs_[static_cast<std::size_t>(a * L_ + b)];
    }
    int ring_distance(int a, int b) const;
    // Full route for a node pair including tree channels; rejects AWG pairs.
    std::vector<Path> route(NodeId i, NodeId j) const;
    const Topology& topology() const { return *topo_; }

private:
    const Topology* topo_;
    LinkSpace space_;
    int L_;
    std::vector<std::vector<Path>> paths_;
    std::vector<std::vector<std::pair<LinkId, double>>> link_probs_;
};

std::vector<Path> route(NodeId i, NodeId j, const RouteTable& table);
TreeChannel tree_channel(NodeKind k);

class LinkTraversalProbs {
public:
    LinkTraversalProbs(const RouteTable& table, const TrafficMatrices& m);

    double probability(NodeId i, NodeId j, LinkId e) const;
    std::vector<std::pair<LinkId, double>> links(NodeId i, NodeId j) const;
    // CSV `i,j,link,probability` for every pair with positive T.
    void write_csv(std::ostream& os) const;

private:
    const RouteTable* table_;
    const TrafficMatrices* m_;
};

LinkTraversalProbs traversal_probs(const RouteTable& table, const TrafficMatrices& m);

} // namespace ngpon
