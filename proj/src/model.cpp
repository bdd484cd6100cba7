#include "ngpon/model.hpp"

#include <cmath>
#include <numeric>

namespace ngpon {

const char* to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::PlainCo: return "co";
    case NodeKind::HotspotCo: return "hotspot";
    case NodeKind::RingNode: return "ring";
    case NodeKind::TdmOnu: return "tdm_onu";
    case NodeKind::WdmOnu: return "wdm_onu";
    case NodeKind::LrOnu: return "lr_onu";
    }
    return "?";
}

const char* to_string(PonType p) { return p == PonType::Epon ? "epon" : "gpon"; }

PacketLengthDist::PacketLengthDist(std::uint32_t lo, std::uint32_t hi, std::uint32_t step)
    : lo_(lo), hi_(hi), step_(step)
{
    const double n = static_cast<double>(hi - lo) + 1.0;
    mean_ = 0.5 * (static_cast<double>(lo) + static_cast<double>(hi)) * step;
    var_ = (n * n - 1.0) / 12.0 * static_cast<double>(step) * static_cast<double>(step);
}

PacketLengthDist PacketLengthDist::uniform_bytes(std::uint32_t min_bytes, std::uint32_t max_bytes)
{
    if (min_bytes == 0 || max_bytes < min_bytes)
        throw ScenarioError("packet_length: need 0 < min_bytes <= max_bytes");
    return PacketLengthDist(min_bytes, max_bytes, 8);
}

PacketLengthDist PacketLengthDist::fixed_bits(std::uint32_t bits)
{
    if (bits == 0) throw ScenarioError("packet_length: bits must be positive");
    return PacketLengthDist(bits, bits, 1);
}

namespace {

template <class T>
T per_co(const std::vector<T>& v, int k, const char* name)
{
    if (v.size() == 1) return v[0];
    if (v.empty() || static_cast<int>(v.size()) <= k)
        throw ScenarioError(std::string("topology: ") + name + " needs 1 or P entries");
    return v[static_cast<std::size_t>(k)];
}

} // namespace

int Topology::eta() const
{
    int n = 0;
    for (const auto& nd : nodes)
        if (nd.kind != NodeKind::PlainCo) ++n;
    return n;
}

int Topology::eta_lh() const
{
    int n = 0;
    for (const auto& nd : nodes)
        if (is_lr_or_hotspot(nd.kind)) ++n;
    return n;
}

bool Topology::has_awg() const
{
    for (int c : awg_channel_count)
        if (c > 0) return true;
    return false;
}

double Topology::hop_prop_s() const
{
    if (ring_positions <= 1) return 0.0;
    return params.ring_circumference_m / ring_positions / params.light_speed_mps;
}

Topology build_topology(const TopologyParams& p)
{
    if (p.cos < 1) throw ScenarioError("topology: need at least one CO");
    if (p.hotspots < 0 || p.hotspots > p.cos) throw ScenarioError("topology: hotspots must be in [0, P]");
    if (p.ring_nodes < 0) throw ScenarioError("topology: ring_nodes must be >= 0");
    if (p.cos == 1 && p.ring_nodes > 0) throw ScenarioError("topology: a ring needs at least two COs");
    if (p.gpon_frame_s <= 0) throw ScenarioError("topology: GPON frame length must be positive");
    if (p.gpon_offset_s < 0 || p.gpon_offset_s >= p.gpon_frame_s)
        throw ScenarioError("topology: GPON offset must lie in [0, frame)");
    if (p.tree_prop_s < 0 || p.psc_prop_s < 0 || p.awg_prop_s < 0 || p.psc_frame_s < 0)
        throw ScenarioError("topology: propagation delays must be >= 0");
    if (p.psc_bps <= 0 || p.awg_bps <= 0 || p.ring_bps <= 0 || p.light_speed_mps <= 0)
        throw ScenarioError("topology: channel rates must be positive");

    Topology t;
    t.params = p;
    const int P = p.cos;
    const int plain = P - p.hotspots;
    if (plain > 0 && p.onus.size() != 1 && static_cast<int>(p.onus.size()) != plain)
        throw ScenarioError("topology: onus needs 1 or P-H entries");

    t.ring_positions = P + p.ring_nodes;
    const int L = t.ring_positions;
    t.co_at_pos.assign(static_cast<std::size_t>(L), -1);
    t.node_at_pos.assign(static_cast<std::size_t>(L), NodeId{});

    t.cos.resize(static_cast<std::size_t>(P));
    for (int k = 0; k < P; ++k) {
        auto& co = t.cos[static_cast<std::size_t>(k)];
        co.index = k;
        co.hotspot = k >= plain;
        co.ring_pos = static_cast<int>((static_cast<long long>(k) * L) / P);
        co.node = NodeId{static_cast<std::uint32_t>(k)};
        co.tdm_bps = per_co(p.tdm_bps, k, "tdm_bps");
        co.wdm_bps = per_co(p.wdm_bps, k, "wdm_bps");
        co.wdm_channels = per_co(p.wdm_channels, k, "wdm_channels");
        co.home_channels = per_co(p.home_channels, k, "home_channels");
        if (co.tdm_bps <= 0) throw ScenarioError("topology: tdm_bps must be positive");
        if (co.wdm_channels < 0 || co.wdm_bps < 0) throw ScenarioError("topology: WDM parameters must be >= 0");
        if (co.home_channels < 1) throw ScenarioError("topology: home_channels must be >= 1");
        if (!co.hotspot) {
            co.mix = p.onus.size() == 1 ? p.onus[0] : p.onus[static_cast<std::size_t>(k)];
            if (co.mix.tdm < 0 || co.mix.wdm < 0 || co.mix.lr < 0)
                throw ScenarioError("topology: ONU counts must be >= 0");
            if (p.onus_per_pon > 0 && co.mix.total() != p.onus_per_pon)
                throw ScenarioError("topology: N_T + N_W + N_L must equal N at every CO");
        }
        t.co_at_pos[static_cast<std::size_t>(co.ring_pos)] = k;
        t.nodes.push_back(Node{co.node, co.hotspot ? NodeKind::HotspotCo : NodeKind::PlainCo, k, co.ring_pos, 0});
        t.node_at_pos[static_cast<std::size_t>(co.ring_pos)] = co.node;
    }
    for (int pos = 0; pos < L; ++pos) {
        if (t.co_at_pos[static_cast<std::size_t>(pos)] >= 0) continue;
        NodeId id{static_cast<std::uint32_t>(t.nodes.size())};
        t.nodes.push_back(Node{id, NodeKind::RingNode, -1, pos, 0});
        t.node_at_pos[static_cast<std::size_t>(pos)] = id;
    }
    for (auto& co : t.cos) {
        if (co.hotspot) continue;
        int local = 0;
        auto add = [&](NodeKind kind, int n) {
            for (int i = 0; i < n; ++i) {
                NodeId id{static_cast<std::uint32_t>(t.nodes.size())};
                t.nodes.push_back(Node{id, kind, co.index, co.ring_pos, local++});
                co.onus.push_back(id);
            }
        };
        add(NodeKind::TdmOnu, co.mix.tdm);
        add(NodeKind::WdmOnu, co.mix.wdm);
        add(NodeKind::LrOnu, co.mix.lr);
    }

    const auto PP = static_cast<std::size_t>(P) * static_cast<std::size_t>(P);
    if (p.awg_channels.empty())
        t.awg_channel_count.assign(PP, 0);
    else if (p.awg_channels.size() == 1)
        t.awg_channel_count.assign(PP, p.awg_channels[0]);
    else if (p.awg_channels.size() == PP)
        t.awg_channel_count = p.awg_channels;
    else
        throw ScenarioError("topology: awg_channels needs 1 or P*P entries");
    for (int c : t.awg_channel_count)
        if (c < 0) throw ScenarioError("topology: awg_channels must be >= 0");

    if (t.eta() < 2) throw ScenarioError("topology: need at least two traffic nodes");
    return t;
}

double RateMatrix::row_sum(std::size_t i) const
{
    return std::accumulate(a_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                           a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_), 0.0);
}

double RateMatrix::total() const { return std::accumulate(a_.begin(), a_.end(), 0.0); }

void RateMatrix::scale(double f)
{
    for (auto& x : a_) x *= f;
}

double rate_weight(const Topology& topo, const TrafficSpec& spec, NodeId i)
{
    const Node& n = topo.node(i);
    if (n.kind == NodeKind::PlainCo) return 0.0;
    if (spec.kind == TrafficKind::Uniform || spec.kind == TrafficKind::Matrix) return 1.0;
    switch (n.kind) {
    case NodeKind::RingNode: return 1.0;
    case NodeKind::HotspotCo: return spec.alpha;
    default:
        if (n.local < spec.n_low) return 1.0 / spec.alpha;
        if (n.local < spec.n_low + spec.n_med) return 1.0;
        return spec.alpha;
    }
}

double equivalent_medium_nodes(const Topology& topo, const TrafficSpec& spec)
{
    double s = 0;
    for (const auto& n : topo.nodes) s += rate_weight(topo, spec, n.id);
    return s;
}

bool awg_eligible(const Topology& topo, NodeId i, NodeId j)
{
    const Node& a = topo.node(i);
    const Node& b = topo.node(j);
    if (i == j || !is_lr_or_hotspot(a.kind) || !is_lr_or_hotspot(b.kind)) return false;
    return topo.awg_channels(a.co, b.co) > 0;
}

namespace {

void validate_spec(const Topology& topo, const TrafficSpec& spec)
{
    if (spec.kind == TrafficKind::Matrix) return;
    if (!(spec.sigma_pps > 0)) throw ScenarioError("traffic: sigma must be positive");
    if (spec.kind == TrafficKind::Uniform) return;
    if (!(spec.alpha > 0)) throw ScenarioError("traffic: alpha must be positive");
    if (spec.n_low < 0 || spec.n_med < 0 || spec.n_high < 0)
        throw ScenarioError("traffic: rate group sizes must be >= 0");
    for (const auto& co : topo.cos)
        if (!co.hotspot && spec.n_low + spec.n_med + spec.n_high != co.mix.total())
            throw ScenarioError("traffic: N_l + N_m + N_h must equal N");
    if (spec.kind != TrafficKind::NonuniformSrcDst) return;
    const double eta = topo.eta();
    const double lh = topo.eta_lh();
    if (lh < 2) throw ScenarioError("traffic: beta traffic needs at least two LR/hotspot nodes");
    const double lo = (lh - 1.0) / (eta - 1.0);
    if (spec.beta < lo * (1 - 1e-12) || spec.beta > 1.0)
        throw ScenarioError("traffic: beta must lie in [(eta_LH-1)/(eta-1), 1]");
    if (spec.beta < 1.0 && eta <= lh) throw ScenarioError("traffic: beta < 1 needs non-LR destinations");
}

} // namespace

TrafficMatrices generate_traffic(const Topology& topo, const TrafficSpec& spec)
{
    validate_spec(topo, spec);
    const std::size_t n = topo.size();
    TrafficMatrices m{RateMatrix(n), RateMatrix(n)};

    if (spec.kind == TrafficKind::Matrix) {
        for (const auto& e : spec.entries) {
            if (e.src >= n || e.dst >= n || e.src == e.dst || e.pps < 0)
                throw ScenarioError("traffic: invalid matrix entry");
            if (!topo.generates_traffic(NodeId{e.src}) || !topo.generates_traffic(NodeId{e.dst}))
                throw ScenarioError("traffic: plain COs neither source nor sink traffic");
            auto& dst = awg_eligible(topo, NodeId{e.src}, NodeId{e.dst}) ? m.TA : m.T;
            dst(e.src, e.dst) += e.pps;
        }
        return m;
    }

    const double eta = topo.eta();
    const double lh = topo.eta_lh();
    const bool beta_mode = spec.kind == TrafficKind::NonuniformSrcDst;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId ni{static_cast<std::uint32_t>(i)};
        const double w = rate_weight(topo, spec, ni);
        if (w == 0) continue;
        const double rate = spec.sigma_pps * w;
        const bool redirect = beta_mode && is_lr_or_hotspot(topo.nodes[i].kind);
        const double p_lh = redirect ? spec.beta / (lh - 1.0) : 1.0 / (eta - 1.0);
        const double p_other = redirect ? (eta > lh ? (1.0 - spec.beta) / (eta - lh) : 0.0) : 1.0 / (eta - 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || topo.nodes[j].kind == NodeKind::PlainCo) continue;
            const NodeId nj{static_cast<std::uint32_t>(j)};
            const double x = rate * (is_lr_or_hotspot(topo.nodes[j].kind) ? p_lh : p_other);
            if (x == 0) continue;
            if (awg_eligible(topo, ni, nj))
                m.TA(i, j) = x;
            else
                m.T(i, j) = x;
        }
    }
    return m;
}

RateAggregates aggregate_rates(const Topology& topo, const TrafficMatrices& m, double mean_bits)
{
    const std::size_t n = topo.size();
    RateAggregates r;
    r.sigma.resize(n);
    r.sigma_awg.resize(n);
    r.sigma_pos = RateMatrix(static_cast<std::size_t>(topo.ring_positions));
    for (std::size_t i = 0; i < n; ++i) {
        r.sigma[i] = m.T.row_sum(i);
        r.sigma_awg[i] = m.TA.row_sum(i);
        const auto a = static_cast<std::size_t>(topo.nodes[i].ring_pos);
        for (std::size_t j = 0; j < n; ++j) {
            const auto b = static_cast<std::size_t>(topo.nodes[j].ring_pos);
            if (a != b) r.sigma_pos(a, b) += m.T(i, j);
        }
    }
    r.r_T_bps = total_rate_bps(m, mean_bits);
    return r;
}

double total_rate_bps(const TrafficMatrices& m, double mean_bits) { return mean_bits * m.total_pps(); }

} // namespace ngpon
