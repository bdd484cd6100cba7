#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ngpon {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class NodeKind : std::uint8_t { PlainCo, HotspotCo, RingNode, TdmOnu, WdmOnu, LrOnu };
enum class PonType : std::uint8_t { Epon, Gpon };

const char* to_string(NodeKind k);
const char* to_string(PonType p);

struct NodeId {
    std::uint32_t v = 0;
    friend bool operator==(NodeId, NodeId) = default;
    friend auto operator<=>(NodeId, NodeId) = default;
};

inline bool is_onu(NodeKind k) { return k == NodeKind::TdmOnu || k == NodeKind::WdmOnu || k == NodeKind::LrOnu; }
// WDM and LR ONUs share the WDM channels of their tree.
inline bool uses_wdm(NodeKind k) { return k == NodeKind::WdmOnu || k == NodeKind::LrOnu; }
inline bool is_lr_or_hotspot(NodeKind k) { return k == NodeKind::LrOnu || k == NodeKind::HotspotCo; }

class PacketLengthDist {
public:
    static PacketLengthDist uniform_bytes(std::uint32_t min_bytes, std::uint32_t max_bytes);
    static PacketLengthDist fixed_bits(std::uint32_t bits);
    static PacketLengthDist ethernet() { return uniform_bytes(64, 1518); }

    double mean_bits() const { return mean_; }
    double variance_bits2() const { return var_; }
    double second_moment_bits2() const { return var_ + mean_ * mean_; }
    bool deterministic() const { return lo_ == hi_ && step_ == 1; }
    std::uint32_t min_bits() const { return lo_ * step_; }
    std::uint32_t max_bits() const { return hi_ * step_; }

    template <class Rng>
    std::uint32_t sample_bits(Rng& rng) const
    {
        if (lo_ == hi_) return lo_ * step_;
        std::uniform_int_distribution<std::uint32_t> d(lo_, hi_);
        return d(rng) * step_;
    }

private:
    PacketLengthDist(std::uint32_t lo, std::uint32_t hi, std::uint32_t step);
    std::uint32_t lo_, hi_, step_;
    double mean_, var_;
};

struct OnuMix {
    int tdm = 0;
    int wdm = 0;
    int lr = 0;
    int total() const { return tdm + wdm + lr; }
};

struct TopologyParams {
    int cos = 1;          // P
    int hotspots = 0;     // H
    int ring_nodes = 0;   // N_r
    int onus_per_pon = 0; // N; 0 means "sum of the mix"
    // One entry per plain CO, or a single entry applied to all of them.
    std::vector<OnuMix> onus;
    PonType pon = PonType::Epon;
    bool psc = false;

    // Per-CO vectors accept one value (broadcast) or P values.
    std::vector<double> tdm_bps{1e9};
    std::vector<double> wdm_bps{1e9};
    std::vector<int> wdm_channels{1};
    std::vector<int> home_channels{1};
    double psc_bps = 1e10;
    double awg_bps = 1e10;
    double ring_bps = 1e10;
    // Either empty (no AWG), a single value for every CO pair, or P*P row-major.
    std::vector<int> awg_channels;

    double tree_prop_s = 100e-6;
    double psc_prop_s = 50e-6;
    double awg_prop_s = 50e-6;
    double ring_circumference_m = 1e5;
    double light_speed_mps = 2e8;
    double psc_frame_s = 20e-6;
    double gpon_frame_s = 125e-6;
    double gpon_offset_s = 0.0;
};

struct Node {
    NodeId id;
    NodeKind kind;
    int co = -1;       // owning CO for ONUs and CO nodes, -1 for ring nodes
    int ring_pos = -1; // ring position (ONUs inherit their CO's)
    int local = 0;     // index inside the CO's ONU list (TDM, WDM, LR order)
};

struct CentralOffice {
    int index = 0;
    bool hotspot = false;
    int ring_pos = 0;
    NodeId node;
    OnuMix mix;
    double tdm_bps = 0;
    double wdm_bps = 0;
    int wdm_channels = 0;
    int home_channels = 1;
    std::vector<NodeId> onus; // TDM first, then WDM, then LR
};

// Node IDs: COs, then ring nodes clockwise, then ONUs grouped by CO.
struct Topology {
    TopologyParams params;
    std::vector<Node> nodes;
    std::vector<CentralOffice> cos;
    int ring_positions = 1;
    std::vector<int> co_at_pos;        // -1 for ring-node positions
    std::vector<NodeId> node_at_pos;   // CO node or ring node occupying the position
    std::vector<int> awg_channel_count; // P*P

    std::size_t size() const { return nodes.size(); }
    const Node& node(NodeId id) const { return nodes.at(id.v); }
    int eta() const;    // traffic-generating nodes
    int eta_lh() const; // LR ONUs plus hotspots
    bool has_ring() const { return ring_positions > 1; }
    bool has_psc() const { return params.psc && cos.size() > 1; }
    int awg_channels(int k, int l) const { return awg_channel_count[static_cast<std::size_t>(k) * cos.size() + l]; }
    bool has_awg() const;
    double hop_prop_s() const;
    bool generates_traffic(NodeId id) const { return node(id).kind != NodeKind::PlainCo; }
};

Topology build_topology(const TopologyParams& p);

enum class TrafficKind : std::uint8_t { Uniform, NonuniformSrc, NonuniformSrcDst, Matrix };

struct MatrixEntry {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    double pps = 0;
};

struct TrafficSpec {
    TrafficKind kind = TrafficKind::Uniform;
    double sigma_pps = 1.0;
    double alpha = 1.0;
    double beta = 0.0;
    // ONU positions inside each CO: first n_low low-rate, next n_med medium, rest high.
    int n_low = 0;
    int n_med = 0;
    int n_high = 0;
    std::vector<MatrixEntry> entries;
};

class RateMatrix {
public:
    RateMatrix() = default;
    explicit RateMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    double row_sum(std::size_t i) const;
    double total() const;
    void scale(double f);
    const std::vector<double>& data() const { return a_; }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

// Packet rates in packets/s; T holds ring/PSC-routed traffic, TA the AWG traffic.
struct TrafficMatrices {
    RateMatrix T;
    RateMatrix TA;
    void scale(double f)
    {
        T.scale(f);
        TA.scale(f);
    }
    double total_pps() const { return T.total() + TA.total(); }
};

// Generation rate of node i relative to sigma (1/alpha, 1 or alpha).
double rate_weight(const Topology& topo, const TrafficSpec& spec, NodeId i);
double equivalent_medium_nodes(const Topology& topo, const TrafficSpec& spec);
bool awg_eligible(const Topology& topo, NodeId i, NodeId j);

TrafficMatrices generate_traffic(const Topology& topo, const TrafficSpec& spec);

struct RateAggregates {
    std::vector<double> sigma;     // per node, T row sums
    std::vector<double> sigma_awg; // per node, TA row sums
    RateMatrix sigma_pos;          // ring-position pairs, diagonal zero
    double r_T_bps = 0;
};

RateAggregates aggregate_rates(const Topology& topo, const TrafficMatrices& m, double mean_bits);

double total_rate_bps(const TrafficMatrices& m, double mean_bits);

} // namespace ngpon
