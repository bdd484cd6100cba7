#pragma once

#include "ngpon/capacity.hpp"
#include "ngpon/model.hpp"
#include "ngpon/routing.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ngpon {

struct QueueParams {
    double rho = 0;       // lambda / C
    double C = 1;         // server rate, bits/s
    double mean_bits = 1; // packet length mean
    double var_bits2 = 0; // packet length variance
};

QueueParams queue_params(double rho, double C, const PacketLengthDist& d);

// Pollaczek-Khinchine mean wait; +inf when rho >= 1.
double pk_wait(const QueueParams& q);

// Bux-Schlatter correction: sum of feeder waits; +inf if any feeder is saturated.
double correction_term(const std::vector<QueueParams>& feeders);

// Probability that consecutive packets of two merged Poisson streams differ in direction.
double switchover_prob(double lambda1, double lambda2);

struct Gammas {
    double g1 = 0; // report arrival to start of the downstream frame carrying the grant
    double g2 = 0; // grant arrival to start of the next upstream frame
};

Gammas gpon_gammas(double tau, double omega, double delta);
double gpon_optimal_offset(double tau, double delta);

enum class GrantPolicy : std::uint8_t { NoPriority, NonPreemptivePriority };

const char* to_string(GrantPolicy g);

struct DelayOptions {
    CarrierMode mode = CarrierMode::Reflection;
    GrantPolicy grant = GrantPolicy::NonPreemptivePriority;
};

// Unit-scale precomputation for one traffic shape. Everything in compute_delays
// is linear in the scale factor, so one model serves a whole load sweep.
class FlowModel {
public:
    FlowModel(const RouteTable& routes, const TrafficMatrices& unit, const PacketLengthDist& len);

    const Topology& topology() const { return routes_->topology(); }
    const RouteTable& routes() const { return *routes_; }
    const PacketLengthDist& lengths() const { return len_; }
    const LoadReport& unit_loads() const { return loads_; }
    double unit_rt_bps() const { return loads_.r_T_bps; }

    // Port = ring position * 3 + tree channel (0 none, 1 TDM, 2 WDM).
    static int port(int pos, int ch) { return pos * 3 + ch; }
    std::size_t ports() const { return ports_; }
    double flow(int src_port, int dst_port) const { return flow_[static_cast<std::size_t>(src_port) * ports_ + dst_port]; }
    // Bits/s entering `next` directly from `prev`.
    double pair_load(LinkId prev, LinkId next) const { return pair_[static_cast<std::size_t>(prev) * nlinks_ + next]; }
    // AWG packets/s from CO k to CO l, split by LR-ONU and hotspot sources.
    double awg_lr(int k, int l) const { return awg_lr_[static_cast<std::size_t>(k) * P_ + l]; }
    double awg_hotspot(int k, int l) const { return awg_hot_[static_cast<std::size_t>(k) * P_ + l]; }
    double total_t_pps() const { return t_total_; }
    double total_ta_pps() const { return ta_total_; }

private:
    const RouteTable* routes_;
    PacketLengthDist len_;
    LoadReport loads_;
    std::size_t ports_ = 0, nlinks_ = 0;
    int P_ = 0;
    std::vector<double> flow_, pair_, awg_lr_, awg_hot_;
    double t_total_ = 0, ta_total_ = 0;
};

struct TreeDelays {
    std::vector<double> up, down; // per CO, seconds; +inf when unstable, nan when the tree is absent
    int clamped = 0;
};

// Loads and corrections at the evaluated scale.
struct DelayInputs {
    const FlowModel* model = nullptr;
    LoadReport loads;
    double scale = 1;
    DelayOptions opt;
};

DelayInputs delay_inputs(const FlowModel& m, double r_T_bps, const DelayOptions& opt);

TreeDelays epon_tdm_delays(const DelayInputs& in);
TreeDelays wdm_delays_reflection(const DelayInputs& in);
TreeDelays wdm_delays_empty(const DelayInputs& in);
// TDM and WDM pair for GPON trees.
std::pair<TreeDelays, TreeDelays> gpon_delays(const DelayInputs& in);

double grant_delay(const DelayInputs& in, int k);
double psc_delay(const DelayInputs& in, int l, bool* clamped = nullptr);
// Queueing part of a ring link (wait minus feeder correction, clamped at zero).
double ring_link_wait(const DelayInputs& in, LinkId e, bool* clamped = nullptr);
// Metro delay from ring position a to ring position b (0 for a == b).
double ring_delay(const DelayInputs& in, int a, int b, const std::vector<double>& psc);
double awg_delay(const DelayInputs& in, int k, int l);
double awg_delay_avg(const DelayInputs& in);

struct ClassDelay {
    std::string name;
    double delay_s = 0; // nan when the class carries no traffic
};

struct DelayReport {
    double r_T_bps = 0;
    bool stable = true;
    int clamped = 0;
    TreeDelays tdm, wdm;
    std::vector<double> psc;      // per destination CO
    std::vector<double> awg;      // P*P
    double D_rp = 0, D_a = 0, D = 0;
    std::vector<ClassDelay> classes; // overall, tdm_up, wdm_up, tdm_down, wdm_down, metro, awg

    double class_delay(const std::string& name) const;
};

// Path-class names shared with the simulator.
const std::vector<std::string>& delay_class_names();

DelayReport compute_delays(const FlowModel& m, double r_T_bps, const DelayOptions& opt);

// D^{R,P} and D from component delays; weights are the packet rates.
double overall_delay(double D_rp, double t_pps, double D_a, double ta_pps);

void write_delay_csv_header(std::ostream& os);
void write_delay_csv_row(std::ostream& os, const DelayReport& r);

} // namespace ngpon
