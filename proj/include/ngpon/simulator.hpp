#pragma once

#include "ngpon/capacity.hpp"
#include "ngpon/delay.hpp"
#include "ngpon/model.hpp"
#include "ngpon/routing.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ngpon {

struct SimConfig {
    std::uint64_t seed = 1;
    double warmup_s = 0.05;
    double duration_s = 0.5;
    int replications = 5;
    bool parallel = true;       // replications under OpenMP; results do not depend on it
    double drain_limit_s = 1.0; // give up waiting for measured packets this long after the window
    GrantPolicy grant = GrantPolicy::NonPreemptivePriority;
    std::ostream* trace = nullptr; // one line per event; forces serial replications
};

struct Audit {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t in_flight = 0; // queued or on the wire when the run stopped
    std::uint64_t work_conservation_violations = 0;
    std::uint64_t fifo_violations = 0;
    std::uint64_t fifo_checked = 0;
    std::uint64_t drops = 0;
    bool drained = true; // every measured packet was delivered

    bool conserved() const { return generated == delivered + in_flight; }
};

// One replication's raw numbers.
struct ReplicationResult {
    std::map<std::string, double> sum_s;
    std::map<std::string, std::uint64_t> count;
    std::map<std::string, double> bits; // delivered in the window
    std::map<std::string, double> busy_s;
    double window_s = 0;
    double offered_bps = 0;
    Audit audit;
};

struct ClassStats {
    std::string name;
    double mean_s = 0;
    double ci_halfwidth_s = 0; // nan with fewer than two replications
    std::uint64_t samples = 0;
    double throughput_bps = 0;
};

struct SimStats {
    std::vector<ClassStats> classes;
    double throughput_bps = 0;
    double offered_bps = 0;
    std::map<std::string, double> utilization;
    Audit audit; // summed over replications
    int replications = 0;

    const ClassStats* find(const std::string& name) const;
};

// Student-t 95% interval over replication means.
SimStats combine_replications(const std::vector<ReplicationResult>& reps, const std::vector<std::string>& order);

// Runs cfg.replications independent replications of `one` (given a per-replication seed).
std::vector<ReplicationResult> run_replications(const std::function<ReplicationResult(std::uint64_t)>& one,
                                                const SimConfig& cfg);
std::vector<ReplicationResult> run_replications_serial(const std::function<ReplicationResult(std::uint64_t)>& one,
                                                       const SimConfig& cfg);
std::uint64_t replication_seed(std::uint64_t seed, int r);

// FIFO single-server queue via the Lindley recursion; classes "wait" and "sojourn".
SimStats run_mg1_reference(double lambda_pps, const PacketLengthDist& len, double C, const SimConfig& cfg);

SimStats run_epon_tree(const Topology& topo, const TrafficMatrices& m, CarrierMode mode, const SimConfig& cfg,
                       const PacketLengthDist& len = PacketLengthDist::ethernet());
SimStats run_gpon_tree(const Topology& topo, const TrafficMatrices& m, const SimConfig& cfg,
                       const PacketLengthDist& len = PacketLengthDist::ethernet());
SimStats run_full_network(const Topology& topo, const RouteTable& routes, const TrafficMatrices& m, CarrierMode mode,
                          const SimConfig& cfg, const PacketLengthDist& len = PacketLengthDist::ethernet());

// Single replication of the network engine (used by the runners and by tests).
ReplicationResult simulate_network_once(const Topology& topo, const RouteTable& routes, const TrafficMatrices& m,
                                        CarrierMode mode, const SimConfig& cfg, const PacketLengthDist& len,
                                        std::uint64_t seed);

void write_sim_csv(std::ostream& os, const SimStats& s);

} // namespace ngpon
