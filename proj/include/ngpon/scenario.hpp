#pragma once

#include "ngpon/capacity.hpp"
#include "ngpon/delay.hpp"
#include "ngpon/model.hpp"
#include "ngpon/routing.hpp"
#include "ngpon/simulator.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace ngpon {

// Everything one CLI invocation needs. Loads are either fractions of the capacity
// bound or absolute r_T values; fractions win when both are given.
struct Scenario {
    std::string name = "scenario";
    TopologyParams topology;
    TrafficSpec traffic;
    PacketLengthDist lengths = PacketLengthDist::ethernet();
    CarrierMode mode = CarrierMode::Reflection;
    GrantPolicy grant = GrantPolicy::NonPreemptivePriority;
    SimConfig sim;
    std::vector<double> load_fractions;
    std::vector<double> load_bps;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

CarrierMode parse_mode(const std::string& s);
GrantPolicy parse_grant(const std::string& s);

// Topology, routes and traffic pattern built once. Not movable: the route table
// points into the topology.
class Instance {
public:
    explicit Instance(const Scenario& s);
    Instance(const Instance&) = delete;
    Instance& operator=(const Instance&) = delete;

    const Scenario& scenario() const { return scenario_; }
    const Topology& topology() const { return topo_; }
    const RouteTable& routes() const { return routes_; }
    const TrafficMatrices& pattern() const { return pattern_; }
    const FlowModel& flow_model() const { return flow_; }
    const CapacityReport& capacity() const { return cap_; }

    // Pattern rescaled so that r_T equals r_T_bps.
    TrafficMatrices at_rate(double r_T_bps) const;
    // Grid values as r_T in bits/s.
    std::vector<double> load_grid() const;

private:
    Scenario scenario_;
    Topology topo_;
    RouteTable routes_;
    TrafficMatrices pattern_;
    FlowModel flow_;
    CapacityReport cap_;
};

} // namespace ngpon
