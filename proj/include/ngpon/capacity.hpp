#pragma once

#include "ngpon/model.hpp"
#include "ngpon/routing.hpp"

#include <string>
#include <vector>

namespace ngpon {

enum class CarrierMode : std::uint8_t { Reflection, EmptyCarrier };

const char* to_string(CarrierMode m);

// Channel loads in bits/s.
struct LoadReport {
    std::vector<double> tdm_up, wdm_up, tdm_down, wdm_down; // per CO
    std::vector<double> psc;                                // per destination CO
    std::vector<double> ring;                               // per ring LinkId
    std::vector<double> awg;                                // P*P, row = source CO
    std::vector<double> onu_up, onu_awg;                    // per node
    double r_T_bps = 0;

    double awg_load(int k, int l) const { return awg[static_cast<std::size_t>(k) * tdm_up.size() + l]; }
    void scale(double f);
    void add(const LoadReport& o);
};

LoadReport make_empty_loads(const Topology& topo, const LinkSpace& links);

// Serial reference kernel.
LoadReport channel_loads(const RouteTable& routes, const TrafficMatrices& m, double mean_bits);
// OpenMP kernel; rows are reduced in fixed blocks so the result does not depend on the thread count.
LoadReport channel_loads_parallel(const RouteTable& routes, const TrafficMatrices& m, double mean_bits);

enum class ConstraintFamily : std::uint8_t {
    TdmUp, WdmUp, TdmDown, WdmDown, WdmEmpty, Psc, Ring, Awg, OnuUp, OnuAwg
};

const char* to_string(ConstraintFamily f);

struct ConstraintBound {
    std::string id;
    ConstraintFamily family;
    int index = 0; // CO, link or node the constraint belongs to
    double capacity_bps = 0;
    double load_bps = 0;
    double bound_bps = 0; // r_T at which load reaches capacity
};

struct CapacityReport {
    std::vector<ConstraintBound> constraints;
    double max_rt_bps = 0;
    int bottleneck = -1;
    double pattern_rt_bps = 0;

    const ConstraintBound& bottleneck_constraint() const { return constraints.at(static_cast<std::size_t>(bottleneck)); }
    // Smallest bound of a family; +inf when the family has no constraint.
    double family_min(ConstraintFamily f) const;
};

CapacityReport constraint_bounds(const Topology& topo, const LoadReport& loads, CarrierMode mode);
CapacityReport constraint_bounds(const RouteTable& routes, const TrafficMatrices& pattern, double mean_bits,
                                 CarrierMode mode);

void write_capacity_csv(std::ostream& os, const CapacityReport& r);

} // namespace ngpon
