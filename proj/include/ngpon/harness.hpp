#pragma once

#include "ngpon/delay.hpp"
#include "ngpon/scenario.hpp"
#include "ngpon/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ngpon {

struct SweepOptions {
    bool simulate = false;
    bool parallel = true; // analytic points under OpenMP
};

struct SweepPoint {
    double r_T_bps = 0;
    double fraction = 0; // of the scenario's capacity bound
    DelayReport analytic;
    bool simulated = false;
    SimStats sim;
};

// One row per grid value, in grid order. Simulated points share the scenario seed.
std::vector<SweepPoint> run_sweep(const Instance& inst, const std::vector<double>& grid_bps, const SweepOptions& opt);
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts);

struct ComparisonRow {
    double r_T_bps = 0;
    std::string cls;
    double analytic_s = 0;
    double simulated_s = 0;
    double ci_halfwidth_s = 0;
    double gap = 0; // |analytic - simulated| / simulated
    bool unstable = false; // analytic side beyond its stability region; not judged
    bool pass = true;
};

std::vector<ComparisonRow> compare_points(const std::vector<SweepPoint>& pts, const std::vector<std::string>& classes,
                                          double tolerance);
bool all_pass(const std::vector<ComparisonRow>& rows);
void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);

// DelayOptions matching the scenario.
DelayOptions delay_options(const Scenario& s);

} // namespace ngpon
