#pragma once

#include <string>
#include <vector>

namespace ngpon {

// Scenario families with hand-derived throughput limits.
enum class ClosedFormScenario {
    UniformA,      // uniform traffic, N_T/N_W/N_L mix, N_r = 12 layout
    NonuniformB,   // alpha source non-uniformity; TDM-only and upgraded variants
    NonuniformC,   // alpha and beta, upgraded network
    MetroUniform,  // all-WDM PONs, ring and PSC, N_r = 4 layout
    MetroAlpha,    // alpha sweep, ring and PSC plus ring and AWG variants
    MetroBeta,     // beta sweep, ring and AWG
};

struct ClosedFormParams {
    int P = 4;
    int H = 1;
    int N_r = 12;
    int N = 32;
    int N_T = 32, N_W = 0, N_L = 0;
    int N_l = 16, N_m = 8, N_h = 8;
    double alpha = 1.0;
    double beta = 0.0;
    int W = 1;
    double C = 1e9;   // tree channel rate (C_T = C_W)
    double C_P = 1e9; // PSC channel rate
    double C_A = 1e9; // AWG channel rate
    int c = 1;        // AWG channels per CO pair
};

struct NamedBound {
    std::string id;
    double bound_bps;
};

std::vector<NamedBound> closed_form_bounds(ClosedFormScenario s, const ClosedFormParams& p);
double closed_form_bound(ClosedFormScenario s, const ClosedFormParams& p, const std::string& id);

} // namespace ngpon
