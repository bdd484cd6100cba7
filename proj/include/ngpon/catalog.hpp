#pragma once

#include "ngpon/closed_form.hpp"
#include "ngpon/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ngpon {

// Built-in scenarios with published limits.
// Appendix layout: P=4, H=1, N_r=12, N=32, all channels 1 Gb/s, PSC and one AWG channel per CO pair.
Scenario appendix_uniform(int n_tdm, int n_wdm, int n_lr);
// Rate classes 16/8/8 (low/medium/high); upgraded PONs carry 16 TDM, 8 WDM, 8 LR ONUs.
Scenario appendix_nonuniform(bool upgraded, double alpha = 2.0);
Scenario appendix_nonuniform_dst(double beta = 0.75, double alpha = 2.0);
// Metro layout: P=4, H=1, N_r=4, W=8 WDM channels of 1 Gb/s, PSC and AWG at 10 Gb/s.
Scenario metro_uniform();
Scenario metro_alpha(double alpha, bool awg);
Scenario metro_beta(double beta);
// A single PON without ring (P=1).
Scenario single_tree(const OnuMix& mix, PonType pon);

ClosedFormParams closed_form_params(const Scenario& s);

// Catalogue lookup by name (see builtin_names); throws ScenarioError for unknown names.
Scenario builtin_scenario(const std::string& name);
const std::vector<std::string>& builtin_names();

struct TableCell {
    std::string table;  // A, B, C
    std::string column; // mix or variant
    std::string row;    // constraint label
    double printed = 0; // Gb/s; nan for N/A
    std::string formula;
    double closed_form = 0; // Gb/s; nan when the closed form has no such bound
    std::string family;
    double engine = 0; // Gb/s; nan when the engine reports no such constraint
    bool closed_form_ok = false;
    bool engine_ok = false;
};

constexpr double kTableTolerance = 0.01; // Gb/s, table rounding

std::vector<TableCell> reproduce_tables();
void write_tables_csv(std::ostream& os, const std::vector<TableCell>& cells);

} // namespace ngpon
