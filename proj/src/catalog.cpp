#include "ngpon/catalog.hpp"

#include "ngpon/format.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace ngpon {

namespace {

constexpr double kNa = std::numeric_limits<double>::quiet_NaN();

Scenario appendix_base()
{
    Scenario s;
    auto& p = s.topology;
    p.cos = 4;
    p.hotspots = 1;
    p.ring_nodes = 12;
    p.onus_per_pon = 32;
    p.psc = true;
    p.tdm_bps = {1e9};
    p.wdm_bps = {1e9};
    p.wdm_channels = {1};
    p.psc_bps = 1e9;
    p.awg_bps = 1e9;
    p.awg_channels = {1};
    return s;
}

Scenario metro_base()
{
    Scenario s;
    auto& p = s.topology;
    p.cos = 4;
    p.hotspots = 1;
    p.ring_nodes = 4;
    p.onus_per_pon = 32;
    p.tdm_bps = {1e9};
    p.wdm_bps = {1e9};
    p.wdm_channels = {8};
    p.psc_bps = 1e10;
    p.awg_bps = 1e10;
    return s;
}

void rate_classes(Scenario& s, TrafficKind kind, double alpha)
{
    s.traffic.kind = kind;
    s.traffic.alpha = alpha;
    s.traffic.n_low = 16;
    s.traffic.n_med = 8;
    s.traffic.n_high = 8;
}

} // namespace

Scenario appendix_uniform(int n_tdm, int n_wdm, int n_lr)
{
    Scenario s = appendix_base();
    s.name = "appendix_uniform_" + std::to_string(n_tdm) + "_" + std::to_string(n_wdm) + "_" + std::to_string(n_lr);
    s.topology.onus = {OnuMix{n_tdm, n_wdm, n_lr}};
    return s;
}

Scenario appendix_nonuniform(bool upgraded, double alpha)
{
    Scenario s = appendix_base();
    s.name = upgraded ? "appendix_nonuniform_upgraded" : "appendix_nonuniform_tdm";
    s.topology.onus = {upgraded ? OnuMix{16, 8, 8} : OnuMix{32, 0, 0}};
    rate_classes(s, TrafficKind::NonuniformSrc, alpha);
    return s;
}

Scenario appendix_nonuniform_dst(double beta, double alpha)
{
    Scenario s = appendix_nonuniform(true, alpha);
    s.name = "appendix_nonuniform_dst";
    s.traffic.kind = TrafficKind::NonuniformSrcDst;
    s.traffic.beta = beta;
    return s;
}

Scenario metro_uniform()
{
    Scenario s = metro_base();
    s.name = "metro_uniform";
    s.topology.psc = true;
    s.topology.onus = {OnuMix{0, 32, 0}};
    return s;
}

Scenario metro_alpha(double alpha, bool awg)
{
    Scenario s = metro_base();
    s.name = awg ? "metro_alpha_awg" : "metro_alpha_psc";
    s.topology.psc = !awg;
    // High-rate ONUs are long-reach; without an AWG their traffic stays on the ring.
    s.topology.onus = {OnuMix{0, 24, 8}};
    if (awg) s.topology.awg_channels = {1};
    rate_classes(s, TrafficKind::NonuniformSrc, alpha);
    return s;
}

Scenario metro_beta(double beta)
{
    Scenario s = metro_alpha(2.0, true);
    s.name = "metro_beta";
    s.traffic.kind = TrafficKind::NonuniformSrcDst;
    s.traffic.beta = beta;
    return s;
}

Scenario single_tree(const OnuMix& mix, PonType pon)
{
    Scenario s;
    s.name = std::string("single_") + to_string(pon);
    s.topology.cos = 1;
    s.topology.onus = {mix};
    s.topology.pon = pon;
    if (pon == PonType::Gpon) s.topology.gpon_offset_s = gpon_optimal_offset(s.topology.tree_prop_s, s.topology.gpon_frame_s);
    return s;
}

ClosedFormParams closed_form_params(const Scenario& s)
{
    const auto& p = s.topology;
    ClosedFormParams c;
    c.P = p.cos;
    c.H = p.hotspots;
    c.N_r = p.ring_nodes;
    const OnuMix m = p.onus.empty() ? OnuMix{} : p.onus[0];
    c.N = m.total();
    c.N_T = m.tdm;
    c.N_W = m.wdm;
    c.N_L = m.lr;
    if (s.traffic.kind == TrafficKind::Uniform) {
        c.N_l = c.N;
        c.N_m = c.N_h = 0;
    } else {
        c.N_l = s.traffic.n_low;
        c.N_m = s.traffic.n_med;
        c.N_h = s.traffic.n_high;
    }
    c.alpha = s.traffic.alpha;
    c.beta = s.traffic.beta;
    c.W = p.wdm_channels.empty() ? 0 : p.wdm_channels[0];
    c.C = p.tdm_bps.empty() ? 1e9 : p.tdm_bps[0];
    c.C_P = p.psc_bps;
    c.C_A = p.awg_bps;
    c.c = p.awg_channels.empty() ? 0 : p.awg_channels[0];
    return c;
}

const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> n{"appendix_uniform",  "appendix_nonuniform_tdm", "appendix_nonuniform_upgraded",
                                            "appendix_nonuniform_dst", "metro_uniform", "metro_alpha_psc",
                                            "metro_alpha_awg",   "metro_beta", "single_epon", "single_gpon"};
    return n;
}

Scenario builtin_scenario(const std::string& name)
{
    if (name == "appendix_uniform") return appendix_uniform(16, 8, 8);
    if (name == "appendix_nonuniform_tdm") return appendix_nonuniform(false);
    if (name == "appendix_nonuniform_upgraded") return appendix_nonuniform(true);
    if (name == "appendix_nonuniform_dst") return appendix_nonuniform_dst();
    if (name == "metro_uniform") return metro_uniform();
    if (name == "metro_alpha_psc") return metro_alpha(2.0, false);
    if (name == "metro_alpha_awg") return metro_alpha(2.0, true);
    if (name == "metro_beta") return metro_beta(0.5);
    if (name == "single_epon") return single_tree(OnuMix{32, 0, 0}, PonType::Epon);
    if (name == "single_gpon") return single_tree(OnuMix{32, 0, 0}, PonType::Gpon);
    throw ScenarioError("unknown built-in scenario " + name);
}

namespace {

struct RowSpec {
    const char* row;
    const char* formula; // empty: N/A in the closed forms
    ConstraintFamily family;
    double printed; // nan: N/A
};

void add_column(std::vector<TableCell>& out, const std::string& table, const std::string& column, const Scenario& s,
                ClosedFormScenario cf, const std::vector<RowSpec>& rows)
{
    const auto bounds = closed_form_bounds(cf, closed_form_params(s));
    Scenario refl = s;
    refl.mode = CarrierMode::Reflection;
    const Instance ir(refl);
    const CapacityReport ce = constraint_bounds(ir.topology(), ir.flow_model().unit_loads(), CarrierMode::EmptyCarrier);
    for (const auto& r : rows) {
        TableCell c;
        c.table = table;
        c.column = column;
        c.row = r.row;
        c.printed = r.printed;
        c.formula = r.formula;
        c.family = to_string(r.family);
        c.closed_form = kNa;
        for (const auto& b : bounds)
            if (b.id == r.formula) c.closed_form = b.bound_bps / 1e9;
        const CapacityReport& rep = r.family == ConstraintFamily::WdmEmpty ? ce : ir.capacity();
        const double e = rep.family_min(r.family);
        c.engine = std::isfinite(e) ? e / 1e9 : kNa;
        auto ok = [&](double v) {
            if (std::isnan(c.printed)) return std::isnan(v);
            return !std::isnan(v) && std::fabs(v - c.printed) <= kTableTolerance + 1e-12;
        };
        c.closed_form_ok = ok(c.closed_form);
        c.engine_ok = ok(c.engine);
        out.push_back(c);
    }
}

} // namespace

std::vector<TableCell> reproduce_tables()
{
    using F = ConstraintFamily;
    std::vector<TableCell> out;
    struct ColA {
        int t, w, l;
        double tu, wu, we, psc, awg;
    };
    const ColA cols[] = {{32, 0, 0, 3.41, kNa, kNa, 4.69, kNa},
                         {24, 4, 4, 4.54, 6.91, 3.45, 4.75, 735.75},
                         {16, 8, 8, 6.81, 7.21, 3.61, 4.95, 183.94},
                         {4, 14, 14, 27.25, 8.21, 4.10, 5.59, 60.06}};
    for (const auto& c : cols) {
        const bool wdm = c.w + c.l > 0;
        const char* wf = wdm ? "rt_WDMup" : "";
        add_column(out, "A", "N_T=" + std::to_string(c.t) + ",N_W=" + std::to_string(c.w) + ",N_L=" + std::to_string(c.l),
                   appendix_uniform(c.t, c.w, c.l), ClosedFormScenario::UniformA,
                   {{"T_u", "rt_TDMup", F::TdmUp, c.tu},
                    {"W_u", wf, F::WdmUp, c.wu},
                    {"T_d", "rt_TDMup", F::TdmDown, c.tu},
                    {"W_d_refl", wf, F::WdmDown, c.wu},
                    {"W_d_empty", wdm ? "rt_WDMempty" : "", F::WdmEmpty, c.we},
                    {"ring_psc", "rt_PSC", F::Psc, c.psc},
                    {"awg", c.l > 0 ? "rt_AWG" : "", F::Awg, c.awg}});
    }
    add_column(out, "B", "TDM only", appendix_nonuniform(false), ClosedFormScenario::NonuniformB,
               {{"T_u", "rt_TDMupa", F::TdmUp, 3.44}, {"T_d", "rt_TDMdowna", F::TdmDown, 3.41}, {"ring_psc", "rt_PSCa", F::Psc, 4.67}});
    add_column(out, "B", "upgraded", appendix_nonuniform(true), ClosedFormScenario::NonuniformB,
               {{"T_u", "rt_TDMupaup", F::TdmUp, 13.75},
                {"W_u", "rt_WDMupaup", F::WdmUp, 7.73},
                {"T_d", "rt_TDMdownaup", F::TdmDown, 6.78},
                {"W_d_refl", "rt_WDMdownaup", F::WdmDown, 7.65},
                {"W_d_empty", "rt_WDMemptyaup", F::WdmEmpty, 0.12},
                {"ring_psc", "rt_PSCaup", F::Psc, 5.28},
                {"awg", "rt_AWGaup", F::Awg, 92.81}});
    add_column(out, "C", "beta=0.75", appendix_nonuniform_dst(), ClosedFormScenario::NonuniformC,
               {{"T_u", "rt_TDMupaup", F::TdmUp, 13.75},
                {"W_u", "rt_WDMupnunu", F::WdmUp, 11.0},
                {"T_d", "rt_TDMdownupnunu", F::TdmDown, 9.83},
                {"W_d_refl", "rt_WDMdownupnunu", F::WdmDown, 21.99},
                {"W_d_empty", "rt_WDMemptyupnunu", F::WdmEmpty, 5.34},
                {"ring_psc", "rt_PSCupnunu", F::Psc, 7.14},
                {"awg", "rt_AWGupnunu", F::Awg, 28.65}});
    return out;
}

void write_tables_csv(std::ostream& os, const std::vector<TableCell>& cells)
{
    auto v = [](double x) { return std::isnan(x) ? std::string("NA") : fmt_sig(x); };
    os << "table,column,constraint,printed_gbps,formula,closed_form_gbps,closed_form_ok,engine_family,engine_gbps,engine_ok\n";
    for (const auto& c : cells)
        os << c.table << ",\"" << c.column << "\"," << c.row << ',' << v(c.printed) << ','
           << (c.formula.empty() ? "NA" : c.formula) << ',' << v(c.closed_form) << ',' << (c.closed_form_ok ? "PASS" : "FAIL")
           << ',' << c.family << ',' << v(c.engine) << ',' << (c.engine_ok ? "PASS" : "FAIL") << '\n';
}

} // namespace ngpon
