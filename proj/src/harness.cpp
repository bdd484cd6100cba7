#include "ngpon/harness.hpp"

#include "ngpon/format.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace ngpon {

DelayOptions delay_options(const Scenario& s) { return DelayOptions{s.mode, s.grant}; }

std::vector<SweepPoint> run_sweep(const Instance& inst, const std::vector<double>& grid_bps, const SweepOptions& opt)
{
    const auto& sc = inst.scenario();
    const DelayOptions dopt = delay_options(sc);
    const double bound = inst.capacity().max_rt_bps;
    std::vector<SweepPoint> pts(grid_bps.size());
    const int n = static_cast<int>(grid_bps.size());
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (int i = 0; i < n; ++i) {
        auto& p = pts[static_cast<std::size_t>(i)];
        p.r_T_bps = grid_bps[static_cast<std::size_t>(i)];
        p.fraction = bound > 0 ? p.r_T_bps / bound : 0;
        p.analytic = compute_delays(inst.flow_model(), p.r_T_bps, dopt);
    }
    if (opt.simulate) {
        SimConfig cfg = sc.sim;
        cfg.grant = sc.grant;
        for (auto& p : pts) {
            if (!(p.r_T_bps > 0)) continue;
            const TrafficMatrices m = inst.at_rate(p.r_T_bps);
            p.sim = run_full_network(inst.topology(), inst.routes(), m, sc.mode, cfg, sc.lengths);
            p.simulated = true;
        }
    }
    return pts;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& pts)
{
    bool sim = false;
    for (const auto& p : pts) sim = sim || p.simulated;
    os << "r_T_bps,load_fraction";
    for (const auto& n : delay_class_names()) os << ",D_" << n << "_s";
    if (sim) os << ",sim_D_overall_s,sim_ci_halfwidth_s,sim_throughput_bps";
    os << '\n';
    for (const auto& p : pts) {
        os << fmt_sig(p.r_T_bps) << ',' << fmt_sig(p.fraction);
        for (const auto& c : p.analytic.classes)
            os << ',' << (p.analytic.stable ? fmt_sig(c.delay_s) : std::string("unstable"));
        if (sim) {
            const ClassStats* c = p.simulated ? p.sim.find("overall") : nullptr;
            if (c)
                os << ',' << fmt_sig(c->mean_s) << ',' << fmt_sig(c->ci_halfwidth_s) << ',' << fmt_sig(p.sim.throughput_bps);
            else
                os << ",nan,nan,nan";
        }
        os << '\n';
    }
}

std::vector<ComparisonRow> compare_points(const std::vector<SweepPoint>& pts, const std::vector<std::string>& classes,
                                          double tolerance)
{
    std::vector<ComparisonRow> out;
    for (const auto& p : pts) {
        if (!p.simulated) continue;
        for (const auto& cls : classes) {
            const ClassStats* s = p.sim.find(cls);
            const double a = p.analytic.class_delay(cls);
            if (!s || std::isnan(a)) continue; // class carries no traffic
            ComparisonRow r;
            r.r_T_bps = p.r_T_bps;
            r.cls = cls;
            r.analytic_s = a;
            r.simulated_s = s->mean_s;
            r.ci_halfwidth_s = s->ci_halfwidth_s;
            r.unstable = !p.analytic.stable || !std::isfinite(a);
            r.gap = r.unstable ? std::numeric_limits<double>::infinity() : std::fabs(a - s->mean_s) / s->mean_s;
            r.pass = r.unstable || r.gap <= tolerance;
            out.push_back(r);
        }
    }
    return out;
}

bool all_pass(const std::vector<ComparisonRow>& rows)
{
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows)
{
    os << "r_T_bps,class,analytic_D_s,simulated_D_s,ci_halfwidth_s,relative_gap,result\n";
    for (const auto& r : rows) {
        os << fmt_sig(r.r_T_bps) << ',' << r.cls << ',' << (r.unstable ? std::string("unstable") : fmt_sig(r.analytic_s))
           << ',' << fmt_sig(r.simulated_s) << ',' << fmt_sig(r.ci_halfwidth_s) << ','
           << (r.unstable ? std::string("nan") : fmt_sig(r.gap)) << ',' << (r.unstable ? "skipped" : r.pass ? "PASS" : "FAIL")
           << '\n';
    }
}

} // namespace ngpon
