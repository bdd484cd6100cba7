// Command-line front end. Exit codes: 0 ok, 2 invalid scenario, 3 acceptance violation.
#include "CLI11.hpp"

#include "ngpon/capacity.hpp"
#include "ngpon/catalog.hpp"
#include "ngpon/format.hpp"
#include "ngpon/harness.hpp"
#include "ngpon/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

using namespace ngpon;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kViolation = 3;

struct Common {
    std::string scenario;
    std::string output;
    std::string mode;
    std::string grant;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::vector<double> fractions;
    std::vector<double> rt;
};

void add_common(CLI::App* c, Common& o, bool grid)
{
    c->add_option("--scenario", o.scenario, "scenario JSON file, or builtin:<name>")->required();
    c->add_option("--output", o.output, "CSV destination (default stdout)");
    c->add_option("--mode", o.mode, "carrier mode: reflection or empty");
    c->add_option("--grant", o.grant, "grant policy: priority or none");
    if (grid) {
        c->add_option("--loads", o.fractions, "load grid as fractions of the capacity bound");
        c->add_option("--rt", o.rt, "load grid as r_T in bit/s");
    }
}

void add_sim(CLI::App* c, Common& o)
{
    c->add_option("--seed", o.seed, "base seed (overrides NGPON_SEED and the scenario)");
    c->add_option("--replications", o.replications, "replications (overrides NGPON_REPLICATIONS)");
}

std::uint64_t env_u64(const char* name, std::uint64_t dflt)
{
    const char* v = std::getenv(name);
    if (!v || !*v) return dflt;
    try {
        std::size_t pos = 0;
        const auto x = std::stoull(v, &pos);
        if (pos != std::string(v).size()) throw std::invalid_argument(name);
        return x;
    } catch (const std::exception&) {
        throw ScenarioError(std::string(name) + ": not an unsigned integer");
    }
}

Scenario resolve(const Common& o)
{
    Scenario s;
    const std::string prefix = "builtin:";
    if (o.scenario.rfind(prefix, 0) == 0)
        s = builtin_scenario(o.scenario.substr(prefix.size()));
    else
        s = load_scenario(o.scenario);
    // Precedence: flag, then environment, then scenario file.
    s.sim.seed = env_u64("NGPON_SEED", s.sim.seed);
    s.sim.replications = static_cast<int>(env_u64("NGPON_REPLICATIONS", static_cast<std::uint64_t>(s.sim.replications)));
    if (o.seed) s.sim.seed = *o.seed;
    if (o.replications) s.sim.replications = *o.replications;
    if (s.sim.replications < 1) throw ScenarioError("replications must be >= 1");
    if (!o.mode.empty()) s.mode = parse_mode(o.mode);
    if (!o.grant.empty()) s.grant = parse_grant(o.grant);
    s.sim.grant = s.grant;
    if (!o.fractions.empty() || !o.rt.empty()) {
        s.load_fractions = o.fractions;
        s.load_bps = o.rt;
    }
    return s;
}

std::vector<double> grid_or(const Instance& inst, std::vector<double> fractions)
{
    auto g = inst.load_grid();
    if (!g.empty()) return g;
    for (double& f : fractions) f *= inst.capacity().max_rt_bps;
    return fractions;
}

int with_output(const std::string& path, const std::function<void(std::ostream&)>& fn)
{
    if (path.empty()) {
        fn(std::cout);
        return kOk;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write " << path << '\n';
        return 1;
    }
    fn(out);
    return kOk;
}

int cmd_capacity(const Common& o, const std::string& routes_path)
{
    const Instance inst(resolve(o));
    const auto& rep = inst.capacity();
    int rc = with_output(o.output, [&](std::ostream& os) { write_capacity_csv(os, rep); });
    if (!routes_path.empty()) {
        std::ofstream r(routes_path);
        if (!r) {
            std::cerr << "cannot write " << routes_path << '\n';
            return 1;
        }
        traversal_probs(inst.routes(), inst.pattern()).write_csv(r);
    }
    if (rep.bottleneck < 0) {
        std::cout << "# bottleneck: none (no loaded constraint)\n";
        return rc;
    }
    const auto& b = rep.bottleneck_constraint();
    const std::string q = exact_rational(b.bound_bps / 1e9);
    std::cout << "# bottleneck: " << b.id << " at r_T = " << fmt_sig(b.bound_bps) << " bit/s";
    if (!q.empty()) std::cout << " (" << q << " Gb/s)";
    std::cout << '\n';
    return rc;
}

int cmd_delay(const Common& o)
{
    const Instance inst(resolve(o));
    SweepOptions opt;
    const auto pts = run_sweep(inst, grid_or(inst, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}), opt);
    return with_output(o.output, [&](std::ostream& os) {
        write_delay_csv_header(os);
        for (const auto& p : pts) write_delay_csv_row(os, p.analytic);
    });
}

int cmd_simulate(const Common& o, std::optional<double> load, std::optional<double> duration,
                 std::optional<double> warmup, const std::string& trace, bool serial)
{
    Scenario s = resolve(o);
    if (duration) s.sim.duration_s = *duration;
    if (warmup) s.sim.warmup_s = *warmup;
    if (!(s.sim.duration_s > 0) || s.sim.warmup_s < 0) throw ScenarioError("simulation: bad duration or warmup");
    s.sim.parallel = !serial;
    const Instance inst(s);
    double rt = 0;
    if (load)
        rt = *load * inst.capacity().max_rt_bps;
    else if (auto g = inst.load_grid(); !g.empty())
        rt = g.front();
    else
        rt = 0.5 * inst.capacity().max_rt_bps;
    if (!(rt > 0)) throw ScenarioError("simulate: load must be positive");
    std::ofstream tr;
    SimConfig cfg = s.sim;
    if (!trace.empty()) {
        tr.open(trace);
        if (!tr) {
            std::cerr << "cannot write " << trace << '\n';
            return 1;
        }
        cfg.trace = &tr;
    }
    const SimStats st = run_full_network(inst.topology(), inst.routes(), inst.at_rate(rt), s.mode, cfg, s.lengths);
    if (!st.audit.conserved() || st.audit.drops > 0) std::cerr << "warning: packet audit failed\n";
    if (!st.audit.drained) std::cerr << "warning: measured packets still queued at the drain limit (overload?)\n";
    return with_output(o.output, [&](std::ostream& os) { write_sim_csv(os, st); });
}

int cmd_sweep(const Common& o, bool simulate)
{
    const Instance inst(resolve(o));
    SweepOptions opt;
    opt.simulate = simulate;
    const auto pts = run_sweep(inst, grid_or(inst, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}), opt);
    return with_output(o.output, [&](std::ostream& os) { write_sweep_csv(os, pts); });
}

int cmd_compare(const Common& o, const std::vector<std::string>& classes, double tol)
{
    const Instance inst(resolve(o));
    for (const auto& c : classes) {
        bool known = false;
        for (const auto& n : delay_class_names()) known = known || n == c;
        if (!known) throw ScenarioError("compare: unknown class " + c);
    }
    SweepOptions opt;
    opt.simulate = true;
    const auto pts = run_sweep(inst, grid_or(inst, {0.1, 0.3, 0.5, 0.7}), opt);
    const auto rows = compare_points(pts, classes, tol);
    const int rc = with_output(o.output, [&](std::ostream& os) { write_comparison_csv(os, rows); });
    if (rc != kOk) return rc;
    return all_pass(rows) ? kOk : kViolation;
}

int cmd_tables(const std::string& output)
{
    const auto cells = reproduce_tables();
    const int rc = with_output(output, [&](std::ostream& os) { write_tables_csv(os, cells); });
    if (rc != kOk) return rc;
    int cf = 0, en = 0;
    for (const auto& c : cells) {
        cf += c.closed_form_ok;
        en += c.engine_ok;
    }
    std::cerr << "closed forms: " << cf << '/' << cells.size() << " cells within " << kTableTolerance
              << " Gb/s; engine: " << en << '/' << cells.size() << '\n';
    return cf == static_cast<int>(cells.size()) && en == static_cast<int>(cells.size()) ? kOk : kViolation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Capacity, delay and simulation tool for WDM-upgraded PON access and metro networks"};
    app.require_subcommand(1);

    Common cap_o, del_o, sim_o, swp_o, cmp_o;
    std::string routes_path, trace, tables_out;
    std::optional<double> load, duration, warmup;
    bool serial = false, sweep_sim = false;
    std::vector<std::string> classes{"overall"};
    double tol = 0.15;

    auto* cap = app.add_subcommand("capacity", "constraint bounds and the bottleneck");
    add_common(cap, cap_o, false);
    cap->add_option("--routes", routes_path, "also write i,j,link,probability to this file");

    auto* del = app.add_subcommand("delay", "analytic mean delays over a load grid");
    add_common(del, del_o, true);

    auto* sim = app.add_subcommand("simulate", "packet-level simulation at one load");
    add_common(sim, sim_o, false);
    add_sim(sim, sim_o);
    sim->add_option("--load", load, "load as a fraction of the capacity bound");
    sim->add_option("--duration", duration, "measurement window per replication [s]");
    sim->add_option("--warmup", warmup, "warmup per replication [s]");
    sim->add_option("--trace", trace, "write one line per event to this file (serial run)");
    sim->add_flag("--serial", serial, "run replications serially");

    auto* swp = app.add_subcommand("sweep", "load sweep, analytic and optionally simulated");
    add_common(swp, swp_o, true);
    add_sim(swp, swp_o);
    swp->add_flag("--simulate", sweep_sim, "also simulate every grid point");

    auto* cmp = app.add_subcommand("compare", "analysis against simulation; exit 3 on a tolerance violation");
    add_common(cmp, cmp_o, true);
    add_sim(cmp, cmp_o);
    cmp->add_option("--class", classes, "delay classes to compare");
    cmp->add_option("--tolerance", tol, "maximum relative gap")->check(CLI::PositiveNumber);

    auto* tab = app.add_subcommand("reproduce-tables", "appendix limits via closed forms and the constraint engine");
    tab->add_option("--output", tables_out, "CSV destination (default stdout)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*cap) return cmd_capacity(cap_o, routes_path);
        if (*del) return cmd_delay(del_o);
        if (*sim) return cmd_simulate(sim_o, load, duration, warmup, trace, serial);
        if (*swp) return cmd_sweep(swp_o, sweep_sim);
        if (*cmp) return cmd_compare(cmp_o, classes, tol);
        if (*tab) return cmd_tables(tables_out);
    } catch (const ScenarioError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kInvalid;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}
