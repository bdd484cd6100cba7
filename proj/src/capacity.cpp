#include "ngpon/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ngpon/format.hpp"

namespace ngpon {

const char* to_string(CarrierMode m) { return m == CarrierMode::Reflection ? "reflection" : "empty"; }

const char* to_string(ConstraintFamily f)
{
    switch (f) {
    case ConstraintFamily::TdmUp: return "tdm_up";
    case ConstraintFamily::WdmUp: return "wdm_up";
    case ConstraintFamily::TdmDown: return "tdm_down";
    case ConstraintFamily::WdmDown: return "wdm_down";
    case ConstraintFamily::WdmEmpty: return "wdm_empty";
    case ConstraintFamily::Psc: return "psc";
    case ConstraintFamily::Ring: return "ring";
    case ConstraintFamily::Awg: return "awg";
    case ConstraintFamily::OnuUp: return "onu_up";
    case ConstraintFamily::OnuAwg: return "onu_awg";
    }
    return "?";
}

namespace {

void scale_vec(std::vector<double>& v, double f)
{
    for (auto& x : v) x *= f;
}

void add_vec(std::vector<double>& a, const std::vector<double>& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

} // namespace

void LoadReport::scale(double f)
{
    for (auto* v : {&tdm_up, &wdm_up, &tdm_down, &wdm_down, &psc, &ring, &awg, &onu_up, &onu_awg}) scale_vec(*v, f);
    r_T_bps *= f;
}

void LoadReport::add(const LoadReport& o)
{
    add_vec(tdm_up, o.tdm_up);
    add_vec(wdm_up, o.wdm_up);
    add_vec(tdm_down, o.tdm_down);
    add_vec(wdm_down, o.wdm_down);
    add_vec(psc, o.psc);
    add_vec(ring, o.ring);
    add_vec(awg, o.awg);
    add_vec(onu_up, o.onu_up);
    add_vec(onu_awg, o.onu_awg);
    r_T_bps += o.r_T_bps;
}

LoadReport make_empty_loads(const Topology& topo, const LinkSpace& links)
{
    const std::size_t P = topo.cos.size();
    LoadReport r;
    r.tdm_up.assign(P, 0);
    r.wdm_up.assign(P, 0);
    r.tdm_down.assign(P, 0);
    r.wdm_down.assign(P, 0);
    r.psc.assign(P, 0);
    r.ring.assign(links.ring_links(), 0);
    r.awg.assign(P * P, 0);
    r.onu_up.assign(topo.size(), 0);
    r.onu_awg.assign(topo.size(), 0);
    return r;
}

namespace {

void accumulate_row(const RouteTable& routes, const TrafficMatrices& m, double mean_bits, std::size_t i,
                    LoadReport& r)
{
    const Topology& t = routes.topology();
    const LinkSpace& s = routes.links();
    const std::size_t n = t.size();
    const std::size_t P = t.cos.size();
    const Node& a = t.nodes[i];
    for (std::size_t j = 0; j < n; ++j) {
        const Node& b = t.nodes[j];
        const double x = mean_bits * m.T(i, j);
        if (x > 0) {
            r.r_T_bps += x;
            if (is_onu(a.kind)) {
                (uses_wdm(a.kind) ? r.wdm_up : r.tdm_up)[static_cast<std::size_t>(a.co)] += x;
                r.onu_up[i] += x;
            }
            if (is_onu(b.kind)) (uses_wdm(b.kind) ? r.wdm_down : r.tdm_down)[static_cast<std::size_t>(b.co)] += x;
            if (a.ring_pos != b.ring_pos) {
                for (const auto& [e, p] : routes.link_probs(a.ring_pos, b.ring_pos)) {
                    if (s.is_ring(e))
                        r.ring[e] += p * x;
                    else if (s.is_psc(e))
                        r.psc[static_cast<std::size_t>(s.describe(e).to)] += p * x;
                }
            }
        }
        const double y = mean_bits * m.TA(i, j);
        if (y > 0) {
            r.r_T_bps += y;
            r.awg[static_cast<std::size_t>(a.co) * P + static_cast<std::size_t>(b.co)] += y;
            r.onu_awg[i] += y;
        }
    }
}

} // namespace

LoadReport channel_loads(const RouteTable& routes, const TrafficMatrices& m, double mean_bits)
{
    const Topology& t = routes.topology();
    LoadReport r = make_empty_loads(t, routes.links());
    for (std::size_t i = 0; i < t.size(); ++i) accumulate_row(routes, m, mean_bits, i, r);
    return r;
}

LoadReport channel_loads_parallel(const RouteTable& routes, const TrafficMatrices& m, double mean_bits)
{
    const Topology& t = routes.topology();
    constexpr std::size_t block = 16;
    const std::size_t n = t.size();
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<LoadReport> partial(nblocks, make_empty_loads(t, routes.links()));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
        const auto lo = static_cast<std::size_t>(b) * block;
        const auto hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) accumulate_row(routes, m, mean_bits, i, partial[static_cast<std::size_t>(b)]);
    }
    LoadReport r = make_empty_loads(t, routes.links());
    for (const auto& p : partial) r.add(p);
    return r;
}

double CapacityReport::family_min(ConstraintFamily f) const
{
    double v = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints)
        if (c.family == f) v = std::min(v, c.bound_bps);
    return v;
}

CapacityReport constraint_bounds(const Topology& topo, const LoadReport& loads, CarrierMode mode)
{
    CapacityReport rep;
    rep.pattern_rt_bps = loads.r_T_bps;
    const double rt = loads.r_T_bps;
    auto add = [&](ConstraintFamily f, int index, std::string id, double cap, double load) {
        if (!(load > 0)) return;
        const double bound = cap > 0 ? cap / load * rt : 0.0;
        rep.constraints.push_back(ConstraintBound{std::move(id), f, index, cap, load, bound});
    };
    auto tag = [](const char* fam, int k) { return std::string(fam) + "[" + std::to_string(k) + "]"; };
    const int P = static_cast<int>(topo.cos.size());
    const auto& cos = topo.cos;

    for (int k = 0; k < P; ++k)
        add(ConstraintFamily::TdmUp, k, tag("tdm_up", k), cos[k].tdm_bps, loads.tdm_up[k]);
    for (int k = 0; k < P; ++k)
        if (loads.wdm_up[k] > 0)
            add(ConstraintFamily::WdmUp, k, tag("wdm_up", k), cos[k].wdm_channels * cos[k].wdm_bps + cos[k].tdm_bps,
                loads.tdm_up[k] + loads.wdm_up[k]);
    for (int k = 0; k < P; ++k)
        add(ConstraintFamily::TdmDown, k, tag("tdm_down", k), cos[k].tdm_bps, loads.tdm_down[k]);
    for (int k = 0; k < P; ++k)
        if (loads.wdm_down[k] > 0)
            add(ConstraintFamily::WdmDown, k, tag("wdm_down", k), cos[k].wdm_channels * cos[k].wdm_bps + cos[k].tdm_bps,
                loads.tdm_down[k] + loads.wdm_down[k]);
    if (mode == CarrierMode::EmptyCarrier)
        for (int k = 0; k < P; ++k)
            if (loads.wdm_up[k] + loads.wdm_down[k] > 0)
                add(ConstraintFamily::WdmEmpty, k, tag("wdm_empty", k),
                    cos[k].tdm_bps + cos[k].wdm_channels * cos[k].wdm_bps,
                    loads.tdm_up[k] + loads.wdm_up[k] + loads.tdm_down[k] + loads.wdm_down[k]);
    for (int l = 0; l < P; ++l)
        add(ConstraintFamily::Psc, l, tag("psc", l), cos[l].home_channels * topo.params.psc_bps, loads.psc[l]);
    const int L = topo.ring_positions;
    for (std::size_t e = 0; e < loads.ring.size(); ++e) {
        const int from = static_cast<int>(e / 2);
        const int to = e % 2 == 0 ? (from + 1) % L : (from + L - 1) % L;
        add(ConstraintFamily::Ring, static_cast<int>(e), "ring[" + std::to_string(from) + ">" + std::to_string(to) + "]",
            topo.params.ring_bps, loads.ring[e]);
    }
    for (int k = 0; k < P; ++k)
        for (int l = 0; l < P; ++l)
            add(ConstraintFamily::Awg, k * P + l, "awg[" + std::to_string(k) + "," + std::to_string(l) + "]",
                topo.awg_channels(k, l) * topo.params.awg_bps, loads.awg_load(k, l));
    for (const auto& nd : topo.nodes) {
        if (!is_onu(nd.kind)) continue;
        const auto& co = cos[static_cast<std::size_t>(nd.co)];
        const double cap = uses_wdm(nd.kind) && co.wdm_channels > 0 ? co.tdm_bps + co.wdm_bps : co.tdm_bps;
        add(ConstraintFamily::OnuUp, static_cast<int>(nd.id.v), tag("onu_up", static_cast<int>(nd.id.v)), cap,
            loads.onu_up[nd.id.v]);
    }
    for (const auto& nd : topo.nodes)
        if (nd.kind == NodeKind::LrOnu)
            add(ConstraintFamily::OnuAwg, static_cast<int>(nd.id.v), tag("onu_awg", static_cast<int>(nd.id.v)),
                topo.params.awg_bps, loads.onu_awg[nd.id.v]);

    rep.max_rt_bps = std::numeric_limits<double>::infinity();
    for (const auto& c : rep.constraints) rep.max_rt_bps = std::min(rep.max_rt_bps, c.bound_bps);
    for (std::size_t i = 0; i < rep.constraints.size(); ++i)
        if (rep.constraints[i].bound_bps <= rep.max_rt_bps * (1 + 1e-12)) {
            rep.bottleneck = static_cast<int>(i);
            break;
        }
    return rep;
}

CapacityReport constraint_bounds(const RouteTable& routes, const TrafficMatrices& pattern, double mean_bits,
                                 CarrierMode mode)
{
    return constraint_bounds(routes.topology(), channel_loads_parallel(routes, pattern, mean_bits), mode);
}

void write_capacity_csv(std::ostream& os, const CapacityReport& r)
{
    os << "constraint,bound_bps,binding\n";
    for (std::size_t i = 0; i < r.constraints.size(); ++i)
        os << r.constraints[i].id << ',' << fmt_sig(r.constraints[i].bound_bps) << ','
           << (static_cast<int>(i) == r.bottleneck ? 1 : 0) << '\n';
}

} // namespace ngpon
