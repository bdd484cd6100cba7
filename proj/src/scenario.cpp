#include "ngpon/scenario.hpp"

#include <fstream>
#include <set>

namespace ngpon {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ScenarioError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, T dflt, const std::string& where)
{
    if (!j.contains(key)) return dflt;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ScenarioError(where + "." + key + ": wrong type");
    }
}

// A scalar broadcasts to every CO.
template <class T>
std::vector<T> get_vec(const json& j, const char* key, std::vector<T> dflt, const std::string& where)
{
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    try {
        if (v.is_array()) return v.get<std::vector<T>>();
        return {v.get<T>()};
    } catch (const json::exception&) {
        throw ScenarioError(where + "." + key + ": wrong type");
    }
}

TopologyParams parse_topology(const json& j)
{
    const std::string w = "topology";
    check_keys(j, {"cos", "hotspots", "ring_nodes", "onus_per_pon", "onus", "pon", "psc", "tdm_bps", "wdm_bps",
                   "wdm_channels", "home_channels", "psc_bps", "awg_bps", "ring_bps", "awg_channels", "tree_prop_s",
                   "psc_prop_s", "awg_prop_s", "ring_circumference_m", "light_speed_mps", "psc_frame_s",
                   "gpon_frame_s", "gpon_offset_s"},
               w);
    TopologyParams p;
    p.cos = get(j, "cos", p.cos, w);
    p.hotspots = get(j, "hotspots", p.hotspots, w);
    p.ring_nodes = get(j, "ring_nodes", p.ring_nodes, w);
    p.onus_per_pon = get(j, "onus_per_pon", p.onus_per_pon, w);
    if (j.contains("onus")) {
        const json& o = j.at("onus");
        auto one = [&](const json& m) {
            check_keys(m, {"tdm", "wdm", "lr"}, w + ".onus");
            return OnuMix{get(m, "tdm", 0, w), get(m, "wdm", 0, w), get(m, "lr", 0, w)};
        };
        if (o.is_array())
            for (const auto& m : o) p.onus.push_back(one(m));
        else
            p.onus.push_back(one(o));
    }
    const auto pon = get<std::string>(j, "pon", "epon", w);
    if (pon == "epon")
        p.pon = PonType::Epon;
    else if (pon == "gpon")
        p.pon = PonType::Gpon;
    else
        throw ScenarioError("topology.pon: expected epon or gpon");
    p.psc = get(j, "psc", p.psc, w);
    p.tdm_bps = get_vec(j, "tdm_bps", p.tdm_bps, w);
    p.wdm_bps = get_vec(j, "wdm_bps", p.wdm_bps, w);
    p.wdm_channels = get_vec(j, "wdm_channels", p.wdm_channels, w);
    p.home_channels = get_vec(j, "home_channels", p.home_channels, w);
    p.awg_channels = get_vec(j, "awg_channels", p.awg_channels, w);
    p.psc_bps = get(j, "psc_bps", p.psc_bps, w);
    p.awg_bps = get(j, "awg_bps", p.awg_bps, w);
    p.ring_bps = get(j, "ring_bps", p.ring_bps, w);
    p.tree_prop_s = get(j, "tree_prop_s", p.tree_prop_s, w);
    p.psc_prop_s = get(j, "psc_prop_s", p.psc_prop_s, w);
    p.awg_prop_s = get(j, "awg_prop_s", p.awg_prop_s, w);
    p.ring_circumference_m = get(j, "ring_circumference_m", p.ring_circumference_m, w);
    p.light_speed_mps = get(j, "light_speed_mps", p.light_speed_mps, w);
    p.psc_frame_s = get(j, "psc_frame_s", p.psc_frame_s, w);
    p.gpon_frame_s = get(j, "gpon_frame_s", p.gpon_frame_s, w);
    if (j.contains("gpon_offset_s")) {
        const json& o = j.at("gpon_offset_s");
        if (o.is_string()) {
            if (o.get<std::string>() != "optimal") throw ScenarioError("topology.gpon_offset_s: number or \"optimal\"");
            if (p.gpon_frame_s <= 0) throw ScenarioError("topology: GPON frame length must be positive");
            p.gpon_offset_s = gpon_optimal_offset(p.tree_prop_s, p.gpon_frame_s);
        } else {
            p.gpon_offset_s = get(j, "gpon_offset_s", 0.0, w);
        }
    }
    return p;
}

TrafficSpec parse_traffic(const json& j)
{
    const std::string w = "traffic";
    check_keys(j, {"kind", "sigma_pps", "alpha", "beta", "n_low", "n_med", "n_high", "entries"}, w);
    TrafficSpec t;
    const auto kind = get<std::string>(j, "kind", "uniform", w);
    if (kind == "uniform")
        t.kind = TrafficKind::Uniform;
    else if (kind == "nonuniform_src")
        t.kind = TrafficKind::NonuniformSrc;
    else if (kind == "nonuniform_src_dst")
        t.kind = TrafficKind::NonuniformSrcDst;
    else if (kind == "matrix")
        t.kind = TrafficKind::Matrix;
    else
        throw ScenarioError("traffic.kind: expected uniform, nonuniform_src, nonuniform_src_dst or matrix");
    t.sigma_pps = get(j, "sigma_pps", t.sigma_pps, w);
    t.alpha = get(j, "alpha", t.alpha, w);
    t.beta = get(j, "beta", t.beta, w);
    t.n_low = get(j, "n_low", t.n_low, w);
    t.n_med = get(j, "n_med", t.n_med, w);
    t.n_high = get(j, "n_high", t.n_high, w);
    if (j.contains("entries")) {
        for (const auto& e : j.at("entries")) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned() ||
                !e[2].is_number())
                throw ScenarioError("traffic.entries: expected [src, dst, pps] triples");
            t.entries.push_back({e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>(), e[2].get<double>()});
        }
    }
    if (t.kind == TrafficKind::Matrix && t.entries.empty()) throw ScenarioError("traffic: matrix kind needs entries");
    return t;
}

PacketLengthDist parse_lengths(const json& j)
{
    const std::string w = "packet_length";
    check_keys(j, {"min_bytes", "max_bytes", "fixed_bits"}, w);
    if (j.contains("fixed_bits")) {
        if (j.contains("min_bytes") || j.contains("max_bytes"))
            throw ScenarioError("packet_length: fixed_bits excludes min/max_bytes");
        return PacketLengthDist::fixed_bits(get<std::uint32_t>(j, "fixed_bits", 0, w));
    }
    return PacketLengthDist::uniform_bytes(get<std::uint32_t>(j, "min_bytes", 64, w),
                                           get<std::uint32_t>(j, "max_bytes", 1518, w));
}

SimConfig parse_sim(const json& j)
{
    const std::string w = "simulation";
    check_keys(j, {"seed", "warmup_s", "duration_s", "replications", "drain_limit_s"}, w);
    SimConfig c;
    c.seed = get(j, "seed", c.seed, w);
    c.warmup_s = get(j, "warmup_s", c.warmup_s, w);
    c.duration_s = get(j, "duration_s", c.duration_s, w);
    c.replications = get(j, "replications", c.replications, w);
    c.drain_limit_s = get(j, "drain_limit_s", c.drain_limit_s, w);
    if (c.warmup_s < 0 || !(c.duration_s > 0) || c.replications < 1 || c.drain_limit_s < 0)
        throw ScenarioError("simulation: need warmup >= 0, duration > 0, replications >= 1");
    return c;
}

void check_grid(const std::vector<double>& g, const char* what)
{
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] >= 0)) throw ScenarioError(std::string("load.") + what + ": values must be >= 0");
        if (i > 0 && !(g[i] > g[i - 1]))
            throw ScenarioError(std::string("load.") + what + ": values must be strictly increasing");
    }
}

} // namespace

CarrierMode parse_mode(const std::string& s)
{
    if (s == "reflection") return CarrierMode::Reflection;
    if (s == "empty" || s == "empty_carrier") return CarrierMode::EmptyCarrier;
    throw ScenarioError("mode: expected reflection or empty");
}

GrantPolicy parse_grant(const std::string& s)
{
    if (s == "priority") return GrantPolicy::NonPreemptivePriority;
    if (s == "none") return GrantPolicy::NoPriority;
    throw ScenarioError("grant: expected priority or none");
}

Scenario parse_scenario(const json& j)
{
    check_keys(j, {"name", "topology", "traffic", "packet_length", "mode", "grant", "simulation", "load"}, "scenario");
    Scenario s;
    s.name = get<std::string>(j, "name", s.name, "scenario");
    s.topology = parse_topology(j.value("topology", json::object()));
    s.traffic = parse_traffic(j.value("traffic", json::object()));
    if (j.contains("packet_length")) s.lengths = parse_lengths(j.at("packet_length"));
    s.mode = parse_mode(get<std::string>(j, "mode", "reflection", "scenario"));
    s.grant = parse_grant(get<std::string>(j, "grant", "priority", "scenario"));
    if (j.contains("simulation")) s.sim = parse_sim(j.at("simulation"));
    s.sim.grant = s.grant;
    if (j.contains("load")) {
        const json& l = j.at("load");
        check_keys(l, {"fractions", "r_T_bps"}, "load");
        s.load_fractions = get_vec(l, "fractions", std::vector<double>{}, "load");
        s.load_bps = get_vec(l, "r_T_bps", std::vector<double>{}, "load");
        check_grid(s.load_fractions, "fractions");
        check_grid(s.load_bps, "r_T_bps");
    }
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return parse_scenario(j);
}

json scenario_to_json(const Scenario& s)
{
    const auto& p = s.topology;
    json onus = json::array();
    for (const auto& m : p.onus) onus.push_back({{"tdm", m.tdm}, {"wdm", m.wdm}, {"lr", m.lr}});
    json topo = {{"cos", p.cos},
                 {"hotspots", p.hotspots},
                 {"ring_nodes", p.ring_nodes},
                 {"onus_per_pon", p.onus_per_pon},
                 {"onus", onus},
                 {"pon", to_string(p.pon)},
                 {"psc", p.psc},
                 {"tdm_bps", p.tdm_bps},
                 {"wdm_bps", p.wdm_bps},
                 {"wdm_channels", p.wdm_channels},
                 {"home_channels", p.home_channels},
                 {"psc_bps", p.psc_bps},
                 {"awg_bps", p.awg_bps},
                 {"ring_bps", p.ring_bps},
                 {"awg_channels", p.awg_channels},
                 {"tree_prop_s", p.tree_prop_s},
                 {"psc_prop_s", p.psc_prop_s},
                 {"awg_prop_s", p.awg_prop_s},
                 {"ring_circumference_m", p.ring_circumference_m},
                 {"light_speed_mps", p.light_speed_mps},
                 {"psc_frame_s", p.psc_frame_s},
                 {"gpon_frame_s", p.gpon_frame_s},
                 {"gpon_offset_s", p.gpon_offset_s}};
    static const char* kinds[] = {"uniform", "nonuniform_src", "nonuniform_src_dst", "matrix"};
    json traffic = {{"kind", kinds[static_cast<int>(s.traffic.kind)]},
                    {"sigma_pps", s.traffic.sigma_pps},
                    {"alpha", s.traffic.alpha},
                    {"beta", s.traffic.beta},
                    {"n_low", s.traffic.n_low},
                    {"n_med", s.traffic.n_med},
                    {"n_high", s.traffic.n_high}};
    if (!s.traffic.entries.empty()) {
        json e = json::array();
        for (const auto& x : s.traffic.entries) e.push_back({x.src, x.dst, x.pps});
        traffic["entries"] = e;
    }
    json len = s.lengths.deterministic() ? json{{"fixed_bits", s.lengths.min_bits()}}
                                         : json{{"min_bytes", s.lengths.min_bits() / 8}, {"max_bytes", s.lengths.max_bits() / 8}};
    json out = {{"name", s.name},
                {"topology", topo},
                {"traffic", traffic},
                {"packet_length", len},
                {"mode", to_string(s.mode)},
                {"grant", to_string(s.grant)},
                {"simulation",
                 {{"seed", s.sim.seed},
                  {"warmup_s", s.sim.warmup_s},
                  {"duration_s", s.sim.duration_s},
                  {"replications", s.sim.replications},
                  {"drain_limit_s", s.sim.drain_limit_s}}}};
    json load = json::object();
    if (!s.load_fractions.empty()) load["fractions"] = s.load_fractions;
    if (!s.load_bps.empty()) load["r_T_bps"] = s.load_bps;
    if (!load.empty()) out["load"] = load;
    return out;
}

Instance::Instance(const Scenario& s)
    : scenario_(s),
      topo_(build_topology(s.topology)),
      routes_(topo_),
      pattern_(generate_traffic(topo_, s.traffic)),
      flow_(routes_, pattern_, s.lengths),
      cap_(constraint_bounds(topo_, flow_.unit_loads(), s.mode))
{
    if (!(pattern_.total_pps() > 0)) throw ScenarioError("traffic: pattern carries no traffic");
    if (s.mode == CarrierMode::EmptyCarrier && topo_.params.pon == PonType::Gpon)
        throw ScenarioError("mode: empty carrier is only defined for EPON trees");
}

TrafficMatrices Instance::at_rate(double r_T_bps) const
{
    TrafficMatrices m = pattern_;
    m.scale(r_T_bps / flow_.unit_rt_bps());
    return m;
}

std::vector<double> Instance::load_grid() const
{
    std::vector<double> g;
    if (!scenario_.load_fractions.empty()) {
        for (double f : scenario_.load_fractions) g.push_back(f * cap_.max_rt_bps);
    } else {
        g = scenario_.load_bps;
    }
    return g;
}

} // namespace ngpon
