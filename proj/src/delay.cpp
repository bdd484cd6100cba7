#include "ngpon/delay.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "ngpon/format.hpp"

namespace ngpon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Queue wait minus correction, floored at zero.
double net_wait(double phi, double B, int& clamped)
{
    if (!std::isfinite(phi) || !std::isfinite(B)) return kInf;
    const double w = phi - B;
    if (w < 0) {
        ++clamped;
        return 0.0;
    }
    return w;
}

} // namespace

QueueParams queue_params(double rho, double C, const PacketLengthDist& d)
{
    return QueueParams{rho, C, d.mean_bits(), d.variance_bits2()};
}

double pk_wait(const QueueParams& q)
{
    if (!(q.rho < 1)) return kInf;
    if (q.rho <= 0) return 0.0;
    return q.rho * (q.var_bits2 / q.mean_bits + q.mean_bits) / (2 * q.C * (1 - q.rho));
}

double correction_term(const std::vector<QueueParams>& feeders)
{
    double b = 0;
    for (const auto& f : feeders) b += pk_wait(f);
    return b;
}

double switchover_prob(double l1, double l2)
{
    if (l1 < 0 || l2 < 0) throw std::invalid_argument("switchover_prob: negative rate");
    const double s = l1 + l2;
    if (!(s > 0)) throw std::invalid_argument("switchover_prob: both rates are zero");
    return 2 * l1 * l2 / (s * s);
}

Gammas gpon_gammas(double tau, double omega, double delta)
{
    auto gap = [delta](double x) { return (std::floor(x / delta) + 1) * delta - x; };
    return Gammas{gap(tau - omega), gap(tau + omega)};
}

double gpon_optimal_offset(double tau, double delta)
{
    const double f = tau / delta - std::floor(tau / delta);
    // Case A: any omega/delta in (f, 1-f). Case B: any omega/delta in [0, 1-f).
    if (f < 1 - f) return 0.5 * delta;
    return 0.5 * (1 - f) * delta;
}

const char* to_string(GrantPolicy g) { return g == GrantPolicy::NoPriority ? "none" : "priority"; }

FlowModel::FlowModel(const RouteTable& routes, const TrafficMatrices& unit, const PacketLengthDist& len)
    : routes_(&routes), len_(len)
{
    const Topology& t = routes.topology();
    const LinkSpace& s = routes.links();
    P_ = static_cast<int>(t.cos.size());
    ports_ = static_cast<std::size_t>(t.ring_positions) * 3;
    nlinks_ = s.size();
    loads_ = channel_loads(routes, unit, len.mean_bits());
    flow_.assign(ports_ * ports_, 0);
    pair_.assign(nlinks_ * nlinks_, 0);
    awg_lr_.assign(static_cast<std::size_t>(P_ * P_), 0);
    awg_hot_.assign(static_cast<std::size_t>(P_ * P_), 0);

    const std::size_t n = t.size();
    auto chan = [](const Node& nd) { return is_onu(nd.kind) ? (uses_wdm(nd.kind) ? 2 : 1) : 0; };
    for (std::size_t i = 0; i < n; ++i) {
        const Node& a = t.nodes[i];
        for (std::size_t j = 0; j < n; ++j) {
            const Node& b = t.nodes[j];
            if (const double x = unit.T(i, j); x > 0) {
                flow_[static_cast<std::size_t>(port(a.ring_pos, chan(a))) * ports_ + port(b.ring_pos, chan(b))] += x;
                t_total_ += x;
            }
            if (const double y = unit.TA(i, j); y > 0) {
                auto& v = a.kind == NodeKind::LrOnu ? awg_lr_ : awg_hot_;
                v[static_cast<std::size_t>(a.co * P_ + b.co)] += y;
                ta_total_ += y;
            }
        }
    }

    const double L = len.mean_bits();
    for (int sp = 0; sp < static_cast<int>(ports_); ++sp) {
        for (int dp = 0; dp < static_cast<int>(ports_); ++dp) {
            const double x = flow(sp, dp);
            if (!(x > 0)) continue;
            const int pa = sp / 3, pb = dp / 3;
            const int ca = sp % 3, cb = dp % 3;
            std::vector<LinkId> head, tail;
            if (ca) head.push_back(s.tree_up(t.co_at_pos[pa], static_cast<TreeChannel>(ca - 1)));
            if (cb) tail.push_back(s.tree_down(t.co_at_pos[pb], static_cast<TreeChannel>(cb - 1)));
            auto add_seq = [&](const std::vector<LinkId>& seq, double p) {
                for (std::size_t q = 1; q < seq.size(); ++q) pair_[seq[q - 1] * nlinks_ + seq[q]] += p * x * L;
            };
            if (pa == pb) {
                std::vector<LinkId> seq = head;
                seq.insert(seq.end(), tail.begin(), tail.end());
                add_seq(seq, 1.0);
                continue;
            }
            for (const auto& path : routes.between(pa, pb)) {
                std::vector<LinkId> seq = head;
                seq.insert(seq.end(), path.links.begin(), path.links.end());
                seq.insert(seq.end(), tail.begin(), tail.end());
                add_seq(seq, path.probability);
            }
        }
    }
}

DelayInputs delay_inputs(const FlowModel& m, double r_T_bps, const DelayOptions& opt)
{
    if (r_T_bps < 0) throw std::invalid_argument("delay: negative throughput");
    DelayInputs in;
    in.model = &m;
    in.opt = opt;
    in.scale = m.unit_rt_bps() > 0 ? r_T_bps / m.unit_rt_bps() : 0.0;
    in.loads = m.unit_loads();
    in.loads.scale(in.scale);
    return in;
}

namespace {

// Rate of a link when it acts as a feeder queue.
double feeder_rate(const Topology& t, const LinkSpace& s, LinkId e)
{
    const DirectedLink d = s.describe(e);
    switch (d.kind) {
    case LinkKind::RingHop: return t.params.ring_bps;
    case LinkKind::PscIngress: return t.cos[static_cast<std::size_t>(d.to)].home_channels * t.params.psc_bps;
    case LinkKind::TreeUp: {
        const auto& co = t.cos[static_cast<std::size_t>(d.from)];
        return d.channel == TreeChannel::Tdm ? co.tdm_bps : co.wdm_channels * co.wdm_bps;
    }
    case LinkKind::TreeDown: return 0;
    }
    return 0;
}

// Sum of feeder waits for traffic entering `next` directly from a preceding queue.
// Tree-down channels count only ring and PSC feeders.
double feeder_correction(const DelayInputs& in, LinkId next)
{
    const FlowModel& m = *in.model;
    const Topology& t = m.topology();
    const LinkSpace& s = m.routes().links();
    const bool down = s.describe(next).kind == LinkKind::TreeDown;
    double b = 0;
    for (LinkId prev = 0; prev < s.size(); ++prev) {
        const double x = m.pair_load(prev, next);
        if (!(x > 0)) continue;
        const LinkKind k = s.describe(prev).kind;
        if (k == LinkKind::TreeDown) continue;
        if (down && k == LinkKind::TreeUp) continue;
        const double C = feeder_rate(t, s, prev);
        b += pk_wait(queue_params(x * in.scale / C, C, m.lengths()));
    }
    return b;
}

double phi(double load_bps, double C, const PacketLengthDist& d)
{
    if (!(C > 0)) return load_bps > 0 ? kInf : 0.0;
    return pk_wait(queue_params(load_bps / C, C, d));
}

bool has_tdm(const CentralOffice& co) { return co.mix.tdm > 0; }
bool has_wdm(const CentralOffice& co) { return co.mix.wdm + co.mix.lr > 0 && co.wdm_channels > 0; }

} // namespace

double grant_delay(const DelayInputs& in, int k)
{
    const Topology& t = in.model->topology();
    const auto& co = t.cos[static_cast<std::size_t>(k)];
    const double rho = in.loads.tdm_down[static_cast<std::size_t>(k)] / co.tdm_bps;
    if (in.opt.grant == GrantPolicy::NoPriority) return phi(in.loads.tdm_down[static_cast<std::size_t>(k)], co.tdm_bps, in.model->lengths());
    if (!(rho < 1)) return kInf;
    return rho * in.model->lengths().mean_bits() / (2 * co.tdm_bps);
}

TreeDelays epon_tdm_delays(const DelayInputs& in)
{
    const Topology& t = in.model->topology();
    const LinkSpace& s = in.model->routes().links();
    const auto& d = in.model->lengths();
    const double tau = t.params.tree_prop_s;
    const std::size_t P = t.cos.size();
    TreeDelays r;
    r.up.assign(P, kNan);
    r.down.assign(P, kNan);
    for (std::size_t k = 0; k < P; ++k) {
        const auto& co = t.cos[k];
        if (!has_tdm(co)) continue;
        const double tx = d.mean_bits() / co.tdm_bps;
        r.up[k] = 3 * tau + grant_delay(in, static_cast<int>(k)) + phi(in.loads.tdm_up[k], co.tdm_bps, d) + tau + tx;
        const double B = feeder_correction(in, s.tree_down(static_cast<int>(k), TreeChannel::Tdm));
        r.down[k] = tau + tx + net_wait(phi(in.loads.tdm_down[k], co.tdm_bps, d), B, r.clamped);
    }
    return r;
}

TreeDelays wdm_delays_reflection(const DelayInputs& in)
{
    const Topology& t = in.model->topology();
    const LinkSpace& s = in.model->routes().links();
    const auto& d = in.model->lengths();
    const double tau = t.params.tree_prop_s;
    const std::size_t P = t.cos.size();
    TreeDelays r;
    r.up.assign(P, kNan);
    r.down.assign(P, kNan);
    for (std::size_t k = 0; k < P; ++k) {
        const auto& co = t.cos[k];
        if (!has_wdm(co)) continue;
        const double Cw = co.wdm_channels * co.wdm_bps;
        const double tx = d.mean_bits() / co.wdm_bps;
        r.up[k] = 3 * tau + grant_delay(in, static_cast<int>(k)) + phi(in.loads.wdm_up[k], Cw, d) + tau + tx;
        const double B = feeder_correction(in, s.tree_down(static_cast<int>(k), TreeChannel::Wdm));
        r.down[k] = tau + tx + net_wait(phi(in.loads.wdm_down[k], Cw, d), B, r.clamped);
    }
    return r;
}

TreeDelays wdm_delays_empty(const DelayInputs& in)
{
    const Topology& t = in.model->topology();
    const LinkSpace& s = in.model->routes().links();
    const auto& d = in.model->lengths();
    const double tau = t.params.tree_prop_s;
    const std::size_t P = t.cos.size();
    TreeDelays r;
    r.up.assign(P, kNan);
    r.down.assign(P, kNan);
    for (std::size_t k = 0; k < P; ++k) {
        const auto& co = t.cos[k];
        if (!has_wdm(co)) continue;
        const double Cw = co.wdm_channels * co.wdm_bps;
        const double l1 = in.loads.wdm_down[k] / Cw;
        const double l2 = in.loads.wdm_up[k] / Cw;
        const double ps = l1 + l2 > 0 ? switchover_prob(l1, l2) : 0.0;
        // Service extended by one propagation time (C_W * tau bits) with probability ps.
        const double ext = co.wdm_bps * tau;
        const double L = d.mean_bits();
        const double m1 = L + ps * ext;
        const double m2 = d.second_moment_bits2() + 2 * L * ps * ext + ps * ext * ext;
        const double rho = (l1 + l2) * m1 / L;
        const double w = pk_wait(QueueParams{rho, Cw, m1, m2 - m1 * m1});
        const double tx = L / co.wdm_bps;
        r.up[k] = 3 * tau + grant_delay(in, static_cast<int>(k)) + w + tau + tx;
        const double B = feeder_correction(in, s.tree_down(static_cast<int>(k), TreeChannel::Wdm));
        r.down[k] = tau + tx + net_wait(w, B, r.clamped);
    }
    return r;
}

std::pair<TreeDelays, TreeDelays> gpon_delays(const DelayInputs& in)
{
    const Topology& t = in.model->topology();
    const LinkSpace& s = in.model->routes().links();
    const auto& d = in.model->lengths();
    const double tau = t.params.tree_prop_s;
    const double delta = t.params.gpon_frame_s;
    const Gammas g = gpon_gammas(tau, t.params.gpon_offset_s, delta);
    const double front = 2.5 * delta + g.g1 + g.g2 + 3 * tau;
    const std::size_t P = t.cos.size();
    TreeDelays td, wd;
    for (auto* r : {&td, &wd}) {
        r->up.assign(P, kNan);
        r->down.assign(P, kNan);
    }
    for (std::size_t k = 0; k < P; ++k) {
        const auto& co = t.cos[k];
        const int ki = static_cast<int>(k);
        if (has_tdm(co)) {
            const double tx = d.mean_bits() / co.tdm_bps;
            td.up[k] = front + phi(in.loads.tdm_up[k], co.tdm_bps, d) + tx;
            const double B = feeder_correction(in, s.tree_down(ki, TreeChannel::Tdm));
            td.down[k] = delta / 2 + tau + tx + net_wait(phi(in.loads.tdm_down[k], co.tdm_bps, d), B, td.clamped);
        }
        if (has_wdm(co)) {
            const double Cw = co.wdm_channels * co.wdm_bps;
            const double tx = d.mean_bits() / co.wdm_bps;
            wd.up[k] = front + phi(in.loads.wdm_up[k], Cw, d) + tx;
            const double B = feeder_correction(in, s.tree_down(ki, TreeChannel::Wdm));
            wd.down[k] = delta / 2 + tau + tx + net_wait(phi(in.loads.wdm_down[k], Cw, d), B, wd.clamped);
        }
    }
    return {td, wd};
}

double psc_delay(const DelayInputs& in, int l, bool* clamped)
{
    const Topology& t = in.model->topology();
    const LinkSpace& s = in.model->routes().links();
    const auto& d = in.model->lengths();
    const double C = t.cos[static_cast<std::size_t>(l)].home_channels * t.params.psc_bps;
    double B = 0;
    for (int k = 0; k < static_cast<int>(t.cos.size()); ++k)
        if (k != l) B += feeder_correction(in, s.psc(k, l));
    int c = 0;
    const double w = net_wait(phi(in.loads.psc[static_cast<std::size_t>(l)], C, d), B, c);
    if (clamped) *clamped = c > 0;
    return t.params.psc_frame_s / 2 + 2 * t.params.psc_prop_s + w + d.mean_bits() / t.params.psc_bps;
}

double ring_link_wait(const DelayInputs& in, LinkId e, bool* clamped)
{
    const Topology& t = in.model->topology();
    int c = 0;
    const double w = net_wait(phi(in.loads.ring[e], t.params.ring_bps, in.model->lengths()), feeder_correction(in, e), c);
    if (clamped) *clamped = c > 0;
    return w;
}

namespace {

// Metro leg over precomputed ring waits and PSC delays. One transmission time per
// store-and-forward segment: at the source and at every CO on the way.
double metro_delay(const FlowModel& m, int a, int b, const std::vector<double>& ring_wait, const std::vector<double>& psc)
{
    if (a == b) return 0.0;
    const Topology& t = m.topology();
    const LinkSpace& s = m.routes().links();
    const double tx = m.lengths().mean_bits() / t.params.ring_bps;
    const double hop = t.hop_prop_s();
    double total = 0;
    for (const auto& path : m.routes().between(a, b)) {
        double d = 0;
        for (std::size_t q = 0; q < path.links.size(); ++q) {
            const LinkId e = path.links[q];
            if (s.is_psc(e)) {
                d += psc[static_cast<std::size_t>(s.describe(e).to)];
                continue;
            }
            const int tail = static_cast<int>(e / 2);
            d += ring_wait[e] + hop;
            if (q == 0 || t.co_at_pos[static_cast<std::size_t>(tail)] >= 0) d += tx;
        }
        total += path.probability * d;
    }
    return total;
}

std::vector<double> all_ring_waits(const DelayInputs& in, int& clamped)
{
    const std::size_t n = in.model->routes().links().ring_links();
    std::vector<double> w(n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        if (!(in.loads.ring[e] > 0)) continue;
        bool c = false;
        w[e] = ring_link_wait(in, static_cast<LinkId>(e), &c);
        clamped += c;
    }
    return w;
}

std::vector<double> all_psc(const DelayInputs& in, int& clamped)
{
    const std::size_t P = in.model->topology().cos.size();
    std::vector<double> v(P, kNan);
    if (!in.model->topology().has_psc()) return v;
    for (std::size_t l = 0; l < P; ++l) {
        bool c = false;
        v[l] = psc_delay(in, static_cast<int>(l), &c);
        clamped += c;
    }
    return v;
}

} // namespace

double ring_delay(const DelayInputs& in, int a, int b, const std::vector<double>& psc)
{
    int c = 0;
    return metro_delay(*in.model, a, b, all_ring_waits(in, c), psc);
}

double awg_delay(const DelayInputs& in, int k, int l)
{
    const FlowModel& m = *in.model;
    const Topology& t = m.topology();
    const int c = t.awg_channels(k, l);
    if (c <= 0) return kNan;
    const auto& d = m.lengths();
    const double tau = t.params.tree_prop_s;
    const double C = c * t.params.awg_bps;
    const double base = phi(in.loads.awg_load(k, l), C, d) + t.params.awg_prop_s + d.mean_bits() / t.params.awg_bps;
    // LR ONUs register AWG packets over their tree first; hotspots send directly.
    double front;
    if (t.params.pon == PonType::Gpon) {
        const Gammas g = gpon_gammas(tau, t.params.gpon_offset_s, t.params.gpon_frame_s);
        front = 2.5 * t.params.gpon_frame_s + g.g1 + g.g2 + 2 * tau;
    } else {
        front = 3 * tau + grant_delay(in, k);
    }
    const double lr = m.awg_lr(k, l), hot = m.awg_hotspot(k, l);
    if (!(lr + hot > 0)) return front + base;
    return (lr * (front + base) + hot * base) / (lr + hot);
}

double awg_delay_avg(const DelayInputs& in)
{
    const FlowModel& m = *in.model;
    const int P = static_cast<int>(m.topology().cos.size());
    double num = 0, den = 0;
    for (int k = 0; k < P; ++k)
        for (int l = 0; l < P; ++l) {
            const double w = m.awg_lr(k, l) + m.awg_hotspot(k, l);
            if (!(w > 0)) continue;
            num += w * awg_delay(in, k, l);
            den += w;
        }
    return den > 0 ? num / den : kNan;
}

double overall_delay(double D_rp, double t_pps, double D_a, double ta_pps)
{
    const double tot = t_pps + ta_pps;
    if (!(tot > 0)) return kNan;
    double d = 0;
    if (t_pps > 0) d += D_rp * (t_pps / tot);
    if (ta_pps > 0) d += D_a * (ta_pps / tot);
    return d;
}

const std::vector<std::string>& delay_class_names()
{
    static const std::vector<std::string> names{"overall", "tdm_up", "wdm_up", "tdm_down", "wdm_down", "metro", "awg"};
    return names;
}

double DelayReport::class_delay(const std::string& name) const
{
    for (const auto& c : classes)
        if (c.name == name) return c.delay_s;
    throw std::invalid_argument("delay: unknown class " + name);
}

DelayReport compute_delays(const FlowModel& m, double r_T_bps, const DelayOptions& opt)
{
    const Topology& t = m.topology();
    if (t.params.pon == PonType::Gpon && opt.mode == CarrierMode::EmptyCarrier)
        throw ScenarioError("delay: empty-carrier mode is only defined for EPON trees");
    const DelayInputs in = delay_inputs(m, r_T_bps, opt);
    DelayReport r;
    r.r_T_bps = r_T_bps;
    if (t.params.pon == PonType::Gpon) {
        std::tie(r.tdm, r.wdm) = gpon_delays(in);
    } else {
        r.tdm = epon_tdm_delays(in);
        r.wdm = opt.mode == CarrierMode::Reflection ? wdm_delays_reflection(in) : wdm_delays_empty(in);
    }
    r.clamped = r.tdm.clamped + r.wdm.clamped;
    r.psc = all_psc(in, r.clamped);
    const std::vector<double> ring_wait = all_ring_waits(in, r.clamped);
    const int P = static_cast<int>(t.cos.size());
    r.awg.assign(static_cast<std::size_t>(P * P), kNan);
    for (int k = 0; k < P; ++k)
        for (int l = 0; l < P; ++l) r.awg[static_cast<std::size_t>(k * P + l)] = awg_delay(in, k, l);

    auto up = [&](int port) {
        const int ch = port % 3;
        if (!ch) return 0.0;
        const auto k = static_cast<std::size_t>(t.co_at_pos[static_cast<std::size_t>(port / 3)]);
        return ch == 1 ? r.tdm.up[k] : r.wdm.up[k];
    };
    auto down = [&](int port) {
        const int ch = port % 3;
        if (!ch) return 0.0;
        const auto k = static_cast<std::size_t>(t.co_at_pos[static_cast<std::size_t>(port / 3)]);
        return ch == 1 ? r.tdm.down[k] : r.wdm.down[k];
    };
    double num = 0, den = 0, mnum = 0, mden = 0;
    const int ports = static_cast<int>(m.ports());
    for (int sp = 0; sp < ports; ++sp)
        for (int dp = 0; dp < ports; ++dp) {
            const double x = m.flow(sp, dp);
            if (!(x > 0)) continue;
            const double metro = metro_delay(m, sp / 3, dp / 3, ring_wait, r.psc);
            num += x * (up(sp) + metro + down(dp));
            den += x;
            if (sp / 3 != dp / 3) {
                mnum += x * metro;
                mden += x;
            }
        }
    r.D_rp = den > 0 ? num / den : kNan;
    r.D_a = awg_delay_avg(in);
    r.D = overall_delay(r.D_rp, m.total_t_pps(), r.D_a, m.total_ta_pps());
    r.stable = !std::isinf(r.D) && !std::isnan(r.D);

    // Class weights come from the unit-shape loads so the zero-load point is defined too.
    const LoadReport& u = m.unit_loads();
    auto wmean = [](const std::vector<double>& w, const std::vector<double>& d) {
        double a = 0, b = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (!(w[k] > 0) || std::isnan(d[k])) continue;
            a += w[k] * d[k];
            b += w[k];
        }
        return b > 0 ? a / b : kNan;
    };
    r.classes = {
        {"overall", r.D},
        {"tdm_up", wmean(u.tdm_up, r.tdm.up)},
        {"wdm_up", wmean(u.wdm_up, r.wdm.up)},
        {"tdm_down", wmean(u.tdm_down, r.tdm.down)},
        {"wdm_down", wmean(u.wdm_down, r.wdm.down)},
        {"metro", mden > 0 ? mnum / mden : kNan},
        {"awg", r.D_a},
    };
    if (!r.stable) r.D = kInf;
    return r;
}

void write_delay_csv_header(std::ostream& os)
{
    os << "r_T_bps";
    for (const auto& n : delay_class_names()) os << ",D_" << n << "_s";
    os << '\n';
}

void write_delay_csv_row(std::ostream& os, const DelayReport& r)
{
    os << fmt_sig(r.r_T_bps);
    for (const auto& c : r.classes) os << ',' << (r.stable ? fmt_sig(c.delay_s) : std::string("unstable"));
    os << '\n';
}

} // namespace ngpon
