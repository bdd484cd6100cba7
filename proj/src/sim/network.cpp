// Packet-level network engine. Times are integer picoseconds; events are ordered by
// (time, kind, sequence) so identical seeds replay identically.
#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <queue>
#include <random>
#include <unordered_map>

#include "ngpon/simulator.hpp"

namespace ngpon {

namespace {

using Time = std::int64_t;

Time to_ps(double s) { return static_cast<Time>(std::llround(s * 1e12)); }
double to_s(Time t) { return static_cast<double>(t) * 1e-12; }

Time floor_div(Time a, Time b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Declaration order is the tie-break between simultaneous events.
enum class Ev : std::uint8_t {
    Deliver,
    DownDone,
    UpDone,
    TxEnd,
    AtPos,
    RingHead,
    PscEnqueue,
    AwgEnqueue,
    UpEligible,
    DownEligible,
    Report,
    Arrival,
};

const char* ev_name(Ev e)
{
    switch (e) {
    case Ev::Deliver: return "deliver";
    case Ev::DownDone: return "down_done";
    case Ev::UpDone: return "up_done";
    case Ev::TxEnd: return "ring_tx_end";
    case Ev::AtPos: return "at_pos";
    case Ev::RingHead: return "ring_head";
    case Ev::PscEnqueue: return "psc_enqueue";
    case Ev::AwgEnqueue: return "awg_enqueue";
    case Ev::UpEligible: return "up_eligible";
    case Ev::DownEligible: return "down_eligible";
    case Ev::Report: return "report";
    case Ev::Arrival: return "arrival";
    }
    return "?";
}

struct Event {
    Time t;
    Ev kind;
    std::uint64_t seq;
    std::uint32_t a;
};

struct Later {
    bool operator()(const Event& x, const Event& y) const
    {
        if (x.t != y.t) return x.t > y.t;
        if (x.kind != y.kind) return x.kind > y.kind;
        return x.seq > y.seq;
    }
};

// A channel whose transmissions are booked in request order.
struct Channel {
    double rate = 1;
    Time free = 0;
    Time busy_since = 0;
    bool last_down = false; // empty-carrier direction of the last booking
    std::deque<std::pair<Time, Time>> iv;
    bool keep_iv = false;

    Time tx(std::uint32_t bits) const { return static_cast<Time>(std::llround(bits * 1e12 / rate)); }

    // Books [start, start+dur) with start = max(ready, free). A wait is only legal if the
    // channel was busy for the whole of [ready, start).
    Time book(Time ready, Time dur, Audit& audit)
    {
        const Time s = std::max(ready, free);
        if (s > ready && busy_since > ready) ++audit.work_conservation_violations;
        if (s > free) busy_since = s;
        free = s + dur;
        if (keep_iv) iv.emplace_back(s, free);
        return s;
    }

    // End of the transmission in progress at t, or t when idle.
    Time current_end(Time t)
    {
        while (!iv.empty() && iv.front().second <= t) iv.pop_front();
        if (!iv.empty() && iv.front().first <= t) return iv.front().second;
        return t;
    }
};

struct Pkt {
    std::uint32_t src = 0, dst = 0;
    std::uint32_t bits = 0;
    Time gen = 0;
    Time stage = 0;       // start of the current tree-down segment
    Time metro_start = -1;
    std::int32_t pos = 0;   // current ring position
    std::int32_t entry = 0; // ring position where the metro leg started
    std::uint16_t path = 0;
    std::uint16_t hop = 0;
    bool awg = false;
    bool measured = false;
    bool prev_ring = false;
};

struct RingServer {
    std::deque<std::uint32_t> q[2]; // 0 transit, 1 add
    bool busy = false;
};

struct OnuState {
    std::deque<std::uint32_t> up, awg;
};

struct CoState {
    Channel tdm_up, tdm_down;
    std::vector<Channel> wdm_up, wdm_down;
    int wdm_onus = 0;
    // empty carrier
    struct Rep {
        std::uint32_t onu;
        std::size_t n_up, n_awg;
    };
    std::vector<Rep> reports;
    std::deque<std::uint32_t> down_buf;
    int rr = 0;
};

class Engine {
public:
    Engine(const Topology& topo, const RouteTable& routes, const TrafficMatrices& m, CarrierMode mode,
           const SimConfig& cfg, const PacketLengthDist& len, std::uint64_t seed)
        : t_(topo), routes_(routes), s_(routes.links()), m_(m), mode_(mode), cfg_(cfg), len_(len), rng_(seed)
    {
        if (topo.params.pon == PonType::Gpon && mode == CarrierMode::EmptyCarrier)
            throw ScenarioError("simulate: empty-carrier mode is only defined for EPON trees");
        gpon_ = topo.params.pon == PonType::Gpon;
        tau_ = to_ps(topo.params.tree_prop_s);
        tau_p_ = to_ps(topo.params.psc_prop_s);
        tau_a_ = to_ps(topo.params.awg_prop_s);
        hop_ = to_ps(topo.hop_prop_s());
        delta_ = to_ps(topo.params.gpon_frame_s);
        omega_ = to_ps(topo.params.gpon_offset_s);
        frame_p_ = to_ps(topo.params.psc_frame_s);
        w0_ = to_ps(cfg.warmup_s);
        w1_ = w0_ + to_ps(cfg.duration_s);
        hard_end_ = w1_ + to_ps(cfg.drain_limit_s);
        P_ = static_cast<int>(topo.cos.size());
        setup();
    }

    ReplicationResult run()
    {
        while (!q_.empty()) {
            const Event e = q_.top();
            if (e.t > hard_end_) break;
            q_.pop();
            now_ = e.t;
            if (cfg_.trace) *cfg_.trace << e.t << ' ' << ev_name(e.kind) << ' ' << e.a << '\n';
            dispatch(e);
            if (now_ >= w1_ && measured_in_flight_ == 0) break;
        }
        res_.audit.in_flight = res_.audit.generated - res_.audit.delivered;
        res_.audit.drained = measured_in_flight_ == 0;
        res_.window_s = cfg_.duration_s;
        res_.offered_bps = total_rate_bps(m_, len_.mean_bits());
        return std::move(res_);
    }

private:
    const Topology& t_;
    const RouteTable& routes_;
    const LinkSpace& s_;
    const TrafficMatrices& m_;
    CarrierMode mode_;
    const SimConfig& cfg_;
    const PacketLengthDist& len_;
    std::mt19937_64 rng_;
    bool gpon_ = false;
    Time tau_, tau_p_, tau_a_, hop_, delta_, omega_, frame_p_, w0_, w1_, hard_end_;
    int P_ = 0;
    Time now_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> q_;
    std::uint64_t seq_ = 0;

    std::vector<Pkt> pk_;
    std::vector<std::uint32_t> free_;
    std::uint64_t measured_in_flight_ = 0;

    std::vector<double> rate_; // per node, packets/s
    std::vector<std::discrete_distribution<std::uint32_t>> dest_;
    std::vector<OnuState> onu_;
    std::vector<CoState> co_;
    std::vector<RingServer> ring_;
    std::vector<std::vector<Channel>> psc_, awg_;
    std::unordered_map<std::uint64_t, Time> fifo_last_;
    ReplicationResult res_;

    void push(Time t, Ev k, std::uint32_t a) { q_.push(Event{t, k, seq_++, a}); }

    void setup()
    {
        const std::size_t n = t_.size();
        rate_.assign(n, 0);
        dest_.resize(n);
        onu_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> w(2 * n, 0.0);
            double r = 0;
            for (std::size_t j = 0; j < n; ++j) {
                w[j] = m_.T(i, j);
                w[n + j] = m_.TA(i, j);
                r += w[j] + w[n + j];
            }
            rate_[i] = r;
            if (r > 0) {
                dest_[i] = std::discrete_distribution<std::uint32_t>(w.begin(), w.end());
                schedule_arrival(static_cast<std::uint32_t>(i), 0);
            }
        }
        co_.resize(static_cast<std::size_t>(P_));
        for (int k = 0; k < P_; ++k) {
            const auto& co = t_.cos[static_cast<std::size_t>(k)];
            auto& st = co_[static_cast<std::size_t>(k)];
            st.tdm_up.rate = st.tdm_down.rate = co.tdm_bps;
            st.tdm_down.keep_iv = true;
            st.wdm_up.assign(static_cast<std::size_t>(co.wdm_channels), Channel{});
            st.wdm_down.assign(static_cast<std::size_t>(co.wdm_channels), Channel{});
            for (auto& c : st.wdm_up) c.rate = co.wdm_bps;
            for (auto& c : st.wdm_down) c.rate = co.wdm_bps;
            st.wdm_onus = co.mix.wdm + co.mix.lr;
            if (gpon_) continue;
            // Stagger the first reports over one round trip.
            const int nonu = static_cast<int>(co.onus.size());
            for (int i = 0; i < nonu; ++i)
                push(2 * tau_ * i / std::max(nonu, 1) + tau_, Ev::Report, co.onus[static_cast<std::size_t>(i)].v);
        }
        ring_.resize(s_.ring_links());
        psc_.resize(static_cast<std::size_t>(P_));
        if (t_.has_psc())
            for (int l = 0; l < P_; ++l) {
                psc_[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(t_.cos[static_cast<std::size_t>(l)].home_channels), Channel{});
                for (auto& c : psc_[static_cast<std::size_t>(l)]) c.rate = t_.params.psc_bps;
            }
        awg_.resize(static_cast<std::size_t>(P_ * P_));
        for (int k = 0; k < P_; ++k)
            for (int l = 0; l < P_; ++l) {
                auto& g = awg_[static_cast<std::size_t>(k * P_ + l)];
                g.assign(static_cast<std::size_t>(std::max(t_.awg_channels(k, l), 0)), Channel{});
                for (auto& c : g) c.rate = t_.params.awg_bps;
            }
    }

    void schedule_arrival(std::uint32_t i, Time from)
    {
        std::exponential_distribution<double> gap(rate_[i]);
        const Time t = from + std::max<Time>(1, to_ps(gap(rng_)));
        if (t < w1_) push(t, Ev::Arrival, i);
    }

    void dispatch(const Event& e)
    {
        switch (e.kind) {
        case Ev::Arrival: on_arrival(e.a); break;
        case Ev::Report: on_report(e.a); break;
        case Ev::UpDone: on_up_done(e.a); break;
        case Ev::UpEligible: on_up_eligible(e.a); break;
        case Ev::DownEligible: book_down(e.a); break;
        case Ev::DownDone: on_down_done(e.a); break;
        case Ev::AtPos: on_at_pos(e.a); break;
        case Ev::RingHead: forward(e.a); break;
        case Ev::TxEnd: on_ring_tx_end(e.a); break;
        case Ev::PscEnqueue: on_psc_enqueue(e.a); break;
        case Ev::AwgEnqueue: on_awg_enqueue(e.a); break;
        case Ev::Deliver: on_awg_deliver(e.a); break;
        }
    }

    bool in_window(Time t) const { return t >= w0_ && t < w1_; }

    void busy(const std::string& name, Time s, Time e, double share = 1.0)
    {
        const Time a = std::max(s, w0_), b = std::min(e, w1_);
        if (b > a) res_.busy_s[name] += to_s(b - a) * share;
    }

    void record(const char* cls, const Pkt& p, Time start)
    {
        if (p.measured) {
            res_.sum_s[cls] += to_s(now_ - start);
            res_.count[cls] += 1;
        }
        if (in_window(now_)) res_.bits[cls] += p.bits;
    }

    std::uint32_t alloc()
    {
        if (!free_.empty()) {
            const std::uint32_t id = free_.back();
            free_.pop_back();
            pk_[id] = Pkt{};
            return id;
        }
        pk_.emplace_back();
        return static_cast<std::uint32_t>(pk_.size() - 1);
    }

    const Node& node(std::uint32_t id) const { return t_.nodes[id]; }

    // ---- sources ----

    void on_arrival(std::uint32_t i)
    {
        const std::uint32_t n = static_cast<std::uint32_t>(t_.size());
        const std::uint32_t idx = dest_[i](rng_);
        const std::uint32_t id = alloc();
        Pkt& p = pk_[id];
        p.src = i;
        p.awg = idx >= n;
        p.dst = p.awg ? idx - n : idx;
        p.bits = len_.sample_bits(rng_);
        p.gen = now_;
        p.pos = node(i).ring_pos;
        p.measured = in_window(now_);
        ++res_.audit.generated;
        if (p.measured) ++measured_in_flight_;
        schedule_arrival(i, now_);

        const Node& a = node(i);
        if (is_onu(a.kind)) {
            if (gpon_) {
                push(gpon_eligible(now_), p.awg ? Ev::AwgEnqueue : Ev::UpEligible, id);
            } else {
                (p.awg ? onu_[i].awg : onu_[i].up).push_back(id);
            }
            return;
        }
        if (p.awg) {
            on_awg_enqueue(id);
            return;
        }
        p.metro_start = now_;
        enter_metro(id);
    }

    // ---- EPON polling ----

    Time grant_leave(int k, Time t)
    {
        auto& ch = co_[static_cast<std::size_t>(k)].tdm_down;
        if (cfg_.grant == GrantPolicy::NonPreemptivePriority) return ch.current_end(t);
        return std::max(t, ch.free);
    }

    // Packets at the head of q generated no later than the report instant.
    static std::size_t reported(const std::deque<std::uint32_t>& q, const std::vector<Pkt>& pk, Time rt)
    {
        std::size_t c = 0;
        while (c < q.size() && pk[q[c]].gen <= rt) ++c;
        return c;
    }

    void on_report(std::uint32_t onu)
    {
        const Node& o = node(onu);
        const int k = o.co;
        auto& st = co_[static_cast<std::size_t>(k)];
        auto& os = onu_[onu];
        const Time rt = now_ - tau_;
        const std::size_t n_up = reported(os.up, pk_, rt);
        const std::size_t n_awg = reported(os.awg, pk_, rt);
        if (mode_ == CarrierMode::EmptyCarrier && uses_wdm(o.kind)) {
            st.reports.push_back({onu, n_up, n_awg});
            if (static_cast<int>(st.reports.size()) == st.wdm_onus) run_cycle(k);
            return;
        }
        const Time ga = grant_leave(k, now_) + tau_;
        Time next = ga;
        if (n_up > 0) {
            std::uint32_t bits = 0;
            for (std::size_t i = 0; i < n_up; ++i) bits += pk_[os.up[i]].bits;
            auto [ch, name] = pick_up(o, ga);
            const Time dur = ch->tx(bits);
            Time cur = ch->book(ga, dur, res_.audit);
            busy(name, cur, cur + dur, share_up(o));
            for (std::size_t i = 0; i < n_up; ++i) {
                const std::uint32_t id = os.up.front();
                os.up.pop_front();
                cur += ch->tx(pk_[id].bits);
                push(cur + tau_, Ev::UpDone, id);
            }
            next = cur;
        }
        for (std::size_t i = 0; i < n_awg; ++i) {
            push(ga, Ev::AwgEnqueue, os.awg.front());
            os.awg.pop_front();
        }
        if (now_ < hard_end_) push(next + tau_, Ev::Report, onu);
    }

    double share_up(const Node& o) const
    {
        const auto& co = t_.cos[static_cast<std::size_t>(o.co)];
        return uses_wdm(o.kind) && co.wdm_channels > 0 ? 1.0 / co.wdm_channels : 1.0;
    }

    // Earliest available upstream channel; WDM and LR ONUs may also use the TDM channel
    // (ties go to the WDM channels).
    std::pair<Channel*, std::string> pick_up(const Node& o, Time ready)
    {
        auto& st = co_[static_cast<std::size_t>(o.co)];
        const std::string k = std::to_string(o.co);
        if (!uses_wdm(o.kind) || st.wdm_up.empty()) return {&st.tdm_up, "up:" + k + ":tdm"};
        Channel* best = nullptr;
        Time bt = 0;
        for (auto& c : st.wdm_up) {
            const Time s = std::max(ready, c.free);
            if (!best || s < bt) {
                best = &c;
                bt = s;
            }
        }
        if (std::max(ready, st.tdm_up.free) < bt) return {&st.tdm_up, "up:" + k + ":tdm"};
        return {best, "up:" + k + ":wdm"};
    }

    std::pair<Channel*, std::string> pick_down(const Node& d, Time ready)
    {
        auto& st = co_[static_cast<std::size_t>(d.co)];
        const std::string k = std::to_string(d.co);
        if (!uses_wdm(d.kind) || st.wdm_down.empty()) return {&st.tdm_down, "down:" + k + ":tdm"};
        Channel* best = nullptr;
        Time bt = 0;
        for (auto& c : st.wdm_down) {
            const Time s = std::max(ready, c.free);
            if (!best || s < bt) {
                best = &c;
                bt = s;
            }
        }
        if (mode_ == CarrierMode::Reflection && std::max(ready, st.tdm_down.free) < bt)
            return {&st.tdm_down, "down:" + k + ":tdm"};
        return {best, "down:" + k + ":wdm"};
    }

    // Per-TDM-cycle switching: once every WDM/LR ONU has reported, grant all upstream
    // windows back to back on one WDM channel, then send the collected downstream packets.
    // Channels take turns cycle by cycle. Times on the channel are OLT-side.
    void run_cycle(int k)
    {
        auto& st = co_[static_cast<std::size_t>(k)];
        auto& ch = st.wdm_up[static_cast<std::size_t>(st.rr)];
        const std::string name = "wdm:" + std::to_string(k);
        const double share = 1.0 / static_cast<double>(st.wdm_up.size());
        Time cursor = ch.free + (ch.last_down ? 2 * tau_ : 0);
        bool any_up = false;
        for (const auto& r : st.reports) {
            auto& os = onu_[r.onu];
            const Time ga = grant_leave(k, now_) + tau_;
            Time next_report = ga + tau_;
            if (r.n_up > 0) {
                Time rx = std::max(cursor, ga + tau_);
                const Time start = rx;
                for (std::size_t i = 0; i < r.n_up; ++i) {
                    const std::uint32_t id = os.up.front();
                    os.up.pop_front();
                    rx += ch.tx(pk_[id].bits);
                    push(rx, Ev::UpDone, id);
                }
                busy(name, start, rx, share);
                cursor = rx;
                next_report = rx;
                any_up = true;
            }
            for (std::size_t i = 0; i < r.n_awg; ++i) {
                push(ga, Ev::AwgEnqueue, os.awg.front());
                os.awg.pop_front();
            }
            if (now_ < hard_end_) push(next_report, Ev::Report, r.onu);
        }
        if (any_up) {
            ch.free = cursor;
            ch.last_down = false;
        }
        if (!st.down_buf.empty()) {
            Time tx = std::max(now_, ch.free);
            const Time start = tx;
            for (std::uint32_t id : st.down_buf) {
                tx += ch.tx(pk_[id].bits);
                push(tx + tau_, Ev::DownDone, id);
            }
            busy(name, start, tx, share);
            st.down_buf.clear();
            ch.free = tx;
            ch.last_down = true;
        }
        st.reports.clear();
        st.rr = (st.rr + 1) % static_cast<int>(st.wdm_up.size());
    }

    // ---- GPON frames ----

    Time next_up_frame(Time t) const { return (floor_div(t, delta_) + 1) * delta_; }
    Time next_down_frame(Time t) const { return omega_ + (floor_div(t - omega_, delta_) + 1) * delta_; }

    // Report in the next upstream frame, grant in the first downstream frame after the
    // report is in, transmission from the first upstream frame after the grant is in.
    Time gpon_eligible(Time gen) const
    {
        const Time report_in = next_up_frame(gen) + delta_ + tau_;
        const Time grant_in = next_down_frame(report_in) + delta_ + tau_;
        return next_up_frame(grant_in);
    }

    void on_up_eligible(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const Node& o = node(p.src);
        auto [ch, name] = pick_up(o, now_);
        const Time dur = ch->tx(p.bits);
        const Time s = ch->book(now_, dur, res_.audit);
        busy(name, s, s + dur, share_up(o));
        push(s + dur + tau_, Ev::UpDone, id);
    }

    // ---- trees ----

    void on_up_done(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const Node& a = node(p.src);
        record(uses_wdm(a.kind) ? "wdm_up" : "tdm_up", p, p.gen);
        const Node& b = node(p.dst);
        if (is_onu(b.kind) && b.co == a.co) {
            down_tree(id);
            return;
        }
        p.metro_start = now_;
        enter_metro(id);
    }

    void down_tree(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        p.stage = now_;
        const Node& b = node(p.dst);
        if (gpon_) {
            push(next_down_frame(now_), Ev::DownEligible, id);
        } else if (mode_ == CarrierMode::EmptyCarrier && uses_wdm(b.kind) && !co_[static_cast<std::size_t>(b.co)].wdm_up.empty()) {
            co_[static_cast<std::size_t>(b.co)].down_buf.push_back(id);
        } else {
            book_down(id);
        }
    }

    void book_down(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const Node& b = node(p.dst);
        auto [ch, name] = pick_down(b, now_);
        const Time dur = ch->tx(p.bits);
        const Time s = ch->book(now_, dur, res_.audit);
        const auto& co = t_.cos[static_cast<std::size_t>(b.co)];
        busy(name, s, s + dur, name.ends_with("wdm") && co.wdm_channels > 0 ? 1.0 / co.wdm_channels : 1.0);
        push(s + dur + tau_, Ev::DownDone, id);
    }

    void on_down_done(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        record(uses_wdm(node(p.dst).kind) ? "wdm_down" : "tdm_down", p, p.stage);
        deliver(id);
    }

    // ---- metro ----

    void enter_metro(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const int b = node(p.dst).ring_pos;
        if (p.pos == b) {
            at_final(id);
            return;
        }
        const auto& paths = routes_.between(p.pos, b);
        std::size_t pick = 0;
        if (paths.size() > 1) {
            double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
            while (pick + 1 < paths.size() && u >= paths[pick].probability) u -= paths[pick++].probability;
        }
        p.entry = p.pos;
        p.path = static_cast<std::uint16_t>(pick);
        p.hop = 0;
        p.prev_ring = false;
        forward(id);
    }

    const Path& path_of(const Pkt& p) const { return routes_.between(p.entry, node(p.dst).ring_pos)[p.path]; }

    void forward(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const LinkId e = path_of(p).links[p.hop];
        if (s_.is_psc(e)) {
            // Wait for this CO's control slot in the PSC frame.
            const int k = s_.describe(e).from;
            const Time off = frame_p_ * k / P_;
            const Time slot = off + std::max<Time>(0, (floor_div(now_ - off - 1, frame_p_) + 1)) * frame_p_;
            push(std::max(slot, now_) + tau_p_, Ev::PscEnqueue, id);
            return;
        }
        auto& rs = ring_[e];
        rs.q[p.prev_ring ? 0 : 1].push_back(id);
        if (!rs.busy) start_ring(e);
    }

    // Transit traffic goes before locally added traffic.
    void start_ring(LinkId e)
    {
        auto& rs = ring_[e];
        auto& q = rs.q[0].empty() ? rs.q[1] : rs.q[0];
        const std::uint32_t id = q.front();
        q.pop_front();
        rs.busy = true;
        Pkt& p = pk_[id];
        const Time dur = static_cast<Time>(std::llround(p.bits * 1e12 / t_.params.ring_bps));
        busy("ring:" + s_.name(e), now_, now_ + dur);
        push(now_ + dur, Ev::TxEnd, e);
        const int np = s_.ring_head(e);
        p.pos = np;
        ++p.hop;
        p.prev_ring = true;
        // Cut-through at ring nodes, store-and-forward at COs and at the destination.
        const bool stop = np == node(p.dst).ring_pos || t_.co_at_pos[static_cast<std::size_t>(np)] >= 0;
        if (stop)
            push(now_ + dur + hop_, Ev::AtPos, id);
        else
            push(now_ + hop_, Ev::RingHead, id);
    }

    void on_ring_tx_end(LinkId e)
    {
        auto& rs = ring_[e];
        rs.busy = false;
        if (!rs.q[0].empty() || !rs.q[1].empty()) start_ring(e);
    }

    void on_at_pos(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        if (p.pos == node(p.dst).ring_pos)
            at_final(id);
        else
            forward(id);
    }

    void on_psc_enqueue(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const int l = s_.describe(path_of(p).links[p.hop]).to;
        auto& g = psc_[static_cast<std::size_t>(l)];
        Channel* ch = earliest(g, now_);
        const Time dur = ch->tx(p.bits);
        const Time s = ch->book(now_, dur, res_.audit);
        busy("psc:" + std::to_string(l), s, s + dur, 1.0 / static_cast<double>(g.size()));
        p.pos = t_.cos[static_cast<std::size_t>(l)].ring_pos;
        ++p.hop;
        p.prev_ring = false;
        push(s + dur + tau_p_, Ev::AtPos, id);
    }

    static Channel* earliest(std::vector<Channel>& g, Time ready)
    {
        Channel* best = &g.front();
        for (auto& c : g)
            if (std::max(ready, c.free) < std::max(ready, best->free)) best = &c;
        return best;
    }

    void at_final(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        if (p.entry != p.pos) record("metro", p, p.metro_start);
        const Node& b = node(p.dst);
        if (is_onu(b.kind))
            down_tree(id);
        else
            deliver(id);
    }

    // ---- AWG ----

    void on_awg_enqueue(std::uint32_t id)
    {
        Pkt& p = pk_[id];
        const int k = node(p.src).co, l = node(p.dst).co;
        auto& g = awg_[static_cast<std::size_t>(k * P_ + l)];
        if (g.empty()) {
            // No channel between the two COs; the traffic generator never produces this.
            ++res_.audit.drops;
            drop(id);
            return;
        }
        Channel* ch = earliest(g, now_);
        const Time dur = ch->tx(p.bits);
        const Time s = ch->book(now_, dur, res_.audit);
        busy("awg:" + std::to_string(k) + ">" + std::to_string(l), s, s + dur, 1.0 / static_cast<double>(g.size()));
        push(s + dur + tau_a_, Ev::Deliver, id);
    }

    void on_awg_deliver(std::uint32_t id)
    {
        record("awg", pk_[id], pk_[id].gen);
        deliver(id);
    }

    // ---- sinks ----

    bool fifo_eligible(const Pkt& p) const
    {
        const Node& a = node(p.src);
        const Node& b = node(p.dst);
        if (uses_wdm(a.kind) || uses_wdm(b.kind)) return false;
        if (p.awg) return t_.awg_channels(a.co, b.co) == 1;
        if (a.ring_pos == b.ring_pos) return true;
        const auto& paths = routes_.between(a.ring_pos, b.ring_pos);
        if (paths.size() != 1) return false;
        for (LinkId e : paths[0].links)
            if (s_.is_psc(e) && psc_[static_cast<std::size_t>(s_.describe(e).to)].size() != 1) return false;
        return true;
    }

    void deliver(std::uint32_t id)
    {
        const Pkt& p = pk_[id];
        record("overall", p, p.gen);
        ++res_.audit.delivered;
        if (fifo_eligible(p)) {
            ++res_.audit.fifo_checked;
            const std::uint64_t key = static_cast<std::uint64_t>(p.src) << 32 | p.dst;
            auto [it, fresh] = fifo_last_.try_emplace(key, p.gen);
            if (!fresh) {
                if (p.gen < it->second) ++res_.audit.fifo_violations;
                it->second = std::max(it->second, p.gen);
            }
        }
        release(id);
    }

    void drop(std::uint32_t id) { release(id); }

    void release(std::uint32_t id)
    {
        if (pk_[id].measured) --measured_in_flight_;
        free_.push_back(id);
    }
};

} // namespace

ReplicationResult simulate_network_once(const Topology& topo, const RouteTable& routes, const TrafficMatrices& m,
                                        CarrierMode mode, const SimConfig& cfg, const PacketLengthDist& len,
                                        std::uint64_t seed)
{
    if (m.T.size() != topo.size() || m.TA.size() != topo.size())
        throw ScenarioError("simulate: traffic matrix does not match the topology");
    Engine e(topo, routes, m, mode, cfg, len, seed);
    return e.run();
}

SimStats run_full_network(const Topology& topo, const RouteTable& routes, const TrafficMatrices& m, CarrierMode mode,
                          const SimConfig& cfg, const PacketLengthDist& len)
{
    auto one = [&](std::uint64_t seed) { return simulate_network_once(topo, routes, m, mode, cfg, len, seed); };
    return combine_replications(run_replications(one, cfg), delay_class_names());
}

SimStats run_epon_tree(const Topology& topo, const TrafficMatrices& m, CarrierMode mode, const SimConfig& cfg,
                       const PacketLengthDist& len)
{
    if (topo.cos.size() != 1 || topo.has_ring() || topo.params.pon != PonType::Epon)
        throw ScenarioError("epon tree: expected a single EPON CO without a ring");
    RouteTable routes(topo);
    return run_full_network(topo, routes, m, mode, cfg, len);
}

SimStats run_gpon_tree(const Topology& topo, const TrafficMatrices& m, const SimConfig& cfg, const PacketLengthDist& len)
{
    if (topo.params.pon != PonType::Gpon) throw ScenarioError("gpon tree: topology is not GPON");
    RouteTable routes(topo);
    return run_full_network(topo, routes, m, CarrierMode::Reflection, cfg, len);
}

} // namespace ngpon
