#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "ngpon/format.hpp"
#include "ngpon/simulator.hpp"

namespace ngpon {

const ClassStats* SimStats::find(const std::string& name) const
{
    for (const auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

std::uint64_t replication_seed(std::uint64_t seed, int r)
{
    // splitmix64 finalizer over (seed, r)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SimStats combine_replications(const std::vector<ReplicationResult>& reps, const std::vector<std::string>& order)
{
    SimStats s;
    s.replications = static_cast<int>(reps.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& name : order) {
        ClassStats c;
        c.name = name;
        std::vector<double> means;
        double bits = 0, window = 0;
        for (const auto& r : reps) {
            window += r.window_s;
            if (auto b = r.bits.find(name); b != r.bits.end()) bits += b->second;
            auto n = r.count.find(name);
            if (n == r.count.end() || n->second == 0) continue;
            c.samples += n->second;
            means.push_back(r.sum_s.at(name) / static_cast<double>(n->second));
        }
        if (means.empty()) continue;
        const double R = static_cast<double>(means.size());
        double mean = 0;
        for (double x : means) mean += x;
        mean /= R;
        c.mean_s = mean;
        if (means.size() >= 2) {
            double ss = 0;
            for (double x : means) ss += (x - mean) * (x - mean);
            const double sd = std::sqrt(ss / (R - 1));
            boost::math::students_t t(R - 1);
            c.ci_halfwidth_s = boost::math::quantile(boost::math::complement(t, 0.025)) * sd / std::sqrt(R);
        } else {
            c.ci_halfwidth_s = nan;
        }
        c.throughput_bps = window > 0 ? bits / window : 0;
        s.classes.push_back(c);
    }
    double bits = 0, window = 0, offered = 0;
    std::map<std::string, double> busy;
    for (const auto& r : reps) {
        if (auto b = r.bits.find("overall"); b != r.bits.end()) bits += b->second;
        window += r.window_s;
        offered += r.offered_bps;
        for (const auto& [k, v] : r.busy_s) busy[k] += v;
        s.audit.generated += r.audit.generated;
        s.audit.delivered += r.audit.delivered;
        s.audit.in_flight += r.audit.in_flight;
        s.audit.work_conservation_violations += r.audit.work_conservation_violations;
        s.audit.fifo_violations += r.audit.fifo_violations;
        s.audit.fifo_checked += r.audit.fifo_checked;
        s.audit.drops += r.audit.drops;
        s.audit.drained = s.audit.drained && r.audit.drained;
    }
    s.throughput_bps = window > 0 ? bits / window : 0;
    s.offered_bps = reps.empty() ? 0 : offered / static_cast<double>(reps.size());
    for (const auto& [k, v] : busy) s.utilization[k] = window > 0 ? v / window : 0;
    return s;
}

std::vector<ReplicationResult> run_replications_serial(const std::function<ReplicationResult(std::uint64_t)>& one,
                                                       const SimConfig& cfg)
{
    std::vector<ReplicationResult> out;
    for (int r = 0; r < cfg.replications; ++r) out.push_back(one(replication_seed(cfg.seed, r)));
    return out;
}

std::vector<ReplicationResult> run_replications(const std::function<ReplicationResult(std::uint64_t)>& one,
                                                const SimConfig& cfg)
{
    if (!cfg.parallel || cfg.trace) return run_replications_serial(one, cfg);
    std::vector<ReplicationResult> out(static_cast<std::size_t>(std::max(cfg.replications, 0)));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.replications; ++r) out[static_cast<std::size_t>(r)] = one(replication_seed(cfg.seed, r));
    return out;
}

SimStats run_mg1_reference(double lambda_pps, const PacketLengthDist& len, double C, const SimConfig& cfg)
{
    if (!(lambda_pps >= 0) || !(C > 0)) throw std::invalid_argument("mg1: bad rate");
    auto one = [&](std::uint64_t seed) {
        ReplicationResult r;
        r.window_s = cfg.duration_s;
        r.offered_bps = lambda_pps * len.mean_bits();
        std::mt19937_64 rng(seed);
        std::exponential_distribution<double> gap(lambda_pps > 0 ? lambda_pps : 1.0);
        const double end = cfg.warmup_s + cfg.duration_s;
        double t = 0, w = 0, prev_service = 0;
        bool first = true;
        if (lambda_pps <= 0) {
            // A lone packet never waits.
            r.sum_s["wait"] = 0;
            r.count["wait"] = 1;
            r.sum_s["sojourn"] = len.mean_bits() / C;
            r.count["sojourn"] = 1;
            r.audit.generated = r.audit.delivered = 1;
            return r;
        }
        while (true) {
            const double a = gap(rng);
            t += a;
            if (t >= end) break;
            // Lindley: W_n = max(0, W_{n-1} + S_{n-1} - A_n)
            w = first ? 0.0 : std::max(0.0, w + prev_service - a);
            first = false;
            const double s = len.sample_bits(rng) / C;
            prev_service = s;
            ++r.audit.generated;
            ++r.audit.delivered;
            if (t >= cfg.warmup_s) {
                r.sum_s["wait"] += w;
                r.count["wait"] += 1;
                r.sum_s["sojourn"] += w + s;
                r.count["sojourn"] += 1;
                r.bits["overall"] += s * C;
            }
        }
        return r;
    };
    return combine_replications(run_replications(one, cfg), {"wait", "sojourn"});
}

void write_sim_csv(std::ostream& os, const SimStats& s)
{
    os << "class,mean_delay_s,ci_halfwidth_s,throughput_bps\n";
    for (const auto& c : s.classes)
        os << c.name << ',' << fmt_sig(c.mean_s) << ',' << fmt_sig(c.ci_halfwidth_s) << ',' << fmt_sig(c.throughput_bps)
           << '\n';
}

} // namespace ngpon
