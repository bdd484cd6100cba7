#pragma once

// Hand-rolled generators for property tests. Each case draws from one seeded engine so
// a failing case can be replayed from its index.
#include "ngpon/scenario.hpp"

#include <random>

namespace gen {

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return real(0, 1) < p; }

    ngpon::OnuMix mix(int max_each)
    {
        ngpon::OnuMix m{integer(0, max_each), integer(0, max_each), integer(0, max_each)};
        if (m.total() < 2) m.tdm += 2;
        return m;
    }

    // Small random network; with_awg adds AWG channels between every CO pair.
    ngpon::Scenario scenario(bool allow_awg = true)
    {
        ngpon::Scenario s;
        auto& p = s.topology;
        p.cos = integer(1, 5);
        p.hotspots = p.cos > 1 ? integer(0, 1) : 0;
        p.ring_nodes = p.cos > 1 ? integer(0, 6) : 0;
        p.onus = {mix(4)};
        p.psc = p.cos > 1 && coin();
        p.pon = coin(0.3) ? ngpon::PonType::Gpon : ngpon::PonType::Epon;
        p.tdm_bps = {real(0.5e9, 2e9)};
        p.wdm_bps = {real(0.5e9, 2e9)};
        p.wdm_channels = {integer(1, 4)};
        p.home_channels = {integer(1, 2)};
        if (allow_awg && coin()) p.awg_channels = {integer(1, 2)};
        p.ring_bps = real(2e9, 1e10);
        p.psc_bps = real(1e9, 1e10);
        p.awg_bps = real(1e9, 1e10);
        if (coin()) {
            s.traffic.kind = ngpon::TrafficKind::NonuniformSrc;
            s.traffic.alpha = real(1.0, 4.0);
            const int n = p.onus[0].total();
            s.traffic.n_low = integer(0, n);
            s.traffic.n_med = integer(0, n - s.traffic.n_low);
            s.traffic.n_high = n - s.traffic.n_low - s.traffic.n_med;
        }
        return s;
    }
};

} // namespace gen
