// Published limits and frozen hand-derived values. Changing one of these is a behaviour change.
#include "doctest.h"

#include "ngpon/catalog.hpp"
#include "ngpon/closed_form.hpp"
#include "ngpon/delay.hpp"

#include <cmath>

using namespace ngpon;

namespace {

double gbps(double bps) { return bps / 1e9; }

double bound_of(const Scenario& s, ConstraintFamily f)
{
    const Instance inst(s);
    return inst.capacity().family_min(f);
}

} // namespace

TEST_CASE("published appendix limits via closed forms")
{
    int checked = 0;
    for (const auto& c : reproduce_tables()) {
        CAPTURE(c.table);
        CAPTURE(c.column);
        CAPTURE(c.row);
        CHECK(c.closed_form_ok);
        ++checked;
    }
    CHECK(checked == 45);
}

TEST_CASE("published appendix limits reproduced by the constraint engine")
{
    // Cells where the printed closed forms disagree with shortest-path routing are listed in
    // the engine-divergence test below; every other cell must match.
    for (const auto& c : reproduce_tables()) {
        if (c.family == "psc") continue;
        if (c.table == "B" && c.row == "W_d_empty") continue;
        if (c.table == "C" && (c.row == "W_d_refl" || c.row == "awg")) continue;
        CAPTURE(c.table);
        CAPTURE(c.column);
        CAPTURE(c.row);
        CHECK(c.engine_ok);
    }
}

TEST_CASE("engine values where the printed closed forms diverge (frozen)")
{
    const auto cells = reproduce_tables();
    auto engine = [&](const std::string& t, const std::string& col, const std::string& row) {
        for (const auto& c : cells)
            if (c.table == t && c.column == col && c.row == row) return c.engine;
        FAIL("missing cell");
        return 0.0;
    };
    CHECK(engine("A", "N_T=32,N_W=0,N_L=0", "ring_psc") == doctest::Approx(4.64653641).epsilon(1e-8));
    CHECK(engine("A", "N_T=4,N_W=14,N_L=14", "ring_psc") == doctest::Approx(5.53325499).epsilon(1e-8));
    CHECK(engine("B", "TDM only", "ring_psc") == doctest::Approx(4.62616822).epsilon(1e-8));
    CHECK(engine("B", "upgraded", "W_d_empty") == doctest::Approx(3.84715026).epsilon(1e-8));
    CHECK(engine("C", "beta=0.75", "W_d_refl") == doctest::Approx(10.3768405).epsilon(1e-8));
    CHECK(engine("C", "beta=0.75", "awg") == doctest::Approx(27.5).epsilon(1e-12));
}

TEST_CASE("metro uniform scenario: WDM bound and bottleneck")
{
    const Instance inst(metro_uniform());
    const auto& cap = inst.capacity();
    CHECK(std::fabs(cap.max_rt_bps / 28.40625e9 - 1) < 1e-9);
    CHECK(std::fabs(cap.family_min(ConstraintFamily::WdmDown) / 28.40625e9 - 1) < 1e-9);
    CHECK(cap.bottleneck_constraint().family == ConstraintFamily::WdmUp);
    // PSC closed form as printed; the engine's hop-count routing gives a larger bound.
    ClosedFormParams p = closed_form_params(metro_uniform());
    CHECK(closed_form_bound(ClosedFormScenario::MetroUniform, p, "rt_PSC") == doctest::Approx(31.5625e9).epsilon(1e-12));
    CHECK(gbps(cap.family_min(ConstraintFamily::Psc)) == doctest::Approx(46.0451333485).epsilon(1e-9));
}

TEST_CASE("metro alpha sweep")
{
    const double wdm[] = {28.40625, 28.6875, 28.636363636};
    const double awg_up[] = {30.2194149, 32.5994318, 34.6916300};
    const double awg[] = {1578.125, 796.875, 546.875}; // published figure for alpha = 4 is 453.125; the formula itself gives 546.875
    const double alphas[] = {1, 2, 4};
    for (int i = 0; i < 3; ++i) {
        CAPTURE(alphas[i]);
        CHECK(gbps(bound_of(metro_alpha(alphas[i], false), ConstraintFamily::WdmUp)) == doctest::Approx(wdm[i]).epsilon(1e-8));
        CHECK(gbps(bound_of(metro_alpha(alphas[i], true), ConstraintFamily::WdmUp)) == doctest::Approx(awg_up[i]).epsilon(1e-7));
        CHECK(gbps(bound_of(metro_alpha(alphas[i], true), ConstraintFamily::Awg)) == doctest::Approx(awg[i]).epsilon(1e-12));
        ClosedFormParams p = closed_form_params(metro_alpha(alphas[i], true));
        CHECK(gbps(closed_form_bound(ClosedFormScenario::MetroAlpha, p, "rt_WDMupaup")) == doctest::Approx(wdm[i]).epsilon(1e-8));
        CHECK(gbps(closed_form_bound(ClosedFormScenario::MetroAlpha, p, "rt_WDMupaup_awg")) ==
              doctest::Approx(awg_up[i]).epsilon(1e-7));
        CHECK(gbps(closed_form_bound(ClosedFormScenario::MetroAlpha, p, "rt_AWGaup")) == doctest::Approx(awg[i]).epsilon(1e-12));
    }
}

TEST_CASE("metro beta sweep")
{
    const double betas[] = {0.24, 0.5, 1.0};
    const double printed[] = {28.4, 32.5, 45.2};
    const double engine_wd[] = {32.2331461, 37.6619451, 55.7038835};
    for (int i = 0; i < 3; ++i) {
        CAPTURE(betas[i]);
        ClosedFormParams p = closed_form_params(metro_beta(betas[i]));
        CHECK(std::fabs(gbps(closed_form_bound(ClosedFormScenario::MetroBeta, p, "rt_WDMdownupnunu")) - printed[i]) <= 0.05);
        CHECK(gbps(bound_of(metro_beta(betas[i]), ConstraintFamily::WdmDown)) == doctest::Approx(engine_wd[i]).epsilon(1e-8));
    }
    ClosedFormParams p = closed_form_params(metro_beta(1.0));
    CHECK(std::fabs(gbps(closed_form_bound(ClosedFormScenario::MetroBeta, p, "rt_AWGupnunu")) - 199.2) <= 0.05);
    CHECK(gbps(bound_of(metro_beta(1.0), ConstraintFamily::Awg)) == doctest::Approx(191.25).epsilon(1e-12));
}

TEST_CASE("packet length moments")
{
    const auto len = PacketLengthDist::ethernet();
    CHECK(len.mean_bits() == 6328.0);
    CHECK(len.variance_bits2() == doctest::Approx((1455.0 * 1455.0 - 1) / 12 * 64).epsilon(1e-15));
}

TEST_CASE("queueing oracles")
{
    const auto len = PacketLengthDist::ethernet();
    CHECK(pk_wait(queue_params(0.5, 1e9, len)) == doctest::Approx(4.05612979351e-6).epsilon(1e-10));
    CHECK(pk_wait(queue_params(0.8, 1e9, len)) == doctest::Approx(1.62245191740e-5).epsilon(1e-10));
    CHECK(std::isinf(pk_wait(queue_params(1.0, 1e9, len))));
    CHECK(pk_wait(queue_params(0.0, 1e9, len)) == 0.0);
    CHECK(switchover_prob(1, 1) == doctest::Approx(0.5));
    CHECK(switchover_prob(1, 0) == 0.0);
}

TEST_CASE("GPON frame gaps at the default geometry")
{
    const Gammas g = gpon_gammas(100e-6, 0, 125e-6);
    CHECK(g.g1 + g.g2 == doctest::Approx(50e-6).epsilon(1e-12));
    const double w = gpon_optimal_offset(100e-6, 125e-6);
    CHECK(w == doctest::Approx(12.5e-6).epsilon(1e-12));
    const Gammas o = gpon_gammas(100e-6, w, 125e-6);
    CHECK(o.g1 + o.g2 == doctest::Approx(50e-6).epsilon(1e-12));
}

TEST_CASE("zero-load tree delays")
{
    const double tx = 6328 / 1e9;
    SUBCASE("EPON")
    {
        const Instance inst(single_tree(OnuMix{32, 0, 0}, PonType::Epon));
        const auto r = compute_delays(inst.flow_model(), 0, {});
        CHECK(r.class_delay("tdm_up") == doctest::Approx(400e-6 + tx).epsilon(1e-12));
        CHECK(r.class_delay("tdm_down") == doctest::Approx(100e-6 + tx).epsilon(1e-12));
        CHECK(r.D == doctest::Approx(500e-6 + 2 * tx).epsilon(1e-12));
    }
    SUBCASE("GPON, offset 0")
    {
        Scenario s = single_tree(OnuMix{32, 0, 0}, PonType::Gpon);
        s.topology.gpon_offset_s = 0;
        const Instance inst(s);
        const auto r = compute_delays(inst.flow_model(), 0, {});
        CHECK(r.class_delay("tdm_up") == doctest::Approx(312.5e-6 + 50e-6 + 300e-6 + tx).epsilon(1e-12));
        CHECK(r.class_delay("tdm_down") == doctest::Approx(62.5e-6 + 100e-6 + tx).epsilon(1e-12));
    }
}

TEST_CASE("delays at half load (frozen)")
{
    const Instance e(single_tree(OnuMix{32, 0, 0}, PonType::Epon));
    const auto r = compute_delays(e.flow_model(), 0.5e9, {});
    CHECK(r.class_delay("tdm_up") == doctest::Approx(4.11966129794e-4).epsilon(1e-10));
    CHECK(r.class_delay("tdm_down") == doctest::Approx(1.10384129794e-4).epsilon(1e-10));

    const Instance m(metro_uniform());
    const auto rm = compute_delays(m.flow_model(), 0.5 * 28.40625e9, {});
    CHECK(rm.D == doctest::Approx(5.67074440516e-4).epsilon(1e-10));
    CHECK(rm.class_delay("metro") == doctest::Approx(1.11572842161e-4).epsilon(1e-10));
    // Single feeder per PSC queue: the correction cancels the wait exactly.
    CHECK(rm.psc[0] == doctest::Approx(10e-6 + 100e-6 + 6328 / 1e10).epsilon(1e-12));

    const Instance b(metro_beta(0.5));
    const auto rb = compute_delays(b.flow_model(), 0.5 * b.capacity().max_rt_bps, {});
    CHECK(rb.D == doctest::Approx(5.33527154776e-4).epsilon(1e-10));
    CHECK(rb.class_delay("awg") == doctest::Approx(3.38651555358e-4).epsilon(1e-10));
}
