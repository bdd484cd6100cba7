#include "ngpon/closed_form.hpp"

#include "ngpon/model.hpp"

namespace ngpon {

namespace {

void check_mix(const ClosedFormParams& p, bool by_kind)
{
    if (p.P < 2 || p.H < 0 || p.H >= p.P || p.N_r < 0 || p.N < 1)
        throw ScenarioError("closed form: invalid P/H/N_r/N");
    if (by_kind && p.N_T + p.N_W + p.N_L != p.N)
        throw ScenarioError("closed form: N_T + N_W + N_L must equal N");
    if (!by_kind && p.N_l + p.N_m + p.N_h != p.N)
        throw ScenarioError("closed form: N_l + N_m + N_h must equal N");
    if (!(p.alpha > 0)) throw ScenarioError("closed form: alpha must be positive");
    if (p.beta < 0 || p.beta > 1) throw ScenarioError("closed form: beta must lie in [0, 1]");
}

struct Shared {
    double eta, eta_a, X, Xp, eta_TWr, eta_TWra, eta_LH;
};

Shared shared(const ClosedFormParams& p, bool by_kind)
{
    Shared s{};
    const double PH = p.P - p.H;
    s.eta = PH * p.N + p.N_r + p.H;
    s.X = p.N_l / p.alpha + p.N_m + p.alpha * p.N_h;
    s.Xp = p.N_l / p.alpha + p.N_m;
    s.eta_a = PH * s.X + p.N_r + p.alpha * p.H;
    s.eta_TWr = by_kind ? PH * (p.N_T + p.N_W) + p.N_r : PH * (p.N_l + p.N_m) + p.N_r;
    s.eta_TWra = PH * s.Xp + p.N_r;
    s.eta_LH = PH * (by_kind ? p.N_L : p.N_h) + p.H;
    return s;
}

} // namespace

std::vector<NamedBound> closed_form_bounds(ClosedFormScenario sc, const ClosedFormParams& p)
{
    std::vector<NamedBound> out;
    const double C = p.C, W1 = p.W + 1.0, N = p.N, a = p.alpha, b = p.beta;
    const double Nl = p.N_l, Nm = p.N_m, Nh = p.N_h;
    switch (sc) {
    case ClosedFormScenario::UniformA: {
        check_mix(p, true);
        const Shared s = shared(p, true);
        const double e = s.eta, NT = p.N_T, NW = p.N_W, NL = p.N_L;
        if (NT > 0) out.push_back({"rt_TDMup", e * C / NT});
        if (NW + NL > 0) {
            const double den = (e - 1) * (NT + NW) + s.eta_TWr * NL;
            out.push_back({"rt_WDMup", e * (e - 1) * W1 * C / den});
            out.push_back({"rt_WDMempty", e * (e - 1) * W1 * C / (2 * den)});
        }
        const double psc = (N + 3) * (NT + NW + 2) + (N + 2) * (NT + NW + 4) + NL * (2 * NT + 2 * NW + 5) + 2 * N + NT + NW + 2;
        out.push_back({"rt_PSC", e * (e - 1) * p.C_P / psc});
        if (NL > 0) out.push_back({"rt_AWG", e * (e - 1) * p.c * p.C_A / (NL * NL)});
        break;
    }
    case ClosedFormScenario::NonuniformB: {
        check_mix(p, false);
        const Shared s = shared(p, false);
        const double e = s.eta, ea = s.eta_a, X = s.X;
        out.push_back({"rt_TDMupa", ea * C / X});
        out.push_back({"rt_TDMdowna", ea * (e - 1) * C / (ea * N - X)});
        out.push_back({"rt_PSCa", ea * (e - 1) * p.C_P / (X * (2 * N + 5) + 8 * N + 14 + a * (N + 2))});
        out.push_back({"rt_TDMupaup", ea * C / (Nl / a)});
        out.push_back({"rt_WDMupaup", ea * (e - 1) * W1 * C / ((e - 1) * (Nl / a + Nm) + s.eta_TWr * a * Nh)});
        out.push_back({"rt_TDMdownaup", ea * (e - 1) * C / ((Nl / a) * (a * ea - 1))});
        out.push_back({"rt_WDMdownaup",
                       ea * (e - 1) * W1 * C / ((a * ea - 1) * Nl / a + (ea - 1) * Nm + s.eta_TWra * Nh)});
        out.push_back({"rt_WDMemptyaup", ea * (e - 1) * W1 * C /
                                             (ea * (e - 1) * Nl + (ea + e - 2) * Nm + (a * s.eta_TWr + s.eta_TWra) * Nh)});
        const double psc = (N + 3) * (Nl / a + Nm + 2) + (N + 2) * (Nl / a + Nm + 4) + a * Nh * (2 * Nl + 2 * Nm + 5) +
                           2 * N + Nl + Nm + 2;
        out.push_back({"rt_PSCaup", ea * (e - 1) * p.C_P / psc});
        out.push_back({"rt_AWGaup", ea * (e - 1) * p.c * p.C_A / (a * Nh * Nh)});
        break;
    }
    case ClosedFormScenario::NonuniformC: {
        check_mix(p, false);
        const Shared s = shared(p, false);
        const double e = s.eta, ea = s.eta_a, tw = s.eta_TWr, twa = s.eta_TWra, lh = s.eta_LH;
        out.push_back({"rt_TDMupaup", ea * C / (Nl / a)});
        out.push_back({"rt_WDMupnunu", ea * W1 * C / (Nl / a + Nm + a * Nh * (1 - b))});
        out.push_back({"rt_TDMdownupnunu", ea * C / (Nl * ((twa - 1 / a) / (e - 1) + a * (1 - b) * lh / tw))});
        out.push_back({"rt_WDMdownupnunu",
                       ea * W1 * C / ((twa - 1) * Nm / (e - 1) + a * (1 - b) * lh * Nm / tw + twa * Nh / (e - 1))});
        const double empty = Nl / a + Nm + a * (1 - b) * Nh + Nl / (e - 1) * (twa - 1 / a) + Nm / (e - 1) * (twa - 1) +
                             a * (1 - b) * lh / tw * (Nl + Nm) + twa * Nh / (e - 1);
        out.push_back({"rt_WDMemptyupnunu", ea * W1 * C / empty});
        const double psc = (s.Xp * (2 * N + 5) + (8 * N + 14)) / (e - 1) +
                           a * (1 - b) / tw * (Nh * (Nl + Nm + 3) + (Nh + 1) * (Nl + Nm + 2));
        out.push_back({"rt_PSCupnunu", ea * p.C_P / psc});
        if (b > 0) out.push_back({"rt_AWGupnunu", ea * lh * p.c * p.C_A / (a * b * Nh * Nh)});
        break;
    }
    case ClosedFormScenario::MetroUniform: {
        check_mix(p, true);
        const Shared s = shared(p, true);
        const double e = s.eta, NT = p.N_T, NW = p.N_W, NL = p.N_L;
        if (NW + NL > 0) out.push_back({"rt_WDMup", e * (e - 1) * W1 * C / ((e - 1) * (NT + NW) + s.eta_TWr * NL)});
        const double d1 = (NT + NW) * (3 * N + 1) + NL * (3 * NT + 3 * NW + 1) + 2 * N + NT + NW;
        out.push_back({"rt_PSC", e * (e - 1) * p.C_P / d1});
        break;
    }
    case ClosedFormScenario::MetroAlpha: {
        check_mix(p, false);
        const Shared s = shared(p, false);
        const double e = s.eta, ea = s.eta_a, X = s.X;
        out.push_back({"rt_WDMupaup", ea * W1 * C / X});
        const double d = (N - 1) * X + N * ((p.P - p.H - 1) * X + p.N_r + a * p.H);
        out.push_back({"rt_WDMdownaup", ea * (e - 1) * W1 * C / d});
        out.push_back({"rt_WDMupaup_awg", ea * W1 * C / (Nl / a + Nm + a * Nh * s.eta_TWr / (e - 1))});
        if (Nh > 0) out.push_back({"rt_AWGaup", ea * (e - 1) * p.c * p.C_A / (a * Nh * Nh)});
        break;
    }
    case ClosedFormScenario::MetroBeta: {
        check_mix(p, false);
        const Shared s = shared(p, false);
        const double e = s.eta, ea = s.eta_a;
        out.push_back({"rt_WDMupnunu", ea * W1 * C / (Nl / a + Nm + a * Nh * (1 - b))});
        const double den = s.Xp * (Nl + Nm - 1) / (e - 1) + s.eta_TWra * N / (e - 1) + a * (1 - b) * s.eta_LH * (Nl + Nm) / s.eta_TWr;
        out.push_back({"rt_WDMdownupnunu", ea * W1 * C / den});
        if (b > 0) out.push_back({"rt_AWGupnunu", ea * s.eta_LH * p.c * p.C_A / (a * b * Nh * Nh)});
        break;
    }
    }
    return out;
}

double closed_form_bound(ClosedFormScenario s, const ClosedFormParams& p, const std::string& id)
{
    for (const auto& b : closed_form_bounds(s, p))
        if (b.id == id) return b.bound_bps;
    throw ScenarioError("closed form: no bound " + id + " for this scenario");
}

} // namespace ngpon
