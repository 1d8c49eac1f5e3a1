#include "sbd/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbd {

namespace {

Inequality le(std::string name, double lhs, double rhs) { return {std::move(name), lhs, rhs, lhs <= rhs + kAdvisorEps}; }
Inequality lt(std::string name, double lhs, double rhs) { return {std::move(name), lhs, rhs, lhs < rhs - kAdvisorEps}; }

bool all_hold(const std::vector<Inequality>& v) {
    return std::all_of(v.begin(), v.end(), [](const Inequality& i) { return i.holds; });
}

void finish_interval(SettingVerdict& v, double p, double cap, const std::optional<double>& mu) {
    const double inv_p = 1.0 / p;
    v.lower_open = v.mu_c <= inv_p + kAdvisorEps;
    v.mu_lower = v.lower_open ? inv_p : v.mu_c;
    v.mu_upper = std::min(1.0, cap);
    v.interval_nonempty =
        v.lower_open ? v.mu_lower < v.mu_upper - kAdvisorEps : v.mu_lower <= v.mu_upper + kAdvisorEps;
    v.passes = all_hold(v.checks) && v.interval_nonempty;
    if (mu) {
        const bool above = v.lower_open ? *mu > v.mu_lower + kAdvisorEps : *mu >= v.mu_lower - kAdvisorEps;
        v.requested_mu_admissible = above && *mu <= v.mu_upper + kAdvisorEps;
    }
}

}  // namespace

void SettingInputs::validate() const {
    if (d != 2 && d != 3) throw std::invalid_argument("setting advisor needs d in {2,3}");
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1, inf)");
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("q must lie in (1, inf)");
    if (!(s >= 2.0) || !(r >= 2.0)) throw std::invalid_argument("s and r must be >= 2");
}

std::vector<std::string> SettingVerdict::violations() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.holds) out.push_back(c.name);
    if (!interval_nonempty) out.push_back("mu-interval empty");
    return out;
}

const SettingVerdict& SettingReport::verdict(Setting s) const {
    switch (s) {
        case Setting::strong: return strong;
        case Setting::weak_I: return weak_I;
        case Setting::weak_II: return weak_II;
    }
    return strong;
}

SettingReport setting_advisor(const SettingInputs& in) {
    in.validate();
    const double d = in.d;
    const double p = in.p;
    const double q = in.q;
    const double s = in.s;
    const double r = in.r;
    const bool plain_noise = in.regularity == NoiseClass::plain;
    const double scaling = 1.0 / p + d / (2.0 * q);
    const double beta_s = d / (3.0 * q) + 1.0 / s;

    SettingReport rep;
    rep.inputs = in;

    rep.stoch.push_back(lt("1<p", 1.0, p));
    rep.stoch.push_back(lt("1<q", 1.0, q));
    rep.stoch.push_back(le("2<=s", 2.0, s));
    rep.stoch.push_back(le("2<=r", 2.0, r));
    if (s > 2.0 + kAdvisorEps) rep.stoch.push_back(lt("r>2 if s>2", 2.0, r));
    rep.stoch.push_back(le("s>=p", p, s));
    rep.stoch.push_back(le("r>=q", q, r));
    rep.stoch_holds = all_hold(rep.stoch);

    // Strong setting.
    {
        auto& v = rep.strong;
        v.setting = Setting::strong;
        v.checks.push_back(le("1/p+d/(2q)<=3/2", scaling, 1.5));
        double cap = 1.0;
        if (plain_noise) {
            v.checks.push_back(lt("q>2d/3", 2.0 * d / 3.0, q));
            v.checks.push_back(le("d/(3q)+1/s<=1/2", beta_s, 0.5));
            cap = 1.0 / p + 0.5 - 1.0 / s;
        } else {
            v.checks.push_back(le("d/(3q)+1/s<=1", beta_s, 1.0));
        }
        v.mu_c = scaling - 0.5;
        finish_interval(v, p, cap, in.mu);
    }
    // Weak-I setting.
    {
        auto& v = rep.weak_I;
        v.setting = Setting::weak_I;
        v.checks.push_back(lt("d/(d-1)<q", d / (d - 1.0), q));
        v.checks.push_back(le("q<=2d", q, 2.0 * d));
        v.checks.push_back(le("1/p+d/(2q)<=1", scaling, 1.0));
        if (plain_noise) v.checks.push_back(le("d/(3q)+1/s<=2/3", beta_s, 2.0 / 3.0));
        v.mu_c = scaling;
        finish_interval(v, p, 1.0, in.mu);
    }
    // Weak-II setting.
    {
        auto& v = rep.weak_II;
        v.setting = Setting::weak_II;
        v.checks.push_back(lt("2d/(2d-1)<q", 2.0 * d / (2.0 * d - 1.0), q));
        v.checks.push_back(le("q<=4d", q, 4.0 * d));
        v.checks.push_back(le("1/p+d/(2q)<=5/4", scaling, 1.25));
        double cap = 1.0;
        if (plain_noise) {
            v.checks.push_back(le("d/(3q)+1/s<=7/12", beta_s, 7.0 / 12.0));
            cap = 1.0 / p + 0.75 - 1.0 / s;
        } else {
            v.checks.push_back(le("d/(3q)+1/s<=13/12", beta_s, 13.0 / 12.0));
        }
        v.mu_c = scaling - 0.25;
        finish_interval(v, p, cap, in.mu);
    }

    rep.critical_space = "B^{" + std::to_string(d / q - 1.0) + "}_{" + std::to_string(q) + "," + std::to_string(p) +
                         ",N}(G) x L^" + std::to_string(q) + "(G)";

    auto& g = rep.global;
    g.applicable = true;
    const bool strong_ok = rep.stoch_holds && rep.strong.passes;
    if (in.d == 2) {
        g.checks.push_back(le("p>=2", 2.0, p));
        g.checks.push_back(le("q>=2", 2.0, q));
        g.checks.push_back(le("q<=4", q, 4.0));
        g.checks.push_back(le("1/p+1/q>=1/2", 0.5, 1.0 / p + 1.0 / q));
    } else {
        g.checks.push_back(le("p>=2", 2.0, p));
        g.checks.push_back(le("q>=2", 2.0, q));
        g.checks.push_back(le("q<=6", q, 6.0));
        if (plain_noise) g.checks.push_back(le("r>=6 for plain noise", 6.0, r));
        g.note = "requires w0 in H^{1,2}(G)";
    }
    g.eligible = strong_ok && all_hold(g.checks);
    if (!strong_ok) g.note += g.note.empty() ? "(Stoch)+(S) not satisfied" : "; (Stoch)+(S) not satisfied";
    return rep;
}

PromotionResult promote_setting(const SettingInputs& inputs, Setting from, Setting to, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("promotion needs a smoothing time delta > 0");
    const auto rank = [](Setting s) { return s == Setting::weak_I ? 0 : s == Setting::weak_II ? 1 : 2; };
    if (rank(to) <= rank(from)) throw std::invalid_argument("promotion target must be stronger than the source");

    const SettingReport rep = setting_advisor(inputs);
    const double scaling = 1.0 / inputs.p + inputs.d / (2.0 * inputs.q);
    PromotionResult res;

    const SettingVerdict& base = to == Setting::weak_II ? rep.weak_II : rep.strong;
    const std::string base_name = to == Setting::weak_II ? "(W2)" : "(S)";
    if (!rep.stoch_holds) res.violated.push_back("(Stoch)");
    if (!base.passes) {
        for (const auto& v : base.violations()) res.violated.push_back(base_name + ": " + v);
    }
    if (!(inputs.p > 4.0 / 3.0 + kAdvisorEps)) res.violated.push_back("p>4/3");
    const bool weak_ii_to_strong = from == Setting::weak_II && to == Setting::strong;
    if (weak_ii_to_strong) {
        if (!(scaling <= 1.25 + kAdvisorEps)) res.violated.push_back("1/p+d/(2q)<=5/4");
    } else if (!(scaling <= 1.0 + kAdvisorEps)) {
        res.violated.push_back("1/p+d/(2q)<=1");
    }
    res.accepted = res.violated.empty();

    const Setting now = res.accepted ? to : from;
    res.label.scale = inputs.q == 2.0 ? NormScale::Hs2_spectral : NormScale::Besov_surrogate;
    res.label.q = inputs.q;
    res.label.p = inputs.p;
    res.label.setting = now;
    res.label.s = 2.0 - 2.0 / inputs.p;  // trace smoothness; the setting shift is applied on evaluation
    res.label.surrogate = inputs.q != 2.0;
    return res;
}

}  // namespace sbd
