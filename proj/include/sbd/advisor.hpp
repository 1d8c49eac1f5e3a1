#pragma once

#include "sbd/noise.hpp"
#include "sbd/norms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sbd {

struct SettingInputs {
    int d = 2;
    double p = 2.0;
    double q = 2.0;
    double s = 2.0;
    double r = 2.0;
    NoiseClass regularity = NoiseClass::half_power;  // plain: h in L^q only; half_power: A^{1/2} h bounded too
    std::optional<double> mu;                        // requested weight

    /// Throws std::invalid_argument unless d in {2,3}, p,q in (1,inf), s,r >= 2.
    void validate() const;
};

struct Inequality {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct SettingVerdict {
    Setting setting = Setting::strong;
    std::vector<Inequality> checks;
    double mu_c = 0.0;
    double mu_lower = 0.0;
    double mu_upper = 0.0;
    bool lower_open = true;
    bool interval_nonempty = false;
    bool passes = false;                      // every check holds and the interval is nonempty
    std::optional<bool> requested_mu_admissible;

    /// Names of the checks that fail (plus "mu-interval empty" if so).
    std::vector<std::string> violations() const;
};

struct GlobalEligibility {
    bool applicable = false;  // a global criterion exists for this d
    bool eligible = false;
    std::vector<Inequality> checks;
    std::string note;
};

struct SettingReport {
    SettingInputs inputs;
    std::vector<Inequality> stoch;
    bool stoch_holds = false;
    SettingVerdict strong;
    SettingVerdict weak_I;
    SettingVerdict weak_II;
    std::string critical_space;
    GlobalEligibility global;
    int a3_m = 1;          // FitzHugh-Nagumo instance of the polynomial growth data
    double a3_rho1 = 2.0;

    const SettingVerdict& verdict(Setting s) const;
};

/// Absolute slack used for every comparison of rationals in double precision.
inline constexpr double kAdvisorEps = 1e-12;

SettingReport setting_advisor(const SettingInputs& inputs);

struct PromotionResult {
    bool accepted = false;
    std::vector<std::string> violated;
    NormLabel label;
};

/// Setting promotion after parabolic smoothing on [0, delta]. Only the
/// norm scale changes; state values are untouched.
/// Throws std::invalid_argument if delta <= 0 or the target is not stronger.
PromotionResult promote_setting(const SettingInputs& inputs, Setting from, Setting to, double delta);

}  // namespace sbd
