#include "support/fixtures.hpp"

#include "sbd/advisor.hpp"
#include "sbd/norms.hpp"

#include <doctest.h>

using namespace sbd;
using namespace sbd::testing;

TEST_CASE("advisor verdicts match the exact rational table") {
    for (const AdvisorRow& row : kAdvisorTable) {
        const SettingReport rep = setting_advisor(advisor_inputs_of(row));
        CAPTURE(row.d);
        CAPTURE(row.p);
        CAPTURE(row.q);
        CAPTURE(row.s);
        CAPTURE(row.r);
        CHECK(joined_failures(rep.stoch) == row.stoch_failures);
        CHECK(rep.strong.mu_c == doctest::Approx(row.strong.mu_c).epsilon(1e-14));
        CHECK(rep.weak_I.mu_c == doctest::Approx(row.weak_I.mu_c).epsilon(1e-14));
        CHECK(rep.weak_II.mu_c == doctest::Approx(row.weak_II.mu_c).epsilon(1e-14));
        CHECK(joined_failures(rep.strong) == row.strong.failures);
        CHECK(joined_failures(rep.weak_I) == row.weak_I.failures);
        CHECK(joined_failures(rep.weak_II) == row.weak_II.failures);
        CHECK(rep.strong.passes == std::string(row.strong.failures).empty());
    }
}

TEST_CASE("advisor input domain") {
    SettingInputs in;
    in.d = 1;
    CHECK_THROWS_AS(setting_advisor(in), std::invalid_argument);
    in.d = 2;
    in.p = 1.0;
    CHECK_THROWS_AS(setting_advisor(in), std::invalid_argument);
    in.p = 2.0;
    in.s = 1.5;
    CHECK_THROWS_AS(setting_advisor(in), std::invalid_argument);
}

TEST_CASE("admissible weight interval") {
    SettingInputs in;  // d = 2, p = q = s = r = 2
    const SettingReport rep = setting_advisor(in);
    CHECK(rep.strong.mu_lower == doctest::Approx(0.5));
    CHECK(rep.strong.mu_upper == doctest::Approx(1.0));
    CHECK(rep.strong.lower_open);
    CHECK_FALSE(rep.strong.requested_mu_admissible.has_value());

    in.mu = 0.5;
    CHECK(*setting_advisor(in).strong.requested_mu_admissible == false);
    in.mu = 0.75;
    CHECK(*setting_advisor(in).strong.requested_mu_admissible == true);
    in.mu = 1.0;
    CHECK(*setting_advisor(in).strong.requested_mu_admissible == true);
}

TEST_CASE("global eligibility") {
    SettingInputs in;
    in.p = 4.0;
    in.q = 4.0;
    in.s = 4.0;
    in.r = 4.0;
    const SettingReport ok = setting_advisor(in);
    CHECK(ok.global.applicable);
    CHECK(ok.global.eligible == (ok.stoch_holds && ok.strong.passes));

    in.q = 5.0;
    const SettingReport wide = setting_advisor(in);
    CHECK_FALSE(wide.global.eligible);
    CHECK(joined_failures(wide.global.checks).find("q<=4") != std::string::npos);

    in.d = 3;
    in.q = 4.0;
    const SettingReport three = setting_advisor(in);
    CHECK_FALSE(three.global.note.empty());
}

TEST_CASE("setting promotion") {
    SettingInputs in;
    in.p = 3.0;
    in.q = 3.0;
    in.s = 6.0;
    in.r = 6.0;
    CHECK_THROWS_AS(promote_setting(in, Setting::weak_I, Setting::strong, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(promote_setting(in, Setting::strong, Setting::weak_I, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(promote_setting(in, Setting::weak_II, Setting::weak_II, 0.1), std::invalid_argument);

    const PromotionResult up = promote_setting(in, Setting::weak_I, Setting::strong, 0.1);
    CHECK(up.accepted);
    CHECK(up.label.setting == Setting::strong);
    CHECK(up.label.surrogate);

    SettingInputs low = in;
    low.p = 4.0 / 3.0;
    const PromotionResult no = promote_setting(low, Setting::weak_I, Setting::strong, 0.1);
    CHECK_FALSE(no.accepted);
    CHECK(std::find(no.violated.begin(), no.violated.end(), "p>4/3") != no.violated.end());
    CHECK(no.label.setting == Setting::weak_I);
}

TEST_CASE("norm labels") {
    NormLabel l;
    CHECK_NOTHROW(l.validate());
    l.q = 1.0;
    CHECK_THROWS_AS(l.validate(), std::invalid_argument);
    l.q = 3.0;
    l.scale = NormScale::Hs2_spectral;
    CHECK_THROWS_AS(l.validate(), std::invalid_argument);
    CHECK(setting_shift(Setting::strong) == 0.0);
    CHECK(setting_shift(Setting::weak_I) == -1.0);
    CHECK(setting_shift(Setting::weak_II) == -0.5);
}

TEST_CASE("discrete norms") {
    const Grid g = build_grid(1, {4}, {2.0});
    GridFunction u(4);
    u << 1.0, -2.0, 0.0, 2.0;
    CHECK(lq_norm(g, u, 2.0) == doctest::Approx(std::sqrt(4.5)));
    CHECK(lq_norm(g, u, 1.0) == doctest::Approx(2.5));
    CHECK(lq_norm(g, u, std::numeric_limits<double>::infinity()) == 2.0);
    CHECK_THROWS_AS(lq_norm(g, u, 0.5), std::invalid_argument);

    const auto op = hetero_1d(6);
    const auto spec = std::make_shared<SpectralDecomposition>(spectral_decompose(*op));
    std::mt19937_64 rng(41);
    const GridFunction x = random_field(6, rng);
    CHECK(sobolev_norm_spectral(*spec, x, 0.0) == doctest::Approx(lq_norm(spec->grid, x, 2.0)).epsilon(1e-12));
    const GridFunction m = mean_zero_project(spec->grid, x);
    const double h1 = sobolev_norm_spectral(*spec, m, 1.0);
    CHECK(h1 * h1 == doctest::Approx(inner(spec->grid, m, m) + inner(spec->grid, m, op->apply(m))).epsilon(1e-10));

    NormLabel lab;
    lab.scale = NormScale::Hs2_spectral;
    lab.s = 1.0;
    CHECK(labelled_norm(*spec, m, lab) == doctest::Approx(h1).epsilon(1e-12));
}

TEST_CASE("time-weighted and critical accumulators") {
    CHECK(critical_smoothness(2, 2.0, 2.0) == doctest::Approx(1.0));
    CHECK(critical_smoothness(3, 4.0, 6.0) == doctest::Approx(0.0));

    const std::vector<double> times{0.0, 1.0, 2.0, 4.0};
    const std::vector<double> norms{3.0, 1.0, 2.0, 100.0};
    CHECK(weighted_norm_accumulator(times, norms, 1.0, 2.0) == doctest::Approx(std::sqrt(9.0 + 1.0 + 8.0)));
    CHECK(weighted_norm_accumulator(times, norms, 0.5, 2.0) == doctest::Approx(std::sqrt(0.0 + 1.0 + 16.0)));
    CHECK_THROWS_AS(weighted_norm_accumulator(times, {1.0}, 1.0, 2.0), std::invalid_argument);

    const auto spec = std::make_shared<SpectralDecomposition>(spectral_decompose(*hetero_1d(6)));
    CriticalNormAccumulator hilbert(spec, 2, 2.0, 2.0);
    CHECK_FALSE(hilbert.surrogate());
    const GridFunction one = GridFunction::Ones(6);
    hilbert.add(0.5, one, one);
    CHECK(hilbert.w_part() == doctest::Approx(0.5 * 1.0));
    CHECK(hilbert.v_part() == doctest::Approx(0.5 * 1.0));
    CHECK(hilbert.value() == doctest::Approx(1.0));
    CHECK(CriticalNormAccumulator(spec, 2, 2.0, 3.0).surrogate());
}

TEST_CASE("critical weights follow the closed forms on random inputs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pq(1.05, 12.0);
    for (int k = 0; k < 100; ++k) {
        SettingInputs in;
        in.d = 2 + static_cast<int>(rng() % 2);
        in.p = pq(rng);
        in.q = pq(rng);
        in.s = std::max(2.0, in.p);
        in.r = 4.0;
        const double base = 1.0 / in.p + in.d / (2.0 * in.q);
        const SettingReport rep = setting_advisor(in);
        CHECK(rep.strong.mu_c == doctest::Approx(base - 0.5).epsilon(1e-15));
        CHECK(rep.weak_I.mu_c == doctest::Approx(base).epsilon(1e-15));
        CHECK(rep.weak_II.mu_c == doctest::Approx(base - 0.25).epsilon(1e-15));
        CHECK(critical_smoothness(in.d, in.p, in.q) == doctest::Approx(2.0 / in.p + in.d / in.q - 1.0));
    }
}

TEST_CASE("critical accumulator is non-decreasing") {
    std::mt19937_64 rng(43);
    const auto spec = std::make_shared<SpectralDecomposition>(spectral_decompose(*aniso_2d(4, 4)));
    for (double q : {2.0, 3.0}) {
        CriticalNormAccumulator acc(spec, 2, 2.5, q);
        double last = acc.value();
        for (int k = 0; k < 50; ++k) {
            acc.add(0.01, random_field(16, rng), random_field(16, rng));
            CHECK(acc.value() >= last);
            last = acc.value();
        }
    }
}

TEST_CASE("spectral L2 norm equals the quadrature L2 norm on random fields") {
    std::mt19937_64 rng(44);
    const auto spec = spectral_decompose(*aniso_2d(5, 4));
    for (int k = 0; k < 20; ++k) {
        const GridFunction u = random_field(20, rng);
        CHECK(sobolev_norm_spectral(spec, u, 0.0) == doctest::Approx(lq_norm(spec.grid, u, 2.0)).epsilon(1e-10));
    }
}
