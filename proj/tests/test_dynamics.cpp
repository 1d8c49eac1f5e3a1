#include "support/fixtures.hpp"

#include "sbd/fhn.hpp"
#include "sbd/monitors.hpp"
#include "sbd/stepper.hpp"

#include <doctest.h>

#include <sstream>

using namespace sbd;
using namespace sbd::testing;

namespace {

std::shared_ptr<BlockOperator> small_block(FHNParams p = {}) { return std::make_shared<BlockOperator>(hetero_1d(8), p); }

StepperConfig fixed(double dt, double T) {
    StepperConfig c;
    c.dt = dt;
    c.dt_min = dt;
    c.dt_max = dt;
    c.adaptive = false;
    c.T = T;
    c.output_interval = T / 4.0;
    c.norm_cap = std::numeric_limits<double>::infinity();
    c.critical_cap = std::numeric_limits<double>::infinity();
    return c;
}

}  // namespace

TEST_CASE("reaction terms") {
    const FHNParams p{0.1, 0.3, 0.7};
    const auto r = fhn_reaction(p, GridFunction::Constant(1, 0.5), GridFunction::Constant(1, 0.2));
    CHECK(r.f[0] == doctest::Approx(0.1));
    CHECK(r.g[0] == doctest::Approx(0.3 * 0.2 - 0.7 * 0.5));

    std::mt19937_64 rng(31);
    const GridFunction v = random_field(10, rng), z = random_field(10, rng), w = random_field(10, rng);
    const GridFunction u = v + z;
    const GridFunction expected = -fhn_reaction(p, u, w).f + p.a * u + w;
    CHECK((remainder_rhs(p, v, z) - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
    CHECK(zero_reaction()(p, v, z, w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stepper configuration constraints") {
    CHECK_NOTHROW(StepperConfig{}.validate());
    StepperConfig c;
    c.dt_min = 1.0;
    CHECK_THROWS_WITH_AS(c.validate(), "stepper: dt_min <= dt violated", std::invalid_argument);
    c = StepperConfig{};
    c.p = 4.0;
    c.mu = 0.2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.mu = 0.3;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("time grids") {
    CHECK(output_times(1.0, 0.25) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(output_times(1.0, 0.3).back() == 1.0);
    CHECK(output_times(1.0, 0.3).size() == 5);

    ZPath zp;
    zp.times = {0.0, 0.1, 0.2};
    CHECK(zp.node_at(0.0) == 0);
    CHECK(zp.node_at(0.15) == 1);
    CHECK(zp.node_at(0.2 * (1.0 - 1e-14)) == 2);
    CHECK(zp.node_at(0.3) == 2);

    const auto block = small_block();
    const auto spec = std::make_shared<SpectralDecomposition>(spectral_decompose(block->bidomain()));
    NoiseSpec noise;
    noise.h = GridFunction::Constant(8, 1.0);
    const ConvolutionSampler sampler(block, spec, noise);
    const ZPath path = sample_zpath(sampler, 0.1, 0.35, {0.05, 0.35}, 0);
    CHECK(path.times == std::vector<double>{0.0, 0.05, 0.1, 0.2, 0.30000000000000004, 0.35});
    CHECK(path.z.front().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero data is a fixed point") {
    const auto block = small_block();
    const CoupledState zero{0.0, GridFunction::Zero(8), GridFunction::Zero(8)};
    const CoupledState next = imex_step(*block, zero, GridFunction::Zero(8), 0.01);
    CHECK(next.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(next.w.cwiseAbs().maxCoeff() == 0.0);

    const auto [traj, status] = integrate_path(*block, fixed(0.01, 0.2), zero, zero_zpath(8, 0.2));
    CHECK(status.outcome == Outcome::completed);
    CHECK(status.T_reached == 0.2);
    CHECK(traj.times.size() == 5);
    CHECK(traj.times.back() == 0.2);
    for (const auto& s : traj.states) CHECK(s.v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear IMEX step solves the resolvent system") {
    const auto block = small_block(FHNParams{0.2, 0.4, 0.6});
    std::mt19937_64 rng(32);
    const CoupledState x{0.0, random_field(8, rng), random_field(8, rng)};
    const GridFunction f = random_field(8, rng);
    const CoupledState y = imex_step(*block, x, GridFunction::Zero(8), 0.05, zero_reaction(), &f);
    const CoupledState ay = block->apply(y);
    CHECK((y.v + 0.05 * ay.v - x.v - 0.05 * f).norm() <= 1e-12);
    CHECK((y.w + 0.05 * ay.w - x.w).norm() <= 1e-12);
}

TEST_CASE("outcomes of the continuation loop") {
    const auto block = small_block();
    const CoupledState big{0.0, GridFunction::Constant(8, 50.0), GridFunction::Zero(8)};

    SUBCASE("sup-norm cap") {
        StepperConfig c = fixed(0.01, 1.0);
        c.norm_cap = 10.0;
        const auto [traj, status] = integrate_path(*block, c, big, zero_zpath(8, 1.0));
        CHECK(status.outcome == Outcome::blow_up_detected);
        CHECK(status.T_reached == 0.0);
        CHECK(status.reason.find("sup-norm cap") != std::string::npos);
    }
    SUBCASE("non-finite state at fixed dt") {
        const auto [traj, status] =
            integrate_path(*block, fixed(0.5, 2.0), CoupledState{0.0, GridFunction::Constant(8, 1e6), GridFunction::Zero(8)},
                           zero_zpath(8, 2.0), IntegrateOptions{[](const FHNParams&, const GridFunction& v,
                                                                   const GridFunction&, const GridFunction&) {
                                                                    return GridFunction(v.array().cube());
                                                                }});
        CHECK(status.outcome == Outcome::step_failure);
        CHECK(status.reason.find("non-finite") != std::string::npos);
    }
    SUBCASE("dt below dt_min") {
        StepperConfig c;
        c.dt = 0.01;
        c.dt_min = 0.005;
        c.dt_max = 0.01;
        c.tol = 1e-6;
        c.T = 1.0;
        c.norm_cap = std::numeric_limits<double>::infinity();
        const auto [traj, status] = integrate_path(*block, c, big, zero_zpath(8, 1.0));
        CHECK(status.outcome == Outcome::step_failure);
        CHECK(status.reason.find("dt_min") != std::string::npos);
        CHECK(status.rejected >= 1);
    }
    SUBCASE("short z path") {
        CHECK_THROWS_AS(integrate_path(*block, fixed(0.01, 1.0), big, zero_zpath(8, 0.5)), std::invalid_argument);
    }
}

TEST_CASE("adaptive stepping halves and recovers") {
    const auto block = small_block();
    StepperConfig c;
    c.dt = 0.05;
    c.dt_min = 1e-8;
    c.dt_max = 0.05;
    c.tol = 0.01;
    c.T = 0.5;
    c.output_interval = 0.1;
    const CoupledState init{0.0, block->grid().sample([](const std::array<double, 3>& x) { return 2.0 * x[0]; }),
                            GridFunction::Zero(8)};
    const auto [traj, status] = integrate_path(*block, c, init, zero_zpath(8, 0.5));
    CHECK(status.outcome == Outcome::completed);
    CHECK(status.rejected > 0);
    CHECK(traj.times.size() == 6);
    for (std::size_t k = 0; k < traj.times.size(); ++k) CHECK(traj.states[k].t == doctest::Approx(traj.times[k]));
}

TEST_CASE("energy monitors hold on a run and flag a tampered step") {
    const auto block = small_block();
    const auto spec = std::make_shared<SpectralDecomposition>(spectral_decompose(block->bidomain()));
    NoiseSpec noise;
    noise.h = GridFunction::Constant(8, 0.3);
    noise.seed = 3;
    const ConvolutionSampler sampler(block, spec, noise);
    StepperConfig c = fixed(0.002, 0.2);
    const ZPath zp = sample_zpath(sampler, 0.002, 0.2, {}, 0);
    const CoupledState init{0.0, block->grid().sample([](const std::array<double, 3>& x) { return x[0] < 0.3 ? 1.0 : 0.0; }),
                            GridFunction::Zero(8)};

    EnergyLedger ledger(spec, block->params(), c.mu);
    IntegrateOptions opts;
    opts.spectral = spec;
    opts.observer = [&](const StepInfo& info) { ledger.record(info); };
    const auto [traj, status] = integrate_path(*block, c, init, zp, opts);
    CHECK(status.outcome == Outcome::completed);
    const LedgerSummary sum = ledger.summary();
    CHECK(sum.steps == 100);
    CHECK(sum.total_violations() == 0);
    CHECK(sum.all_finite());
    // Finite energy entries imply a finite critical integral.
    CHECK(std::isfinite(status.critical_integral));

    std::ostringstream csv;
    ledger.write_csv(csv);
    const std::string text = csv.str();
    CHECK(text.rfind("t,dt,norm_v_L2_sq,", 0) == 0);
    CHECK(text.find("margin_lemma_vw") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 101);

    MonitorStep bad;
    bad.dt = 1e-3;
    bad.t_next = 1e-3;
    bad.v0 = GridFunction::Zero(8);
    bad.v1 = GridFunction::Ones(8);
    bad.w0 = bad.w1 = bad.z = GridFunction::Zero(8);
    CHECK(energy_monitor_vw(*spec, block->params(), bad).violated());
}

TEST_CASE("linear IMEX steps never increase the modal energy") {
    const auto block = small_block(FHNParams{0.1, 0.01, 0.01});
    std::mt19937_64 rng(34);
    // Energy norm in which every modal block is dissipative: |v|^2 + |w|^2 / c.
    const auto energy = [&](const CoupledState& s) {
        return s.v.squaredNorm() + s.w.squaredNorm() / block->params().c;
    };
    for (double dt : {1e-3, 0.1, 10.0, 1e4}) {
        CoupledState s{0.0, random_field(8, rng), random_field(8, rng)};
        for (int n = 0; n < 20; ++n) {
            const CoupledState next = imex_step(*block, s, GridFunction::Zero(8), dt, zero_reaction());
            CHECK(energy(next) <= energy(s) * (1.0 + 1e-12));
            s = next;
        }
    }
}

TEST_CASE("spatially constant data stays constant") {
    const auto block = small_block();
    const CoupledState init{0.0, GridFunction::Constant(8, 0.7), GridFunction::Constant(8, 0.05)};
    const auto [traj, status] = integrate_path(*block, fixed(0.01, 1.0), init, zero_zpath(8, 1.0));
    CHECK(status.outcome == Outcome::completed);
    for (const auto& s : traj.states) {
        CHECK(s.v.maxCoeff() - s.v.minCoeff() <= 1e-12);
        CHECK(s.w.maxCoeff() - s.w.minCoeff() <= 1e-12);
    }
}

TEST_CASE("monitor tolerances shrink linearly with dt on a smooth trajectory") {
    const auto block = small_block();
    const SpectralDecomposition spec = spectral_decompose(block->bidomain());
    const Grid& g = spec.grid;
    const GridFunction phi = g.sample([](const std::array<double, 3>& x) { return 0.5 + std::cos(3.0 * x[0]); });
    const GridFunction z = g.sample([](const std::array<double, 3>& x) { return 0.1 * x[0]; });
    const auto step = [&](double dt) {
        MonitorStep s;
        s.dt = dt;
        s.t_next = 0.5 + dt;
        s.v0 = std::cos(0.5) * phi;
        s.v1 = std::cos(0.5 + dt) * phi;
        s.w0 = 0.1 * std::sin(0.5) * phi;
        s.w1 = 0.1 * std::sin(0.5 + dt) * phi;
        s.z = z;
        return s;
    };
    std::vector<double> tol_vw, tol_vt;
    for (double dt : {0.04, 0.02, 0.01, 0.005}) {
        tol_vw.push_back(energy_monitor_vw(spec, block->params(), step(dt)).tol);
        tol_vt.push_back(energy_monitor_vt(spec, block->params(), step(dt)).tol);
    }
    for (std::size_t k = 1; k < tol_vw.size(); ++k) {
        CHECK(tol_vw[k - 1] / tol_vw[k] == doctest::Approx(2.0).epsilon(0.1));
        CHECK(tol_vt[k - 1] / tol_vt[k] == doctest::Approx(2.0).epsilon(0.1));
    }
}
