#include "support/fixtures.hpp"

#include "sbd/noise.hpp"
#include "sbd/ou.hpp"
#include "sbd/rng.hpp"

#include <doctest.h>

using namespace sbd;
using namespace sbd::testing;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normals are a pure function of (seed, block, step, replica)") {
    const Philox4x32 a(5), b(5), c(6);
    CHECK(a.normals(1, 2, 3) == b.normals(1, 2, 3));
    CHECK(a.normals(1, 2, 3) != a.normals(1, 2, 4));
    CHECK(a.normals(1, 2, 3) != c.normals(1, 2, 3));
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto z = a.normals(static_cast<std::uint32_t>(i), 0, 0);
        sum += z[0] + z[1];
        sq += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(std::abs(sum / (2 * n)) < 0.03);
    CHECK(std::abs(sq / (2 * n) - 1.0) < 0.03);
}

TEST_CASE("OU propagator and step covariance match high-precision values") {
    // lambda = 1, a = 0.5, b = 1, c = 1, dt = 0.3, g = 1 (40-digit quadrature).
    Eigen::Matrix2d m;
    m << 1.5, 1.0, -1.0, 1.0;
    const Eigen::Matrix2d e = ou_propagator(m, 0.3);
    CHECK(e(0, 0) == doctest::Approx(0.60767268859672796875).epsilon(1e-13));
    CHECK(e(0, 1) == doctest::Approx(-0.20329948971997011705).epsilon(1e-13));
    CHECK(e(1, 0) == doctest::Approx(0.20329948971997011705).epsilon(1e-13));
    CHECK(e(1, 1) == doctest::Approx(0.70932243345671302728).epsilon(1e-13));
    const Eigen::Matrix2d q = ou_step_covariance(m, 1.0, 0.3);
    CHECK(q(0, 0) == doctest::Approx(0.19306536598913905902).epsilon(1e-13));
    CHECK(q(0, 1) == doctest::Approx(0.025768902783103450518).epsilon(1e-12));
    CHECK(q(1, 0) == doctest::Approx(0.025768902783103450518).epsilon(1e-12));
    CHECK(q(1, 1) == doctest::Approx(0.0051035615229033328672).epsilon(1e-12));
}

TEST_CASE("OU propagator is continuous through the repeated-eigenvalue case") {
    // Eigenvalues coincide when (lambda + a - b)^2 = 4c.
    const double c0 = 0.25 * 0.9 * 0.9;
    Eigen::Matrix2d at, near;
    at << 1.0, 1.0, -c0, 0.1;
    near << 1.0, 1.0, -(c0 * (1.0 + 1e-7)), 0.1;
    for (double s : {0.01, 0.5, 3.0}) {
        CHECK((ou_propagator(at, s) - ou_propagator(near, s)).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((ou_step_covariance(at, 1.0, s) - ou_step_covariance(near, 1.0, s)).cwiseAbs().maxCoeff() <= 1e-6);
    }
    Eigen::Matrix2d complex_pair;
    complex_pair << 0.5, 1.0, -3.0, 0.2;
    const Eigen::Matrix2d sum = ou_propagator(complex_pair, 0.4) * ou_propagator(complex_pair, 0.6);
    CHECK((sum - ou_propagator(complex_pair, 1.0)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("stationary covariance solves the Lyapunov equation and is the long-time limit") {
    Eigen::Matrix2d m;
    m << 2.1, 1.0, -0.3, 0.4;
    const Eigen::Matrix2d sigma = ou_stationary_covariance(m, 1.7);
    Eigen::Matrix2d rhs = Eigen::Matrix2d::Zero();
    rhs(0, 0) = 1.7 * 1.7;
    CHECK((m * sigma + sigma * m.transpose() - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((ou_step_covariance(m, 1.7, 200.0) - sigma).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("cross covariance is continuous across the quadrature switch") {
    Eigen::Matrix2d mj, mk;
    mj << 3.0, 1.0, -0.2, 0.3;
    mk << 7.0, 1.0, -0.2, 0.3;
    // Quadrature takes over for (|Mj|_inf + |Mk|_inf) t <= 1.
    const auto inf = [](const Eigen::Matrix2d& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
    const double t_switch = 1.0 / (inf(mj) + inf(mk));
    const Eigen::Matrix2d below = ou_cross_covariance(mj, mk, t_switch);
    const Eigen::Matrix2d above = ou_cross_covariance(mj, mk, std::nextafter(t_switch, 1.0));
    CHECK((below - above).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::Matrix2d sym = ou_cross_covariance(mj, mj, 0.7);
    CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((ou_cross_covariance(mj, mk, 0.7) - ou_cross_covariance(mk, mj, 0.7).transpose()).cwiseAbs().maxCoeff() <=
          1e-14);
}

TEST_CASE("psd factor reproduces the covariance, including rank one") {
    Eigen::Matrix2d q;
    q << 4.0, 1.0, 1.0, 2.0;
    const Eigen::Matrix2d f = psd_factor(q);
    CHECK((f * f.transpose() - q).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::Matrix2d r;
    r << 1.0, 2.0, 2.0, 4.0;
    const Eigen::Matrix2d g = psd_factor(r);
    CHECK((g * g.transpose() - r).cwiseAbs().maxCoeff() <= 1e-14);
}

namespace {

ConvolutionSampler make_sampler(const std::shared_ptr<BidomainOperator>& op, GridFunction h, Index modes = 0,
                                std::vector<ScheduleSegment> schedule = {}) {
    auto block = std::make_shared<BlockOperator>(op, FHNParams{});
    auto spec = std::make_shared<SpectralDecomposition>(spectral_decompose(*op));
    NoiseSpec noise;
    noise.h = std::move(h);
    noise.modes = modes;
    noise.seed = 99;
    noise.schedule = std::move(schedule);
    return ConvolutionSampler(block, spec, noise);
}

}  // namespace

TEST_CASE("noise schedule") {
    NoiseSpec s;
    s.schedule = {{0.0, 1.0}, {1.0, 2.0}, {2.5, 0.0}};
    CHECK(s.scale_at(0.5) == 1.0);
    CHECK(s.scale_at(1.0) == 2.0);
    CHECK(s.scale_at(3.0) == 0.0);
    CHECK(s.breakpoints(0.5, 3.0) == std::vector<double>{1.0, 2.5});
    CHECK(s.breakpoints(1.0, 2.0).empty());
}

TEST_CASE("modal covariance of a constant h is diagonal") {
    const auto op = aniso_2d(4, 3);
    const ConvolutionSampler s = make_sampler(op, GridFunction::Constant(op->size(), 0.5));
    CHECK(s.covariance().diagonal);
    CHECK((s.covariance().G - 0.25 * Eigen::MatrixXd::Identity(op->size(), op->size())).cwiseAbs().maxCoeff() <=
          1e-12);
    const GridFunction h = op->grid().sample([](const std::array<double, 3>& x) { return 1.0 + x[0]; });
    const ConvolutionSampler t = make_sampler(op, h);
    CHECK_FALSE(t.covariance().diagonal);
    const Eigen::MatrixXd& F = t.covariance().factor;
    CHECK((F * F.transpose() - t.covariance().G).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("stochastic convolution: zero noise, replicas and truncation") {
    const auto op = hetero_1d(6);
    const ConvolutionSampler zero = make_sampler(op, GridFunction::Zero(6));
    const auto zp = stochastic_convolution_path(zero, {0.0, 0.5, 1.0});
    CHECK(zp.back().Z.cwiseAbs().maxCoeff() == 0.0);

    const ConvolutionSampler s = make_sampler(op, GridFunction::Constant(6, 1.0), 3);
    CHECK(s.modes() == 3);
    const auto a = stochastic_convolution_path(s, {0.0, 0.5, 1.0}, 4);
    const auto b = stochastic_convolution_path(s, {0.0, 0.5, 1.0}, 4);
    const auto c = stochastic_convolution_path(s, {0.0, 0.5, 1.0}, 5);
    CHECK(a.back().Z == b.back().Z);
    CHECK(a.back().Z != c.back().Z);
    CHECK(a.back().Z.rows() == 3);
    const GridFunction z = s.z(a.back());
    const Eigen::VectorXd coef = s.spectral().coefficients(z);
    CHECK(coef.tail(3).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(stochastic_convolution_path(s, {0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("schedule scales the exact covariance") {
    const auto op = hetero_1d(4);
    const GridFunction h = GridFunction::Constant(4, 1.0);
    const ConvolutionSampler one = make_sampler(op, h);
    const ConvolutionSampler two = make_sampler(op, h, 0, {{0.0, 2.0}});
    const ConvolutionSampler off = make_sampler(op, h, 0, {{0.0, 1.0}, {0.5, 0.0}});
    for (Index k = 0; k < 4; ++k) {
        CHECK((two.exact_covariance(k, 0.8) - 4.0 * one.exact_covariance(k, 0.8)).cwiseAbs().maxCoeff() <= 1e-14);
        const Eigen::Matrix2d e = ou_propagator(one.modal_matrix(k), 0.5);
        const Eigen::Matrix2d expected = e * one.exact_covariance(k, 0.5) * e.transpose();
        CHECK((off.exact_covariance(k, 1.0) - expected).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("Ito isometry on a small ensemble") {
    const auto op = hetero_1d(4);
    const ConvolutionSampler s = make_sampler(op, GridFunction::Constant(4, 0.8));
    std::vector<ConvolutionPath> ens;
    for (std::uint64_t r = 0; r < 4000; ++r) ens.push_back(stochastic_convolution_path(s, {0.0, 0.3, 1.0}, r).back());
    for (double alpha : {0.0, 0.5}) {
        const ItoReport rep = ito_isometry_check(s, ens, alpha, 1.0);
        CHECK(rep.samples == 4000);
        CHECK(std::abs(rep.z_score) <= 4.0);
    }
    CHECK_THROWS_AS(ito_isometry_check(s, std::vector<ConvolutionPath>(ens.begin(), ens.begin() + 10), 0.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ito_isometry_check(s, ens, 0.25, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ito_isometry_check(s, ens, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("z is linear in h pathwise") {
    const auto op = aniso_2d(4, 3);
    const GridFunction h = op->grid().sample([](const std::array<double, 3>& x) { return 0.3 + x[1]; });
    const ConvolutionSampler one = make_sampler(op, h);
    const ConvolutionSampler two = make_sampler(op, 2.0 * h);
    const auto a = stochastic_convolution_path(one, {0.0, 0.2, 0.7}, 9);
    const auto b = stochastic_convolution_path(two, {0.0, 0.2, 0.7}, 9);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const GridFunction za = one.z(a[k]), zb = two.z(b[k]);
        CHECK((zb - 2.0 * za).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, zb.cwiseAbs().maxCoeff()));
    }
    CHECK(a.back().sup_z_h1 > 0.0);
    CHECK(std::isfinite(a.back().sup_z_h1));
}

TEST_CASE("one exact step and two half steps share mean and covariance") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::Matrix2d m;
        m << u(rng) + u(rng), 1.0, -u(rng), u(rng);
        const double t = u(rng), g = u(rng);
        const Eigen::Matrix2d e = ou_propagator(m, 0.5 * t);
        CHECK((e * e - ou_propagator(m, t)).cwiseAbs().maxCoeff() <= 1e-10);
        const Eigen::Matrix2d half = ou_step_covariance(m, g, 0.5 * t);
        const Eigen::Matrix2d twice = e * half * e.transpose() + half;
        CHECK((twice - ou_step_covariance(m, g, t)).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1.0, twice.cwiseAbs().maxCoeff()));
    }
}
