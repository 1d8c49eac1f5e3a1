#include "sbd/ou.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

namespace sbd {

namespace {

double row_sum_norm(const Eigen::Matrix2d& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Eigen::Matrix2d solve_sylvester(const Eigen::Matrix2d& mj, const Eigen::Matrix2d& mk, const Eigen::Matrix2d& rhs) {
    // vec(Mj X + X Mk^T) = (I (x) Mj + Mk (x) I) vec(X), column-major vec.
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 2; ++a) {
        k.block<2, 2>(2 * a, 2 * a) += mj;
        for (int b = 0; b < 2; ++b) k.block<2, 2>(2 * a, 2 * b) += mk(a, b) * Eigen::Matrix2d::Identity();
    }
    const Eigen::Vector4d x = k.fullPivLu().solve(Eigen::Map<const Eigen::Vector4d>(rhs.data()));
    return Eigen::Map<const Eigen::Matrix2d>(x.data());
}

}  // namespace

Eigen::Matrix2d ou_propagator(const Eigen::Matrix2d& m, double s) {
    const double tr = m.trace();
    const double mu = 0.5 * tr;
    const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
    const double d2 = half_diff * half_diff + m(0, 1) * m(1, 0);
    const Eigen::Matrix2d n = m - mu * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();

    if (2.0 * std::sqrt(std::abs(d2)) < 1e-8 * std::abs(tr)) {
        return std::exp(-mu * s) * (id - s * n);
    }
    if (d2 > 0.0) {
        const double delta = std::sqrt(d2);
        if (delta * s < 1.0) {
            return std::exp(-mu * s) * (std::cosh(delta * s) * id - (std::sinh(delta * s) / delta) * n);
        }
        const double ep = std::exp((-mu + delta) * s);
        const double em = std::exp((-mu - delta) * s);
        return 0.5 * (ep + em) * id - (0.5 * (ep - em) / delta) * n;
    }
    const double omega = std::sqrt(-d2);
    return std::exp(-mu * s) * (std::cos(omega * s) * id - (std::sin(omega * s) / omega) * n);
}

Eigen::Matrix2d ou_cross_covariance(const Eigen::Matrix2d& mj, const Eigen::Matrix2d& mk, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("covariance horizon must be non-negative");
    if (t == 0.0) return Eigen::Matrix2d::Zero();
    if ((row_sum_norm(mj) + row_sum_norm(mk)) * t <= 1.0) {
        using GL = boost::math::quadrature::gauss<double, 20>;
        Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
        const auto& x = GL::abscissa();
        const auto& w = GL::weights();
        auto add = [&](double node, double weight) {
            const double s = 0.5 * t * (node + 1.0);
            sum += weight * ou_propagator(mj, s).col(0) * ou_propagator(mk, s).col(0).transpose();
        };
        for (std::size_t i = 0; i < x.size(); ++i) {
            add(x[i], w[i]);
            if (x[i] != 0.0) add(-x[i], w[i]);
        }
        return 0.5 * t * sum;
    }
    const Eigen::Matrix2d ej = ou_propagator(mj, t);
    const Eigen::Matrix2d ek = ou_propagator(mk, t);
    Eigen::Matrix2d rhs = -ej.col(0) * ek.col(0).transpose();
    rhs(0, 0) += 1.0;
    return solve_sylvester(mj, mk, rhs);
}

Eigen::Matrix2d ou_step_covariance(const Eigen::Matrix2d& m, double g, double dt) {
    Eigen::Matrix2d q = g * g * ou_cross_covariance(m, m, dt);
    return 0.5 * (q + q.transpose());
}

Eigen::Matrix2d ou_stationary_covariance(const Eigen::Matrix2d& m, double g) {
    Eigen::Matrix2d rhs = Eigen::Matrix2d::Zero();
    rhs(0, 0) = g * g;
    Eigen::Matrix2d s = solve_sylvester(m, m, rhs);
    return 0.5 * (s + s.transpose());
}

Eigen::Matrix2d psd_factor(const Eigen::Matrix2d& q) {
    Eigen::Matrix2d f = Eigen::Matrix2d::Zero();
    if (q(0, 0) > 0.0) {
        f(0, 0) = std::sqrt(q(0, 0));
        f(1, 0) = q(1, 0) / f(0, 0);
        f(1, 1) = std::sqrt(std::max(q(1, 1) - f(1, 0) * f(1, 0), 0.0));
    } else {
        f(1, 1) = std::sqrt(std::max(q(1, 1), 0.0));
    }
    return f;
}

Eigen::Vector2d ou_exact_step(const Eigen::Matrix2d& m, double g, const Eigen::Vector2d& z, double dt,
                              const Eigen::Vector2d& xi) {
    if (!(dt > 0.0)) throw std::invalid_argument("OU step must be positive");
    return ou_propagator(m, dt) * z + psd_factor(ou_step_covariance(m, g, dt)) * xi;
}

}  // namespace sbd
