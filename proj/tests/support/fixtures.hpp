#pragma once

#include "sbd/advisor.hpp"
#include "sbd/bidomain.hpp"
#include "sbd/block.hpp"
#include "sbd/elliptic.hpp"
#include "sbd/spectral.hpp"

#include <memory>
#include <random>
#include <string>

namespace sbd::testing {

inline std::shared_ptr<BidomainOperator> make_operator(const Grid& grid, const TensorField& a1, const TensorField& a2) {
    return std::make_shared<BidomainOperator>(assemble_elliptic_operator(grid, a1), assemble_elliptic_operator(grid, a2));
}

/// Heterogeneous 1D pair: a_i = 1 + x, a_e = 0.5 + x^2.
inline std::shared_ptr<BidomainOperator> hetero_1d(int n) {
    const Grid g = build_grid(1, {n}, {1.0});
    const auto a1 = TensorField::from_function(g, Medium::intracellular, [](const std::array<double, 3>& x) {
        return Tensor((1.0 + x[0]) * Tensor::Identity());
    });
    const auto a2 = TensorField::from_function(g, Medium::extracellular, [](const std::array<double, 3>& x) {
        return Tensor((0.5 + x[0] * x[0]) * Tensor::Identity());
    });
    return make_operator(g, a1, a2);
}

/// Anisotropic 2D pair with diagonal tensors diag(1, 0.3) and diag(2, 1.3).
inline std::shared_ptr<BidomainOperator> aniso_2d(int nx, int ny) {
    const Grid g = build_grid(2, {nx, ny}, {1.0, 1.0});
    const double d1[] = {1.0, 0.3};
    const double d2[] = {2.0, 1.3};
    return make_operator(g, TensorField::diagonal(g, Medium::intracellular, d1),
                         TensorField::diagonal(g, Medium::extracellular, d2));
}

inline GridFunction random_field(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    GridFunction u(n);
    for (Index i = 0; i < n; ++i) u[i] = normal(rng);
    return u;
}

inline GridFunction random_mean_zero(const Grid& g, std::mt19937_64& rng) {
    return mean_zero_project(g, random_field(g.size(), rng));
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix with a known
/// one-dimensional kernel (the constants).
inline Eigen::MatrixXd pinv_sym(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd& ev = es.eigenvalues();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (Index k = 1; k < ev.size(); ++k) inv[k] = 1.0 / ev[k];
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

/// (A1^+ + A2^+)^+, the harmonic mean on the mean-zero subspace.
inline Eigen::MatrixXd dense_harmonic_oracle(const BidomainOperator& op) {
    const Eigen::MatrixXd a1 = Eigen::MatrixXd(op.a1().matrix);
    const Eigen::MatrixXd a2 = Eigen::MatrixXd(op.a2().matrix);
    return pinv_sym(pinv_sym(a1) + pinv_sym(a2));
}

struct VerdictRow {
    double mu_c;
    const char* failures;  // ';'-separated names, empty when the setting passes
};

struct AdvisorRow {
    int d;
    double p, q, s, r;
    bool plain;
    const char* stoch_failures;
    VerdictRow strong, weak_I, weak_II;
};

// Generated by tests/oracles/advisor_table.py (exact rational arithmetic).
inline const AdvisorRow kAdvisorTable[] = {
    {2, 2.0 / 1.0, 2.0 / 1.0, 2.0 / 1.0, 2.0 / 1.0, false, "", {1.0 / 2.0, ""}, {1.0 / 1.0, "d/(d-1)<q"}, {3.0 / 4.0, ""}},
    {2, 2.0 / 1.0, 2.0 / 1.0, 4.0 / 1.0, 4.0 / 1.0, true, "", {1.0 / 2.0, "d/(3q)+1/s<=1/2"}, {1.0 / 1.0, "d/(d-1)<q"}, {3.0 / 4.0, ""}},
    {2, 4.0 / 1.0, 2.0 / 1.0, 4.0 / 1.0, 4.0 / 1.0, false, "", {1.0 / 4.0, ""}, {3.0 / 4.0, "d/(d-1)<q"}, {1.0 / 2.0, ""}},
    {2, 2.0 / 1.0, 4.0 / 1.0, 2.0 / 1.0, 4.0 / 1.0, false, "", {1.0 / 4.0, ""}, {3.0 / 4.0, ""}, {1.0 / 2.0, ""}},
    {2, 3.0 / 1.0, 3.0 / 1.0, 6.0 / 1.0, 6.0 / 1.0, true, "", {1.0 / 6.0, ""}, {2.0 / 3.0, ""}, {5.0 / 12.0, ""}},
    {2, 6.0 / 1.0, 4.0 / 1.0, 6.0 / 1.0, 8.0 / 1.0, true, "", {-1.0 / 12.0, ""}, {5.0 / 12.0, ""}, {1.0 / 6.0, ""}},
    {2, 3.0 / 2.0, 3.0 / 2.0, 2.0 / 1.0, 2.0 / 1.0, false, "", {5.0 / 6.0, ""}, {4.0 / 3.0, "d/(d-1)<q;1/p+d/(2q)<=1;mu-interval empty"}, {13.0 / 12.0, "1/p+d/(2q)<=5/4;mu-interval empty"}},
    {2, 5.0 / 4.0, 5.0 / 4.0, 2.0 / 1.0, 2.0 / 1.0, false, "", {11.0 / 10.0, "1/p+d/(2q)<=3/2;d/(3q)+1/s<=1;mu-interval empty"}, {8.0 / 5.0, "d/(d-1)<q;1/p+d/(2q)<=1;mu-interval empty"}, {27.0 / 20.0, "2d/(2d-1)<q;1/p+d/(2q)<=5/4;mu-interval empty"}},
    {2, 2.0 / 1.0, 8.0 / 1.0, 2.0 / 1.0, 8.0 / 1.0, false, "", {1.0 / 8.0, ""}, {5.0 / 8.0, "q<=2d"}, {3.0 / 8.0, ""}},
    {2, 2.0 / 1.0, 9.0 / 1.0, 4.0 / 1.0, 9.0 / 1.0, true, "", {1.0 / 9.0, ""}, {11.0 / 18.0, "q<=2d"}, {13.0 / 36.0, "q<=4d"}},
    {2, 4.0 / 1.0, 4.0 / 3.0, 4.0 / 1.0, 4.0 / 1.0, true, "", {1.0 / 2.0, "q>2d/3;d/(3q)+1/s<=1/2"}, {1.0 / 1.0, "d/(d-1)<q;d/(3q)+1/s<=2/3"}, {3.0 / 4.0, "2d/(2d-1)<q;d/(3q)+1/s<=7/12"}},
    {2, 2.0 / 1.0, 11.0 / 10.0, 2.0 / 1.0, 2.0 / 1.0, false, "", {10.0 / 11.0, "d/(3q)+1/s<=1"}, {31.0 / 22.0, "d/(d-1)<q;1/p+d/(2q)<=1;mu-interval empty"}, {51.0 / 44.0, "2d/(2d-1)<q;1/p+d/(2q)<=5/4;d/(3q)+1/s<=13/12;mu-interval empty"}},
    {3, 2.0 / 1.0, 2.0 / 1.0, 2.0 / 1.0, 2.0 / 1.0, false, "", {3.0 / 4.0, ""}, {5.0 / 4.0, "1/p+d/(2q)<=1;mu-interval empty"}, {1.0 / 1.0, ""}},
    {3, 2.0 / 1.0, 3.0 / 1.0, 4.0 / 1.0, 6.0 / 1.0, true, "", {1.0 / 2.0, "d/(3q)+1/s<=1/2"}, {1.0 / 1.0, ""}, {3.0 / 4.0, ""}},
    {3, 4.0 / 1.0, 6.0 / 1.0, 4.0 / 1.0, 6.0 / 1.0, true, "", {0.0 / 1.0, ""}, {1.0 / 2.0, ""}, {1.0 / 4.0, ""}},
    {2, 2.0 / 1.0, 2.0 / 1.0, 4.0 / 1.0, 2.0 / 1.0, false, "r>2 if s>2", {1.0 / 2.0, ""}, {1.0 / 1.0, "d/(d-1)<q"}, {3.0 / 4.0, ""}},
    {3, 3.0 / 1.0, 12.0 / 1.0, 3.0 / 1.0, 12.0 / 1.0, false, "", {-1.0 / 24.0, ""}, {11.0 / 24.0, "q<=2d"}, {5.0 / 24.0, ""}},
    {3, 2.0 / 1.0, 13.0 / 1.0, 4.0 / 1.0, 13.0 / 1.0, true, "", {3.0 / 26.0, ""}, {8.0 / 13.0, "q<=2d"}, {19.0 / 52.0, "q<=4d"}},
    {3, 8.0 / 1.0, 3.0 / 2.0, 8.0 / 1.0, 8.0 / 1.0, true, "", {5.0 / 8.0, "q>2d/3;d/(3q)+1/s<=1/2;mu-interval empty"}, {9.0 / 8.0, "d/(d-1)<q;1/p+d/(2q)<=1;d/(3q)+1/s<=2/3;mu-interval empty"}, {7.0 / 8.0, "d/(3q)+1/s<=7/12;mu-interval empty"}},
    {3, 4.0 / 1.0, 2.0 / 1.0, 2.0 / 1.0, 2.0 / 1.0, false, "s>=p", {1.0 / 2.0, ""}, {1.0 / 1.0, ""}, {3.0 / 4.0, ""}},
};

inline std::string joined_failures(const SettingVerdict& v) {
    std::string out;
    for (const auto& n : v.violations()) out += (out.empty() ? "" : ";") + n;
    return out;
}

inline std::string joined_failures(const std::vector<Inequality>& checks) {
    std::string out;
    for (const auto& c : checks)
        if (!c.holds) out += (out.empty() ? "" : ";") + c.name;
    return out;
}

inline SettingInputs advisor_inputs_of(const AdvisorRow& row) {
    SettingInputs in;
    in.d = row.d;
    in.p = row.p;
    in.q = row.q;
    in.s = row.s;
    in.r = row.r;
    in.regularity = row.plain ? NoiseClass::plain : NoiseClass::half_power;
    return in;
}

}  // namespace sbd::testing
