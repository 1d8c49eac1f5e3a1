#include "sbd/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace sbd {

namespace {

using Arr = Eigen::ArrayXd;

struct Quadrature {
    double vol;
    double l1(const Arr& f) const { return f.abs().sum() * vol; }
    double l2sq(const Arr& f) const { return f.square().sum() * vol; }
    double lp_pow(const Arr& f, double p) const { return f.abs().pow(p).sum() * vol; }
};

double energy_seminorm(const SpectralDecomposition& spec, const GridFunction& u, int power) {
    const Eigen::VectorXd c = spec.coefficients(u);
    return (spec.eigenvalues.array().pow(power) * c.array().square()).sum();
}

void check_step(const MonitorStep& s) {
    const Index n = s.v1.size();
    if (!(s.dt > 0.0)) throw std::invalid_argument("monitor step needs dt > 0");
    if (s.v0.size() != n || s.w1.size() != n || s.w0.size() != n || s.z.size() != n) {
        throw std::invalid_argument("monitor step fields differ in size");
    }
    if (s.forcing.size() != 0 && s.forcing.size() != n) throw std::invalid_argument("forcing size mismatch");
}

}  // namespace

MonitorResult energy_monitor_vw(const SpectralDecomposition& spec, const FHNParams& params, const MonitorStep& s,
                                double c_disc) {
    check_step(s);
    const Quadrature Q{spec.grid.cell_volume()};
    const Arr v = s.v1.array();
    const Arr v0 = s.v0.array();
    const Arr z = s.z.array();
    const Arr w = s.w1.array();
    const double dt = s.dt;

    const double e1 = 0.5 * Q.l2sq(v);
    const double e0 = 0.5 * Q.l2sq(v0);
    const double av = energy_seminorm(spec, s.v1, 1);
    const double l4 = Q.lp_pow(v, 4.0);
    const double l2 = Q.l2sq(v);
    const double vz = Q.l2sq(v * z);

    MonitorResult r;
    r.lhs = (e1 - e0) / dt + av + l4 + params.a * l2 + 3.0 * vz;
    r.rhs = MonitorConstants::vw_v3z * Q.l1(v.cube() * z) + Q.l1(z.cube() * v) + Q.l1(w * v) +
            MonitorConstants::vw_quadratic * (Q.l1(v.cube()) + 2.0 * Q.l1(v.square() * z) + Q.l1(v * z.square()));
    if (s.forcing.size()) r.rhs += Q.l1(s.forcing.array() * v);

    // R is evaluated at v^n but the identity is tested at v^{n+1}:
    // |R(v^n) - R(v^{n+1})| <= (3M^2 + 2(a+1)M) |v^{n+1} - v^n|.
    const double m = std::max((v0 + z).abs().maxCoeff(), (v + z).abs().maxCoeff());
    const double d_norm = std::sqrt(Q.l2sq((v - v0) / dt));
    const double scale = std::abs(e1) / dt + std::abs(e0) / dt + std::abs(av) + l4 + params.a * l2 + 3.0 * vz + r.rhs;
    r.tol = c_disc * dt * (3.0 * m * m + 2.0 * (params.a + 1.0) * m) * d_norm * std::sqrt(l2) +
            MonitorConstants::roundoff * scale;
    return r;
}

MonitorResult energy_monitor_w_h1(const SpectralDecomposition& spec, const FHNParams& params, const MonitorStep& s,
                                  double mu) {
    check_step(s);
    const double x1 = energy_seminorm(spec, s.w1, 1);
    const double x0 = energy_seminorm(spec, s.w0, 1);
    const double yv = energy_seminorm(spec, s.v1, 1);
    const double yz = energy_seminorm(spec, s.z, 1);
    const double t = s.t_next;

    MonitorResult r;
    r.lhs = (x1 - x0) / s.dt + 2.0 * params.b * x1;
    if (t > 0.0) {
        r.rhs = MonitorConstants::w_h1_z * yz + params.c * params.c * std::pow(t, 1.0 - mu) * yv +
                std::pow(t, mu - 1.0) * x1;
    } else if (mu == 1.0) {
        r.rhs = params.c * params.c * yv + x1;
    }
    const double scale = (std::abs(x1) + std::abs(x0)) / s.dt + 2.0 * params.b * std::abs(x1) + std::abs(r.rhs);
    r.tol = MonitorConstants::roundoff * scale;
    return r;
}

MonitorResult energy_monitor_vt(const SpectralDecomposition& spec, const FHNParams& params, const MonitorStep& s,
                                double c_disc) {
    check_step(s);
    const Quadrature Q{spec.grid.cell_volume()};
    const Arr v = s.v1.array();
    const Arr v0 = s.v0.array();
    const Arr z = s.z.array();
    const double dt = s.dt;
    const Arr d = (v - v0) / dt;

    const double d_sq = Q.l2sq(d);
    const double y1 = energy_seminorm(spec, s.v1, 1);
    const double y0 = energy_seminorm(spec, s.v0, 1);
    const double q1 = Q.lp_pow(v, 4.0);
    const double q0 = Q.lp_pow(v0, 4.0);

    MonitorResult r;
    r.lhs = d_sq + 0.5 * (y1 - y0) / dt + 0.25 * (q1 - q0) / dt;

    const double z_inf = z.abs().maxCoeff();
    const double v0_l4_4 = q0;
    const double z_l8_4 = std::sqrt(Q.lp_pow(z, 8.0));
    const double z_l6_6 = Q.lp_pow(z, 6.0);
    const double z_l4_4 = Q.lp_pow(z, 4.0);
    const double a1 = params.a + 1.0;
    r.rhs = 0.5 * d_sq + MonitorConstants::vt_v2z * z_inf * z_inf * v0_l4_4 +
            MonitorConstants::vt_vz2 * z_l8_4 * std::sqrt(v0_l4_4) + MonitorConstants::vt_z3 * z_l6_6 +
            MonitorConstants::vt_quadratic * a1 * a1 * (v0_l4_4 + z_l4_4) +
            MonitorConstants::vt_av * params.a * params.a * Q.l2sq(v) + MonitorConstants::vt_w * Q.l2sq(s.w1.array());
    if (s.forcing.size()) r.rhs += std::abs((s.forcing.array() * d).sum() * Q.vol);

    // The explicit cubic differs from the exact increment of |v|_4^4 / 4 by
    // int (v^{n+1}-v^n)^2 ((v^n + dv/2)^2 + (v^n)^2/2) <= 1.5 M^2 |v^{n+1}-v^n|^2.
    const double m = std::max(v0.abs().maxCoeff(), v.abs().maxCoeff());
    const double scale = d_sq + (std::abs(y1) + std::abs(y0) + q1 + q0) / dt + std::abs(r.rhs);
    r.tol = c_disc * dt * 1.5 * m * m * d_sq + MonitorConstants::roundoff * scale;
    return r;
}

MonitorResult energy_monitor_strong(const SpectralDecomposition& spec, const FHNParams& params,
                                    const MonitorStep& s) {
    check_step(s);
    const double dt = s.dt;
    const GridFunction d = (s.v1 - s.v0) / dt;
    GridFunction rterm = remainder_rhs(params, s.v0, s.z) - params.a * s.v1 - s.w1;
    if (s.forcing.size()) rterm += s.forcing;

    const double a1 = energy_seminorm(spec, s.v1, 2);
    const double a0 = energy_seminorm(spec, s.v0, 2);
    const double ad = energy_seminorm(spec, d, 1);
    MonitorResult r;
    r.lhs = (a1 - a0) / dt + ad;
    r.rhs = energy_seminorm(spec, rterm, 1);
    const double scale = (std::abs(a1) + std::abs(a0)) / dt + std::abs(ad) + std::abs(r.rhs);
    r.tol = MonitorConstants::roundoff * scale;
    return r;
}

bool LedgerSummary::all_finite() const {
    return std::isfinite(sup_energy) && std::isfinite(int_Asqrt_v_sq) && std::isfinite(int_v_L4_4) &&
           std::isfinite(int_dtv_sq) && std::isfinite(sup_Asqrt_w) && std::isfinite(sup_Av_after_delta);
}

EnergyLedger::EnergyLedger(std::shared_ptr<const SpectralDecomposition> spec, FHNParams params, double mu,
                           double delta, double c_disc)
    : spec_(std::move(spec)), params_(params), mu_(mu), delta_(delta), c_disc_(c_disc) {
    if (!spec_) throw std::invalid_argument("energy ledger needs a spectral decomposition");
}

void EnergyLedger::record(const StepInfo& info) {
    MonitorStep s;
    s.dt = info.dt;
    s.t_next = info.t + info.dt;
    s.v0 = info.before->v;
    s.w0 = info.before->w;
    s.v1 = info.after->v;
    s.w1 = info.after->w;
    s.z = *info.z;
    if (info.forcing) s.forcing = *info.forcing;

    const Quadrature Q{spec_->grid.cell_volume()};
    const Arr v = s.v1.array();
    const Arr z = s.z.array();
    LedgerRow row;
    row.t = s.t_next;
    row.dt = s.dt;
    row.norm_v_L2_sq = Q.l2sq(v);
    row.norm_w_L2_sq = Q.l2sq(s.w1.array());
    row.norm_Asqrt_v_sq = energy_seminorm(*spec_, s.v1, 1);
    row.norm_v_L4_4 = Q.lp_pow(v, 4.0);
    row.norm_vz_L2_sq = Q.l2sq(v * z);
    row.norm_v3z_L1 = Q.l1(v.cube() * z);
    row.norm_z3v_L1 = Q.l1(z.cube() * v);
    row.norm_wv_L1 = Q.l1(s.w1.array() * v);
    row.norm_Asqrt_w_sq = energy_seminorm(*spec_, s.w1, 1);
    row.norm_dtv_L2_sq = Q.l2sq((s.v1 - s.v0).array() / s.dt);
    row.norm_Av_L2_sq = energy_seminorm(*spec_, s.v1, 2);
    row.critical_integral = info.critical_integral;
    row.lemma_vw = energy_monitor_vw(*spec_, params_, s, c_disc_);
    row.lemma_w_h1 = energy_monitor_w_h1(*spec_, params_, s, mu_);
    row.lemma_vt = energy_monitor_vt(*spec_, params_, s, c_disc_);
    row.lemma_strong = energy_monitor_strong(*spec_, params_, s);
    rows_.push_back(row);
}

LedgerSummary EnergyLedger::summary() const {
    LedgerSummary out;
    out.steps = rows_.size();
    for (const auto& r : rows_) {
        out.violations_vw += r.lemma_vw.violated();
        out.violations_w_h1 += r.lemma_w_h1.violated();
        out.violations_vt += r.lemma_vt.violated();
        out.violations_strong += r.lemma_strong.violated();
        out.sup_energy = std::max(out.sup_energy, r.norm_v_L2_sq + r.norm_w_L2_sq);
        out.int_Asqrt_v_sq += r.dt * r.norm_Asqrt_v_sq;
        out.int_v_L4_4 += r.dt * r.norm_v_L4_4;
        out.int_dtv_sq += r.dt * r.norm_dtv_L2_sq;
        out.sup_Asqrt_w = std::max(out.sup_Asqrt_w, std::sqrt(r.norm_Asqrt_w_sq));
        if (r.t >= delta_) out.sup_Av_after_delta = std::max(out.sup_Av_after_delta, std::sqrt(r.norm_Av_L2_sq));
    }
    return out;
}

void EnergyLedger::write_csv(std::ostream& os) const {
    os << "t,dt,norm_v_L2_sq,norm_w_L2_sq,norm_Asqrt_v_sq,norm_v_L4_4,norm_vz_L2_sq,norm_v3z_L1,norm_z3v_L1,"
          "norm_wv_L1,norm_Asqrt_w_sq,norm_dtv_L2_sq,norm_Av_L2_sq,critical_integral,"
          "lhs_lemma_vw,rhs_lemma_vw,margin_lemma_vw,tol_lemma_vw,"
          "lhs_lemma_w_h1,rhs_lemma_w_h1,margin_lemma_w_h1,tol_lemma_w_h1,"
          "lhs_lemma_vt,rhs_lemma_vt,margin_lemma_vt,tol_lemma_vt,"
          "lhs_lemma_strong,rhs_lemma_strong,margin_lemma_strong,tol_lemma_strong\n";
    os << std::setprecision(17);
    auto mon = [&os](const MonitorResult& m) {
        os << ',' << m.lhs << ',' << m.rhs << ',' << m.margin() << ',' << m.tol;
    };
    for (const auto& r : rows_) {
        os << r.t << ',' << r.dt << ',' << r.norm_v_L2_sq << ',' << r.norm_w_L2_sq << ',' << r.norm_Asqrt_v_sq << ','
           << r.norm_v_L4_4 << ',' << r.norm_vz_L2_sq << ',' << r.norm_v3z_L1 << ',' << r.norm_z3v_L1 << ','
           << r.norm_wv_L1 << ',' << r.norm_Asqrt_w_sq << ',' << r.norm_dtv_L2_sq << ',' << r.norm_Av_L2_sq << ','
           << r.critical_integral;
        mon(r.lemma_vw);
        mon(r.lemma_w_h1);
        mon(r.lemma_vt);
        mon(r.lemma_strong);
        os << '\n';
    }
}

}  // namespace sbd
