#pragma once

#include "sbd/stepper.hpp"

#include <memory>
#include <ostream>
#include <vector>

namespace sbd {

/// One IMEX step as seen by the monitors: v0 = v^n, (v1, w1) = V^{n+1},
/// z = z^n (the value the step used), forcing optional.
struct MonitorStep {
    double dt = 0.0;
    double t_next = 0.0;
    GridFunction v0;
    GridFunction v1;
    GridFunction w0;
    GridFunction w1;
    GridFunction z;
    GridFunction forcing;  // empty when absent
};

struct MonitorResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;                  // tol_dt plus a round-off floor
    double margin() const { return rhs - lhs; }
    bool violated() const { return margin() < -tol; }
};

// Constants of the monitored inequalities. Each right-hand side bounds the
// signed terms of the tested identity by absolute values (Hoelder) and, in
// the v_t and strong monitors, by Young's inequality.
//
//  vw:     coefficient 3 on |v^3 z|, (a+1) <= 2 on the quadratic terms.
//  w_h1:   2c <A^{1/2}v, A^{1/2}w> <= c^2 t^{1-mu} |A^{1/2}v|^2 + t^{mu-1} |A^{1/2}w|^2.
//          The remainder w equation carries no z forcing, so the z term is 0.
//  vt:     8 terms in Young, each weighted 1/2 * 8 = 4:
//          36 |z|_inf^2 |v|_4^4, 36 |z|_8^4 |v|_4^2, 4 |z|_6^6,
//          4(a+1)^2 (|v|_4^4 + |z|_4^4) + 16(a+1)^2 |vz|^2 <= 12(a+1)^2 (|v|_4^4 + |z|_4^4),
//          4 a^2 |v|^2, 4 |w|^2.
//  strong: Cauchy-Schwarz and Young with weight 1/2 on both sides.
struct MonitorConstants {
    static constexpr double vw_v3z = 3.0;
    static constexpr double vw_quadratic = 2.0;
    static constexpr double w_h1_z = 0.0;
    static constexpr double vt_v2z = 36.0;
    static constexpr double vt_vz2 = 36.0;
    static constexpr double vt_z3 = 4.0;
    static constexpr double vt_quadratic = 12.0;
    static constexpr double vt_av = 4.0;
    static constexpr double vt_w = 4.0;
    static constexpr double roundoff = 1e-11;
};

MonitorResult energy_monitor_vw(const SpectralDecomposition& spec, const FHNParams& params, const MonitorStep& step,
                                double c_disc = 1.0);
MonitorResult energy_monitor_w_h1(const SpectralDecomposition& spec, const FHNParams& params, const MonitorStep& step,
                                  double mu);
MonitorResult energy_monitor_vt(const SpectralDecomposition& spec, const FHNParams& params, const MonitorStep& step,
                                double c_disc = 1.0);
MonitorResult energy_monitor_strong(const SpectralDecomposition& spec, const FHNParams& params,
                                    const MonitorStep& step);

struct LedgerRow {
    double t = 0.0;
    double dt = 0.0;
    double norm_v_L2_sq = 0.0;
    double norm_w_L2_sq = 0.0;
    double norm_Asqrt_v_sq = 0.0;
    double norm_v_L4_4 = 0.0;
    double norm_vz_L2_sq = 0.0;
    double norm_v3z_L1 = 0.0;
    double norm_z3v_L1 = 0.0;
    double norm_wv_L1 = 0.0;
    double norm_Asqrt_w_sq = 0.0;
    double norm_dtv_L2_sq = 0.0;
    double norm_Av_L2_sq = 0.0;
    double critical_integral = 0.0;
    MonitorResult lemma_vw;
    MonitorResult lemma_w_h1;
    MonitorResult lemma_vt;
    MonitorResult lemma_strong;
};

struct LedgerSummary {
    std::size_t steps = 0;
    std::size_t violations_vw = 0;
    std::size_t violations_w_h1 = 0;
    std::size_t violations_vt = 0;
    std::size_t violations_strong = 0;
    double sup_energy = 0.0;          // sup (|v|^2 + |w|^2)
    double int_Asqrt_v_sq = 0.0;      // int |A^{1/2} v|^2
    double int_v_L4_4 = 0.0;          // int |v|_4^4
    double int_dtv_sq = 0.0;          // int |d_t v|^2
    double sup_Asqrt_w = 0.0;
    double sup_Av_after_delta = 0.0;  // sup_{t >= delta} |A v|
    std::size_t total_violations() const {
        return violations_vw + violations_w_h1 + violations_vt + violations_strong;
    }
    bool all_finite() const;
};

/// Records every step of a run and evaluates the four monitors.
class EnergyLedger {
public:
    EnergyLedger(std::shared_ptr<const SpectralDecomposition> spec, FHNParams params, double mu, double delta = 0.0,
                 double c_disc = 1.0);

    void record(const StepInfo& info);
    const std::vector<LedgerRow>& rows() const { return rows_; }
    LedgerSummary summary() const;
    void write_csv(std::ostream& os) const;

private:
    std::shared_ptr<const SpectralDecomposition> spec_;
    FHNParams params_;
    double mu_;
    double delta_;
    double c_disc_;
    std::vector<LedgerRow> rows_;
};

}  // namespace sbd
