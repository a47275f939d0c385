#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

namespace iasim {

enum class ChannelModel { UnitModulus, TruncatedGaussian };

// One block realization: the diagonal entries of the nine per-link
// channel matrices H_ij over N = 2n+1 subcarriers.  All entries are
// nonzero by construction (the precoder applies per-link inversions).
struct ChannelRealization {
    int n = 0;
    ChannelModel model = ChannelModel::UnitModulus;
    double lo = 1.0; // truncation bounds; (1,1) for the unit-modulus model
    double hi = 1.0;
    // links[(i-1)*3 + (j-1)] holds the diagonal of H_ij.
    std::array<Eigen::VectorXcd, 9> links;

    int block_len() const { return 2 * n + 1; }

    const Eigen::VectorXcd& link(int i, int j) const { return links[(i - 1) * 3 + (j - 1)]; }
    Eigen::VectorXcd& link(int i, int j) { return links[(i - 1) * 3 + (j - 1)]; }

    // H_ij as a diagonal operator.
    Eigen::MatrixXcd link_matrix(int i, int j) const {
        return link(i, j).asDiagonal();
    }
};

struct ChannelDiagnostics {
    double min_t_gap = 0.0;                          // min pairwise |T_s - T_t|
    std::pair<double, double> t_magnitude_range{0.0, 0.0};
    // 2-norm condition estimates of G_1, G_2, G_3; filled once the
    // equivalent channels exist (>= 1 when populated).
    std::array<double, 3> condition_estimates{1.0, 1.0, 1.0};
};

// All 9N entries with unit magnitude and independent phases uniform on
// [0, 2pi).  Deterministic in (n, seed).
ChannelRealization sample_unit_modulus(int n, std::uint64_t seed);

// Entries drawn CN(0,1) (unit total variance), redrawn until the
// magnitude lands in [lo, hi].  The magnitude is Rayleigh with
// CDF 1 - exp(-r^2), so the per-draw acceptance mass is
// exp(-lo^2) - exp(-hi^2); if that implies more than `redraw_cap`
// expected redraws the call refuses up front (RejectionBudgetExceeded).
ChannelRealization sample_truncated_gaussian(int n, double lo, double hi, std::uint64_t seed,
                                             std::uint64_t redraw_cap = 1000000);

// Computes T from the realization (delegated to the precoding module)
// and checks the pairwise gaps of its diagonal.  Throws
// DegenerateChannel when min_t_gap < gap_tol; the harness resamples and
// counts the event.
ChannelDiagnostics validate_channel(const ChannelRealization& ch, double gap_tol);

} // namespace iasim
