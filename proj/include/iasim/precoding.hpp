#pragma once

#include <array>

#include <Eigen/Dense>

#include "iasim/channel.hpp"

namespace iasim {

// The alignment precoders for one realization.  V1 is the Vandermonde
// matrix [w Tw ... T^n w] with w = all-ones; row t of V1 is
// (1, T_t, ..., T_t^n).  V2 and V3 are per-row rescaled column
// selections of V1:
//   V2 = H32^-1 H31 V1 P2   (P2 keeps columns 1..n, dropping the first)
//   V3 = H23^-1 H21 V1 P3   (P3 keeps columns 0..n-1, dropping the last)
// P2/P3 are realized as column selections, never stored as matrices.
// Columns are deliberately not normalized: realized transmit power
// (inversion losses included) is what the SNR accounting measures.
struct PrecoderSet {
    Eigen::MatrixXcd v1; // (2n+1) x (n+1)
    Eigen::MatrixXcd v2; // (2n+1) x n
    Eigen::MatrixXcd v3; // (2n+1) x n
    Eigen::VectorXcd t_diag;
    std::array<Eigen::VectorXd, 3> column_energies; // squared column norms of V1,V2,V3
};

// Diagonal of T = (H31^-1 H32)(H12^-1 H13)(H23^-1 H21), elementwise
// T_t = (h32 h13 h21) / (h31 h12 h23).
Eigen::VectorXcd build_t(const ChannelRealization& ch);

// Builds the full precoder set.  Runs validate_channel(ch, gap_tol)
// first (propagating DegenerateChannel) and throws RankDeficient when
// the numerical rank of V1 falls below n+1 at a relative tolerance of
// 1e-8 times the largest singular value.
PrecoderSet build_precoders(const ChannelRealization& ch, double gap_tol);

// Relative Frobenius residuals of the three alignment identities
//   H12 V2 = H13 V3,  H23 V3 = H21 V1 P3,  H32 V2 = H31 V1 P2.
std::array<double, 3> check_alignment(const ChannelRealization& ch, const PrecoderSet& p);

} // namespace iasim
