#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "iasim/channel.hpp"
#include "iasim/constellation.hpp"
#include "iasim/precoding.hpp"

namespace iasim {

// Per-receiver equivalent (2n+1)x(2n+1) channel: desired columns first,
// interference columns after.
//   receiver 1: [H11 V1 | H12 V2], n+1 desired columns
//   receiver 2: [H22 V2 | H21 V1], n   desired columns
//   receiver 3: [H33 V3 | H31 V1], n   desired columns
struct EquivalentChannel {
    Eigen::MatrixXcd g_full;
    int desired_cols = 0;
    int receiver_index = 0; // 1..3
    double cond_estimate = 1.0;

    auto g_desired() const { return g_full.leftCols(desired_cols); }
    auto g_interf() const { return g_full.rightCols(g_full.cols() - desired_cols); }
};

// One block of transmitted symbols; entries are constellation points
// and symbol_indices track their positions in the alphabet.
struct TransmitBlock {
    Eigen::VectorXcd x1; // length n+1
    Eigen::VectorXcd x2; // length n
    Eigen::VectorXcd x3; // length n
    std::array<std::vector<int>, 3> symbol_indices;
};

// Builds the equivalent channel for receiver k and fills its condition
// estimate (ratio of extreme singular values).  Throws
// SingularEquivalentChannel when the numerical rank drops below 2n+1 at
// relative tolerance 1e-8; the harness counts the event and resamples.
EquivalentChannel build_equivalent(const ChannelRealization& ch, const PrecoderSet& p, int k);

// Uniform i.i.d. symbols for all three users, deterministic in seed.
TransmitBlock draw_block(const Constellation& c, int n, std::uint64_t seed);

// The stacked vector X~_k of the aligned-channel form: desired symbols
// first, then the (shift-embedded) interference sum.
//   k=1: (X1 ; X2+X3)
//   k=2: (X2 ; X1 + [X3 ; 0])   -- X3 occupies the first n slots
//   k=3: (X3 ; X1 + [0 ; X2])   -- X2 occupies the last n slots
Eigen::VectorXcd stacked_symbol_vector(const TransmitBlock& blk, int k, int n);

// One noisy block transmission, computed from the raw three-term sums
// (not the aligned form).  Noise is circularly-symmetric complex
// Gaussian with per-entry variance noise_std^2.
std::array<Eigen::VectorXcd, 3> transmit(const ChannelRealization& ch, const PrecoderSet& p,
                                         const TransmitBlock& blk, double noise_std,
                                         std::uint64_t seed);

// Per-user per-subcarrier average realized transmit power
// ||V_i X_i||^2 / (2n+1), channel-inversion losses included.
std::array<double, 3> realized_power(const PrecoderSet& p, const TransmitBlock& blk);

} // namespace iasim
