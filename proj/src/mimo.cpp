#include "iasim/mimo.hpp"

#include <string>

#include <Eigen/SVD>

#include "iasim/errors.hpp"
#include "iasim/rng.hpp"

namespace iasim {

namespace {

// Stream ids within a trial seed.
constexpr std::uint64_t kSymbolStream = 100;
constexpr std::uint64_t kNoiseStream = 200;

} // namespace

EquivalentChannel build_equivalent(const ChannelRealization& ch, const PrecoderSet& p, int k) {
    const int len = ch.block_len();
    const int n = ch.n;

    EquivalentChannel eq;
    eq.receiver_index = k;
    eq.g_full.resize(len, len);
    switch (k) {
        case 1:
            eq.desired_cols = n + 1;
            eq.g_full.leftCols(n + 1) = ch.link(1, 1).asDiagonal() * p.v1;
            eq.g_full.rightCols(n) = ch.link(1, 2).asDiagonal() * p.v2;
            break;
        case 2:
            eq.desired_cols = n;
            eq.g_full.leftCols(n) = ch.link(2, 2).asDiagonal() * p.v2;
            eq.g_full.rightCols(n + 1) = ch.link(2, 1).asDiagonal() * p.v1;
            break;
        case 3:
            eq.desired_cols = n;
            eq.g_full.leftCols(n) = ch.link(3, 3).asDiagonal() * p.v3;
            eq.g_full.rightCols(n + 1) = ch.link(3, 1).asDiagonal() * p.v1;
            break;
        default:
            throw SimError("receiver index must be 1..3");
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eq.g_full);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    const double smax = sv[0];
    if (smin < 1e-8 * smax) {
        throw SingularEquivalentChannel("G_" + std::to_string(k) +
                                        " numerically rank deficient");
    }
    eq.cond_estimate = smax / smin;
    return eq;
}

TransmitBlock draw_block(const Constellation& c, int n, std::uint64_t seed) {
    Rng rng(seed, kSymbolStream);
    TransmitBlock blk;
    auto draw = [&](Eigen::VectorXcd& x, std::vector<int>& idx, int count) {
        x.resize(count);
        idx.resize(count);
        for (int i = 0; i < count; ++i) {
            // Rejection keeps the symbol law exactly uniform.
            std::uint32_t r;
            const std::uint32_t m = static_cast<std::uint32_t>(c.size());
            const std::uint32_t limit = 0xFFFFFFFFu - (0xFFFFFFFFu % m);
            do {
                r = rng.next_u32();
            } while (r >= limit);
            idx[i] = static_cast<int>(r % m);
            x[i] = c.point(idx[i]);
        }
    };
    draw(blk.x1, blk.symbol_indices[0], n + 1);
    draw(blk.x2, blk.symbol_indices[1], n);
    draw(blk.x3, blk.symbol_indices[2], n);
    return blk;
}

Eigen::VectorXcd stacked_symbol_vector(const TransmitBlock& blk, int k, int n) {
    Eigen::VectorXcd out(2 * n + 1);
    switch (k) {
        case 1:
            out.head(n + 1) = blk.x1;
            out.tail(n) = blk.x2 + blk.x3;
            break;
        case 2: {
            out.head(n) = blk.x2;
            Eigen::VectorXcd interf = blk.x1;
            interf.head(n) += blk.x3; // P3 X3 = (X3 ; 0)
            out.tail(n + 1) = interf;
            break;
        }
        case 3: {
            out.head(n) = blk.x3;
            Eigen::VectorXcd interf = blk.x1;
            interf.tail(n) += blk.x2; // P2 X2 = (0 ; X2)
            out.tail(n + 1) = interf;
            break;
        }
        default:
            throw SimError("receiver index must be 1..3");
    }
    return out;
}

std::array<Eigen::VectorXcd, 3> transmit(const ChannelRealization& ch, const PrecoderSet& p,
                                         const TransmitBlock& blk, double noise_std,
                                         std::uint64_t seed) {
    const int len = ch.block_len();
    const Eigen::VectorXcd s1 = p.v1 * blk.x1;
    const Eigen::VectorXcd s2 = p.v2 * blk.x2;
    const Eigen::VectorXcd s3 = p.v3 * blk.x3;

    Rng rng(seed, kNoiseStream);
    std::array<Eigen::VectorXcd, 3> y;
    for (int i = 1; i <= 3; ++i) {
        Eigen::VectorXcd v = ch.link(i, 1).cwiseProduct(s1) + ch.link(i, 2).cwiseProduct(s2) +
                             ch.link(i, 3).cwiseProduct(s3);
        if (noise_std > 0.0) {
            for (int t = 0; t < len; ++t) {
                v[t] += rng.complex_normal(noise_std * noise_std);
            }
        }
        y[i - 1] = std::move(v);
    }
    return y;
}

std::array<double, 3> realized_power(const PrecoderSet& p, const TransmitBlock& blk) {
    const double len = static_cast<double>(p.v1.rows());
    return {(p.v1 * blk.x1).squaredNorm() / len, (p.v2 * blk.x2).squaredNorm() / len,
            (p.v3 * blk.x3).squaredNorm() / len};
}

} // namespace iasim
