#include "iasim/precoding.hpp"

#include <string>

#include <Eigen/SVD>

#include "iasim/errors.hpp"

namespace iasim {

namespace {

double rel_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const double scale = std::max(a.norm(), b.norm());
    if (scale == 0.0) return 0.0;
    return (a - b).norm() / scale;
}

} // namespace

Eigen::VectorXcd build_t(const ChannelRealization& ch) {
    const Eigen::VectorXcd num =
        ch.link(3, 2).cwiseProduct(ch.link(1, 3)).cwiseProduct(ch.link(2, 1));
    const Eigen::VectorXcd den =
        ch.link(3, 1).cwiseProduct(ch.link(1, 2)).cwiseProduct(ch.link(2, 3));
    return num.cwiseQuotient(den);
}

PrecoderSet build_precoders(const ChannelRealization& ch, double gap_tol) {
    validate_channel(ch, gap_tol);

    const int len = ch.block_len();
    const int n = ch.n;

    PrecoderSet p;
    p.t_diag = build_t(ch);

    // Row t of V1 is (1, T_t, ..., T_t^n).
    p.v1.resize(len, n + 1);
    p.v1.col(0).setOnes();
    for (int k = 1; k <= n; ++k) {
        p.v1.col(k) = p.v1.col(k - 1).cwiseProduct(p.t_diag);
    }

    {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p.v1);
        const Eigen::VectorXd sv = svd.singularValues();
        if (sv[sv.size() - 1] < 1e-8 * sv[0]) {
            throw RankDeficient("V1 numerical rank below " + std::to_string(n + 1));
        }
    }

    // V1 P2 = columns 1..n of V1, V1 P3 = columns 0..n-1.
    const Eigen::VectorXcd scale2 = ch.link(3, 1).cwiseQuotient(ch.link(3, 2));
    const Eigen::VectorXcd scale3 = ch.link(2, 1).cwiseQuotient(ch.link(2, 3));
    p.v2 = scale2.asDiagonal() * p.v1.rightCols(n);
    p.v3 = scale3.asDiagonal() * p.v1.leftCols(n);

    p.column_energies[0] = p.v1.colwise().squaredNorm().transpose();
    p.column_energies[1] = p.v2.colwise().squaredNorm().transpose();
    p.column_energies[2] = p.v3.colwise().squaredNorm().transpose();
    return p;
}

std::array<double, 3> check_alignment(const ChannelRealization& ch, const PrecoderSet& p) {
    const int n = ch.n;
    const Eigen::MatrixXcd lhs1 = ch.link(1, 2).asDiagonal() * p.v2;
    const Eigen::MatrixXcd rhs1 = ch.link(1, 3).asDiagonal() * p.v3;
    const Eigen::MatrixXcd lhs2 = ch.link(2, 3).asDiagonal() * p.v3;
    const Eigen::MatrixXcd rhs2 = ch.link(2, 1).asDiagonal() * p.v1.leftCols(n);
    const Eigen::MatrixXcd lhs3 = ch.link(3, 2).asDiagonal() * p.v2;
    const Eigen::MatrixXcd rhs3 = ch.link(3, 1).asDiagonal() * p.v1.rightCols(n);
    return {rel_residual(lhs1, rhs1), rel_residual(lhs2, rhs2), rel_residual(lhs3, rhs3)};
}

} // namespace iasim
