#include "iasim/receivers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "iasim/errors.hpp"

namespace iasim {

namespace {

// Position of the axis value nearest to v, ties to the lower index.
int nearest_axis_pos(const std::vector<double>& axis, double v) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.begin()) return 0;
    if (it == axis.end()) return static_cast<int>(axis.size()) - 1;
    const int hi = static_cast<int>(it - axis.begin());
    const int lo = hi - 1;
    return (v - axis[lo] <= axis[hi] - v) ? lo : hi;
}

std::vector<int> indices_from_complex(const Eigen::VectorXcd& x, const Constellation& c) {
    std::vector<int> out(static_cast<std::size_t>(x.size()));
    for (int i = 0; i < x.size(); ++i) {
        const int re_pos = nearest_axis_pos(c.axis(), x[i].real());
        const int im_pos = nearest_axis_pos(c.axis(), x[i].imag());
        out[static_cast<std::size_t>(i)] = c.index_of(re_pos, im_pos);
    }
    return out;
}

} // namespace

ProjectorPack build_projector(const EquivalentChannel& eq) {
    const Eigen::MatrixXcd g12 = eq.g_interf();
    const int rows = static_cast<int>(g12.rows());
    const int icols = static_cast<int>(g12.cols());

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(g12);
    const Eigen::MatrixXcd& qrm = qr.matrixQR();
    double max_diag = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    for (int i = 0; i < icols; ++i) {
        const double d = std::abs(qrm(i, i));
        max_diag = std::max(max_diag, d);
        min_diag = std::min(min_diag, d);
    }
    if (!(min_diag > 1e-10 * max_diag)) {
        throw IllConditionedInterference("interference span rank collapse, diagonal ratio " +
                                         std::to_string(min_diag / max_diag));
    }

    const Eigen::MatrixXcd q_full =
        qr.householderQ() * Eigen::MatrixXcd::Identity(rows, rows);
    const Eigen::MatrixXcd q1 = q_full.leftCols(icols);

    ProjectorPack pack;
    pack.complement_basis = q_full.rightCols(rows - icols);
    pack.p_perp = Eigen::MatrixXcd::Identity(rows, rows) - q1 * q1.adjoint();
    pack.projected_desired = pack.p_perp * eq.g_desired();
    pack.desired_scale = eq.g_desired().colwise().norm().maxCoeff();
    return pack;
}

std::vector<int> decode_lzf_linear(const Eigen::VectorXcd& y, const ProjectorPack& pack,
                                   const Constellation& c) {
    const int dcols = static_cast<int>(pack.projected_desired.cols());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pack.projected_desired);
    const Eigen::MatrixXcd& qrm = qr.matrixQR();
    double max_diag = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dcols; ++i) {
        const double d = std::abs(qrm(i, i));
        max_diag = std::max(max_diag, d);
        min_diag = std::min(min_diag, d);
    }
    // max_diag alone is blind to a channel whose every projected column is
    // tiny; the unprojected column scale keeps the threshold absolute.
    if (!(min_diag > 1e-10 * std::max(max_diag, pack.desired_scale))) {
        throw IllConditionedProjectedChannel("projected desired channel rank collapse");
    }

    const Eigen::VectorXcd estimate = qr.solve(pack.p_perp * y);
    std::vector<int> out(static_cast<std::size_t>(dcols));
    for (int i = 0; i < dcols; ++i) {
        out[static_cast<std::size_t>(i)] = slice_nearest(estimate[i], c);
    }
    return out;
}

GlrtDecision decode_lzf_glrt(const Eigen::VectorXcd& y, const EquivalentChannel& eq,
                             const ProjectorPack& pack, const Constellation& c,
                             std::uint64_t node_budget) {
    // ||p_perp v|| = ||U^H v|| for the orthonormal complement basis U,
    // so the search can run on the small square system.
    const Eigen::MatrixXcd a = pack.complement_basis.adjoint() * eq.g_desired();
    const Eigen::VectorXcd b = pack.complement_basis.adjoint() * y;

    const RealSystem sys = embed(a, b, c.axis(), c.axis(), static_cast<int>(a.cols()));
    const SearchResult res = sphere_decode(sys, node_budget);

    GlrtDecision dec;
    dec.desired_indices = indices_from_complex(reconstruct_complex(sys, res.solution), c);
    dec.metric = res.sq_distance;
    dec.nodes_visited = res.nodes_visited;
    dec.budget_exhausted = res.budget_exhausted;
    return dec;
}

LdDecision decode_ld(const Eigen::VectorXcd& y, const EquivalentChannel& eq,
                     const Constellation& c, const SumConstellation& c_sum,
                     std::uint64_t node_budget, LdMode mode) {
    const bool unbounded = (mode == LdMode::unbounded);
    const int cols = static_cast<int>(eq.g_full.cols());

    // Interference coordinates carry pairwise sums (alphabet C'),
    // except the shift-embedding leaves one bare desired symbol at
    // receivers 2 and 3: the last aligned slot at receiver 2
    // (x1 + (x3;0)) and the first at receiver 3 (x1 + (0;x2)).
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
        axes[static_cast<std::size_t>(j)] = j < eq.desired_cols ? c.axis() : c_sum.axis();
    }
    if (eq.receiver_index == 2) axes[static_cast<std::size_t>(cols - 1)] = c.axis();
    if (eq.receiver_index == 3) axes[static_cast<std::size_t>(eq.desired_cols)] = c.axis();

    const RealSystem sys = embed(eq.g_full, y, axes, eq.desired_cols, unbounded);
    const SearchResult res = sphere_decode(sys, node_budget);
    const Eigen::VectorXcd x = reconstruct_complex(sys, res.solution);

    LdDecision dec;
    dec.metric = res.sq_distance;
    dec.nodes_visited = res.nodes_visited;
    dec.budget_exhausted = res.budget_exhausted;

    dec.desired_indices.resize(static_cast<std::size_t>(eq.desired_cols));
    for (int i = 0; i < eq.desired_cols; ++i) {
        if (unbounded) {
            if (x[i].real() < c.axis().front() || x[i].real() > c.axis().back()) ++dec.clipped;
            if (x[i].imag() < c.axis().front() || x[i].imag() > c.axis().back()) ++dec.clipped;
        }
        const int re_pos = nearest_axis_pos(c.axis(), x[i].real());
        const int im_pos = nearest_axis_pos(c.axis(), x[i].imag());
        dec.desired_indices[static_cast<std::size_t>(i)] = c.index_of(re_pos, im_pos);
    }
    dec.interference_sum = x.tail(x.size() - eq.desired_cols);
    return dec;
}

} // namespace iasim
