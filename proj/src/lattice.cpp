#include "iasim/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "iasim/errors.hpp"

namespace iasim {

namespace {

DimensionDomain make_domain(const std::vector<double>& axis, bool unbounded_mode) {
    DimensionDomain d;
    d.finite = axis;
    if (unbounded_mode && axis.size() >= 2) {
        d.unbounded = true;
        d.step = axis[1] - axis[0];
        d.offset = axis[0];
    }
    return d;
}

} // namespace

RealSystem embed(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y,
                 const std::vector<std::vector<double>>& axes, int desired_count,
                 bool unbounded_mode) {
    const int rows = static_cast<int>(g.rows());
    const int cols = static_cast<int>(g.cols());

    RealSystem sys;
    sys.complex_rows = rows;
    sys.complex_cols = cols;
    sys.desired_count = desired_count;

    sys.basis.resize(2 * rows, 2 * cols);
    sys.basis.topLeftCorner(rows, cols) = g.real();
    sys.basis.topRightCorner(rows, cols) = -g.imag();
    sys.basis.bottomLeftCorner(rows, cols) = g.imag();
    sys.basis.bottomRightCorner(rows, cols) = g.real();

    sys.observation.resize(2 * rows);
    sys.observation.head(rows) = y.real();
    sys.observation.tail(rows) = y.imag();

    sys.domains.reserve(2 * static_cast<std::size_t>(cols));
    for (int half = 0; half < 2; ++half) {
        for (int j = 0; j < cols; ++j) {
            sys.domains.push_back(make_domain(axes[static_cast<std::size_t>(j)], unbounded_mode));
        }
    }
    return sys;
}

RealSystem embed(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y,
                 const std::vector<double>& desired_axis,
                 const std::vector<double>& interf_axis, int desired_count,
                 bool unbounded_mode) {
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(g.cols()));
    for (int j = 0; j < g.cols(); ++j) {
        axes[static_cast<std::size_t>(j)] = j < desired_count ? desired_axis : interf_axis;
    }
    return embed(g, y, axes, desired_count, unbounded_mode);
}

Eigen::VectorXcd reconstruct_complex(const RealSystem& sys, const Eigen::VectorXd& solution) {
    const int cols = sys.complex_cols;
    Eigen::VectorXcd x(cols);
    for (int j = 0; j < cols; ++j) {
        x[j] = {solution[j], solution[cols + j]};
    }
    return x;
}

namespace {

// Sorted-QR column order: repeatedly take the remaining column with the
// smallest norm orthogonal to the columns already placed.  The large
// orthogonal residuals end up last, i.e. at the top of the enumeration
// tree, where narrow fanout matters most.  A pure permutation, so the
// search stays exact.
std::vector<int> sorted_qr_order(const Eigen::MatrixXd& basis) {
    const int k = static_cast<int>(basis.cols());
    Eigen::MatrixXd work = basis;
    std::vector<int> order(static_cast<std::size_t>(k));
    std::vector<char> used(static_cast<std::size_t>(k), 0);
    for (int step = 0; step < k; ++step) {
        int pick = -1;
        double best = 0.0;
        for (int j = 0; j < k; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double nrm = work.col(j).squaredNorm();
            if (pick < 0 || nrm < best) {
                pick = j;
                best = nrm;
            }
        }
        order[static_cast<std::size_t>(step)] = pick;
        used[static_cast<std::size_t>(pick)] = 1;
        const double nrm = work.col(pick).norm();
        if (nrm > 0.0) {
            const Eigen::VectorXd q = work.col(pick) / nrm;
            for (int j = 0; j < k; ++j) {
                if (!used[static_cast<std::size_t>(j)]) work.col(j) -= q * q.dot(work.col(j));
            }
        }
    }
    return order;
}

} // namespace

SearchResult sphere_decode(const RealSystem& sys, std::uint64_t node_budget) {
    const int m = static_cast<int>(sys.basis.rows());
    const int k = static_cast<int>(sys.basis.cols());

    const std::vector<int> order = sorted_qr_order(sys.basis);
    Eigen::MatrixXd permuted(m, k);
    for (int j = 0; j < k; ++j) permuted.col(j) = sys.basis.col(order[static_cast<std::size_t>(j)]);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(permuted);
    Eigen::MatrixXd r_upper =
        qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd thin_q =
        qr.householderQ() * Eigen::MatrixXd::Identity(m, k);
    Eigen::VectorXd yq = thin_q.transpose() * sys.observation;

    double max_diag = 0.0;
    for (int i = 0; i < k; ++i) {
        if (r_upper(i, i) < 0.0) {
            r_upper.row(i) = -r_upper.row(i);
            yq[i] = -yq[i];
        }
        max_diag = std::max(max_diag, r_upper(i, i));
    }
    for (int i = 0; i < k; ++i) {
        if (r_upper(i, i) < 1e-10 * max_diag) {
            throw RankDeficientBasis("triangular factor diagonal " + std::to_string(i) +
                                     " below tolerance");
        }
    }

    // Row-major copy of R for the backtracking inner loops.
    std::vector<double> r(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            r[static_cast<std::size_t>(i) * k + j] = r_upper(i, j);
        }
    }

    // Per-dimension enumeration state.  Finite domains zig-zag outward
    // from the insertion point with two pointers; unbounded domains use
    // the value/delta recurrence around the rounded lattice point.
    std::vector<double> chosen(k, 0.0);  // s[i]
    std::vector<double> interf(k, 0.0);  // sum_{j>i} R(i,j) s[j]
    std::vector<double> dist(k, 0.0);    // squared residual above dim i
    std::vector<double> center(k, 0.0);
    std::vector<int> left(k, 0), right(k, 0);
    std::vector<double> cur(k, 0.0), delta(k, 0.0);
    std::vector<char> fresh(k, 0);

    auto init_dim = [&](int i) {
        const double c = (yq[i] - interf[i]) / r[static_cast<std::size_t>(i) * k + i];
        center[i] = c;
        const DimensionDomain& dom = sys.domains[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        if (dom.unbounded) {
            const double z = dom.offset + dom.step * std::round((c - dom.offset) / dom.step);
            cur[i] = z;
            const double toward = c - z;
            delta[i] = (toward >= 0.0) ? dom.step : -dom.step;
            fresh[i] = 1;
        } else {
            const auto& a = dom.finite;
            const int pos = static_cast<int>(
                std::lower_bound(a.begin(), a.end(), c) - a.begin());
            left[i] = pos - 1;
            right[i] = pos;
        }
    };

    // Next candidate at dim i in non-decreasing distance from center;
    // returns false when the (finite) domain is exhausted.
    auto next_candidate = [&](int i, double& out) -> bool {
        const DimensionDomain& dom = sys.domains[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        if (dom.unbounded) {
            if (fresh[i]) {
                fresh[i] = 0;
                out = cur[i];
                return true;
            }
            cur[i] += delta[i];
            delta[i] = -delta[i] - (delta[i] > 0.0 ? dom.step : -dom.step);
            out = cur[i];
            return true;
        }
        const auto& a = dom.finite;
        const int size = static_cast<int>(a.size());
        if (left[i] < 0 && right[i] >= size) return false;
        if (left[i] < 0) {
            out = a[right[i]++];
        } else if (right[i] >= size) {
            out = a[left[i]--];
        } else if (center[i] - a[left[i]] <= a[right[i]] - center[i]) {
            out = a[left[i]--];
        } else {
            out = a[right[i]++];
        }
        return true;
    };

    SearchResult res;
    res.solution.resize(k);
    double radius = std::numeric_limits<double>::infinity();
    bool have_best = false;
    std::uint64_t nodes = 0;

    int i = k - 1;
    dist[i] = 0.0;
    interf[i] = 0.0;
    init_dim(i);

    for (;;) {
        if (nodes >= node_budget && have_best) {
            res.budget_exhausted = true;
            break;
        }
        double cand;
        if (!next_candidate(i, cand)) {
            if (i == k - 1) break;
            ++i;
            continue;
        }
        ++nodes;
        const double err = yq[i] - interf[i] - r[static_cast<std::size_t>(i) * k + i] * cand;
        const double d = dist[i] + err * err;
        if (d >= radius) {
            // Candidates at this dim come in non-decreasing |err|, so
            // the whole sibling set is outside the sphere.
            if (i == k - 1) break;
            ++i;
            continue;
        }
        chosen[i] = cand;
        if (i == 0) {
            radius = d;
            for (int j = 0; j < k; ++j) {
                res.solution[order[static_cast<std::size_t>(j)]] = chosen[j];
            }
            have_best = true;
            continue;
        }
        dist[i - 1] = d;
        double acc = 0.0;
        const double* row = &r[static_cast<std::size_t>(i - 1) * k];
        for (int j = i; j < k; ++j) acc += row[j] * chosen[j];
        interf[i - 1] = acc;
        --i;
        init_dim(i);
    }

    res.nodes_visited = nodes;
    res.sq_distance = (sys.observation - sys.basis * res.solution).squaredNorm();
    return res;
}

SearchResult brute_force_ml(const RealSystem& sys, std::uint64_t candidate_cap) {
    const int k = static_cast<int>(sys.basis.cols());

    double product = 1.0;
    for (const DimensionDomain& dom : sys.domains) {
        if (dom.unbounded) {
            throw SearchSpaceTooLarge("exhaustive search over an unbounded domain");
        }
        product *= static_cast<double>(dom.finite.size());
        if (product > static_cast<double>(candidate_cap)) {
            throw SearchSpaceTooLarge("domain product exceeds cap of " +
                                      std::to_string(candidate_cap));
        }
    }

    std::vector<int> idx(k, 0);
    Eigen::VectorXd cand(k);
    for (int j = 0; j < k; ++j) cand[j] = sys.domains[j].finite[0];

    SearchResult res;
    res.solution = cand;
    res.sq_distance = std::numeric_limits<double>::infinity();

    for (;;) {
        ++res.nodes_visited;
        const double d = (sys.observation - sys.basis * cand).squaredNorm();
        if (d < res.sq_distance) {
            res.sq_distance = d;
            res.solution = cand;
        }
        // Odometer with the last dimension fastest: candidates appear
        // in lexicographic order, so strict improvement keeps the
        // lexicographically first minimizer.
        int j = k - 1;
        for (; j >= 0; --j) {
            if (++idx[j] < static_cast<int>(sys.domains[j].finite.size())) {
                cand[j] = sys.domains[j].finite[idx[j]];
                break;
            }
            idx[j] = 0;
            cand[j] = sys.domains[j].finite[0];
        }
        if (j < 0) break;
    }
    return res;
}

} // namespace iasim
