#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace iasim {

// Per-dimension search domain: a finite ordered alphabet, or the
// infinite translate {offset + step*k, k in Z} of the same lattice
// when `unbounded` is set.  `finite` stays populated in unbounded mode
// so results can be clipped back to the alphabet.
struct DimensionDomain {
    std::vector<double> finite; // sorted ascending
    bool unbounded = false;
    double step = 2.0;
    double offset = 1.0;
};

// Real-valued integer least-squares instance.  The basis is the block
// embedding of a complex N x K matrix,
//   [[Re G, -Im G], [Im G, Re G]],
// observation (Re y ; Im y), solution (Re x ; Im x): real dimension d
// in [0,K) is the real part of complex dimension d and d in [K,2K) the
// imaginary part of dimension d-K.  The embedding is an isometry, so
// squared distances match the complex system's.
struct RealSystem {
    Eigen::MatrixXd basis;        // 2N x 2K
    Eigen::VectorXd observation;  // 2N
    std::vector<DimensionDomain> domains; // 2K entries
    int complex_rows = 0;  // N
    int complex_cols = 0;  // K
    int desired_count = 0; // leading complex dims drawn from the desired alphabet
};

struct SearchResult {
    Eigen::VectorXd solution;
    double sq_distance = 0.0;     // ||observation - basis * solution||^2, recomputed
    std::uint64_t nodes_visited = 0;
    bool budget_exhausted = false; // result is best-found-so-far, not proven optimal
};

// Lifts a complex system to its real embedding.  axes[j] is the
// per-axis alphabet of complex dimension j, applied to both its real
// and imaginary parts (square constellations have identical real and
// imaginary axes).  With unbounded_mode the domains become the axis'
// infinite lattice translate; axes with fewer than two members stay
// finite.
RealSystem embed(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y,
                 const std::vector<std::vector<double>>& axes, int desired_count,
                 bool unbounded_mode = false);

// Two-alphabet convenience: the first desired_count complex dimensions
// use desired_axis, the rest interf_axis.
RealSystem embed(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y,
                 const std::vector<double>& desired_axis,
                 const std::vector<double>& interf_axis, int desired_count,
                 bool unbounded_mode = false);

// Inverse of the embedding's solution layout.
Eigen::VectorXcd reconstruct_complex(const RealSystem& sys, const Eigen::VectorXd& solution);

// Schnorr-Euchner sphere decoder: QR-triangularizes the basis, then
// depth-first zig-zag enumeration (nearest candidate first per
// dimension) with radius shrinking on every improvement.  The first
// leaf reached is the Babai successive-nearest point, so the effective
// initial radius is the Babai distance.  Exact over the domain product
// unless the node budget is hit, in which case the best point found so
// far is returned with budget_exhausted set.  Throws RankDeficientBasis
// when a triangular diagonal entry falls below 1e-10 of the largest.
SearchResult sphere_decode(const RealSystem& sys, std::uint64_t node_budget = 10000000);

// Exhaustive minimum over the (finite) domain product, lexicographic
// tie-break.  Throws SearchSpaceTooLarge beyond candidate_cap or for
// unbounded domains.
SearchResult brute_force_ml(const RealSystem& sys, std::uint64_t candidate_cap = 1000000);

} // namespace iasim
