#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "iasim/constellation.hpp"
#include "iasim/lattice.hpp"
#include "iasim/mimo.hpp"

namespace iasim {

// Projector onto the orthogonal complement of the interference span,
// built from an orthonormal basis of that span rather than the
// normal-equations formula.
struct ProjectorPack {
    Eigen::MatrixXcd p_perp;            // (2n+1) x (2n+1), Hermitian idempotent
    Eigen::MatrixXcd projected_desired; // p_perp * g_desired
    Eigen::MatrixXcd complement_basis;  // orthonormal, spans range(p_perp)
    double desired_scale = 0.0;         // largest unprojected desired column norm
};

// Throws IllConditionedInterference when the interference columns lose
// numerical rank at relative tolerance 1e-10.
ProjectorPack build_projector(const EquivalentChannel& eq);

// Linear zero-forcing: least squares of p_perp*y against the projected
// desired channel, then an independent nearest-point slice per symbol.
// Throws IllConditionedProjectedChannel when the projected channel
// loses column rank.
std::vector<int> decode_lzf_linear(const Eigen::VectorXcd& y, const ProjectorPack& pack,
                                   const Constellation& c);

struct GlrtDecision {
    std::vector<int> desired_indices;
    double metric = 0.0; // ||p_perp (y - g_desired x)||^2 at the decision
    std::uint64_t nodes_visited = 0;
    bool budget_exhausted = false;
};

// GLRT zero-forcing: exact argmin of the projected metric over the
// desired-alphabet product, run as a sphere search on the equivalent
// square system (complement_basis^H g_desired, complement_basis^H y),
// which preserves the metric.
GlrtDecision decode_lzf_glrt(const Eigen::VectorXcd& y, const EquivalentChannel& eq,
                             const ProjectorPack& pack, const Constellation& c,
                             std::uint64_t node_budget = 10000000);

enum class LdMode {
    constrained, // enumerate the finite alphabets C and C'
    unbounded    // search the infinite lattice translates, clip afterwards
};

struct LdDecision {
    std::vector<int> desired_indices;
    Eigen::VectorXcd interference_sum; // estimate of the aligned sums, diagnostic only
    double metric = 0.0;               // ||y - g_full (x ; s)||^2 at the decision
    std::uint64_t nodes_visited = 0;
    bool budget_exhausted = false;
    int clipped = 0; // unbounded-mode coordinates clamped back into the alphabet
};

// Lattice decoding: joint closest-point search over
// C^desired x C'^interference on the full equivalent channel; the
// desired components are the decision, the interference sum is kept as
// a diagnostic.
LdDecision decode_ld(const Eigen::VectorXcd& y, const EquivalentChannel& eq,
                     const Constellation& c, const SumConstellation& c_sum,
                     std::uint64_t node_budget = 10000000, LdMode mode = LdMode::constrained);

} // namespace iasim
