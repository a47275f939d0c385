#pragma once

#include <complex>
#include <vector>

namespace iasim {

using cplx = std::complex<double>;

// Square QAM alphabet on the odd Gaussian integers, centered at the
// origin: order 4 is {-1-j, -1+j, 1-j, 1+j}.  Points are kept
// unnormalized so lattice arithmetic stays exact; energy normalization
// is the harness's job.  Point ordering is row-major by real part, then
// imaginary part, and is part of the contract (slicing ties break to
// the lowest index).
class Constellation {
public:
    const std::vector<cplx>& points() const { return points_; }
    const cplx& point(int idx) const { return points_[idx]; }
    int size() const { return static_cast<int>(points_.size()); }
    int bits_per_symbol() const { return bits_per_symbol_; }
    double mean_energy() const { return mean_energy_; }

    // Sorted distinct real parts; identical to the imaginary-part axis
    // for a centered square grid.  Per-dimension alphabet for the real
    // lattice search.
    const std::vector<double>& axis() const { return axis_; }

    // Index of point (axis[re_pos], axis[im_pos]) under the row-major
    // ordering.
    int index_of(int re_pos, int im_pos) const {
        return re_pos * static_cast<int>(axis_.size()) + im_pos;
    }

    friend Constellation make_qam(int order);

private:
    std::vector<cplx> points_;
    std::vector<double> axis_;
    int bits_per_symbol_ = 0;
    double mean_energy_ = 0.0;
};

// Sum set C' = { y + z : y, z in C } with per-point multiplicities
// (number of ordered pairs).  Multiplicities are diagnostics only; the
// decoders treat C' as uniform.
class SumConstellation {
public:
    const std::vector<cplx>& points() const { return points_; }
    const cplx& point(int idx) const { return points_[idx]; }
    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<int>& multiplicity() const { return multiplicity_; }
    const std::vector<double>& axis() const { return axis_; }

    friend SumConstellation make_sum_set(const Constellation& c);

private:
    std::vector<cplx> points_;
    std::vector<int> multiplicity_;
    std::vector<double> axis_;
};

// Builds the centered square QAM of the given order.  Throws
// UnsupportedOrder unless order is a perfect square >= 4.
Constellation make_qam(int order);

SumConstellation make_sum_set(const Constellation& c);

// Index of the constellation point nearest to y; exact ties go to the
// lowest index.
int slice_nearest(cplx y, const Constellation& c);

} // namespace iasim
