#include "iasim/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "iasim/errors.hpp"

namespace iasim {

Constellation make_qam(int order) {
    if (order < 4) {
        throw UnsupportedOrder("QAM order must be >= 4, got " + std::to_string(order));
    }
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (side * side != order) {
        throw UnsupportedOrder("QAM order must be a perfect square, got " +
                               std::to_string(order));
    }

    Constellation c;
    c.axis_.reserve(side);
    for (int k = 0; k < side; ++k) {
        c.axis_.push_back(static_cast<double>(2 * k - (side - 1)));
    }

    double energy = 0.0;
    c.points_.reserve(order);
    for (double re : c.axis_) {
        for (double im : c.axis_) {
            c.points_.emplace_back(re, im);
            energy += re * re + im * im;
        }
    }
    c.mean_energy_ = energy / order;
    c.bits_per_symbol_ = static_cast<int>(std::lround(std::log2(order)));
    return c;
}

SumConstellation make_sum_set(const Constellation& c) {
    // Exact integer keys; points are Gaussian integers by construction.
    std::map<std::pair<long, long>, int> counts;
    for (const cplx& y : c.points()) {
        for (const cplx& z : c.points()) {
            const cplx s = y + z;
            ++counts[{std::lround(s.real()), std::lround(s.imag())}];
        }
    }

    SumConstellation out;
    out.points_.reserve(counts.size());
    for (const auto& [key, mult] : counts) {
        out.points_.emplace_back(static_cast<double>(key.first),
                                 static_cast<double>(key.second));
        out.multiplicity_.push_back(mult);
    }
    for (const cplx& p : out.points_) {
        if (out.axis_.empty() || out.axis_.back() < p.real()) {
            out.axis_.push_back(p.real());
        }
    }
    return out;
}

int slice_nearest(cplx y, const Constellation& c) {
    int best = 0;
    double best_d = std::norm(y - c.point(0));
    for (int i = 1; i < c.size(); ++i) {
        const double d = std::norm(y - c.point(i));
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

} // namespace iasim
