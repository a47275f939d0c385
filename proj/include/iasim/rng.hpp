#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace iasim {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3").  Chosen over engine-style generators so
// that seeds are portable: the output is a pure function of
// (key, counter), and independent streams are made by partitioning the
// 128-bit counter space, not by jumping state.
//
// Word convention matches the reference implementation: the counter is
// four 32-bit words c[0..3], the key two words k[0..1], and one block
// yields four 32-bit outputs.  Known-answer vectors are pinned in the
// unit tests.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);
};

// One random stream: key = seed, counter = (block, block>>32, stream,
// stream>>32) with `block` incremented per 128-bit draw.  Distinct
// (seed, stream) pairs never share a counter, so streams are independent
// by construction.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // 53-bit uniform in [0, 1).
    double next_double();

    double uniform(double lo, double hi);

    // Standard normal via Box-Muller; generates pairs, caches the spare.
    double normal();

    // Circularly-symmetric complex normal with total variance
    // `var_total` (each real component has variance var_total/2).
    std::complex<double> complex_normal(double var_total = 1.0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// Documented seed-splitting rule used by the sweep harness: one Philox
// block with key = base and counter = (tag, tag>>32, index, index>>32),
// truncated to 64 bits.  Deterministic and collision-free across
// distinct (tag, index) pairs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index);

} // namespace iasim
