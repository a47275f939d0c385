#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace iasim {

// Base class for all simulator errors. Statistical events that the Monte
// Carlo harness handles by resampling (degenerate channels, singular
// equivalent matrices) also derive from this so they can be counted per
// cause at the trial level.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

class UnsupportedOrder : public SimError {
public:
    explicit UnsupportedOrder(const std::string& msg) : SimError(msg) {}
};

class RejectionBudgetExceeded : public SimError {
public:
    explicit RejectionBudgetExceeded(const std::string& msg) : SimError(msg) {}
};

// Two diagonal entries of T closer than the configured gap tolerance.
class DegenerateChannel : public SimError {
public:
    explicit DegenerateChannel(const std::string& msg) : SimError(msg) {}
};

class RankDeficient : public SimError {
public:
    explicit RankDeficient(const std::string& msg) : SimError(msg) {}
};

class SingularEquivalentChannel : public SimError {
public:
    explicit SingularEquivalentChannel(const std::string& msg) : SimError(msg) {}
};

class IllConditionedInterference : public SimError {
public:
    explicit IllConditionedInterference(const std::string& msg) : SimError(msg) {}
};

class IllConditionedProjectedChannel : public SimError {
public:
    explicit IllConditionedProjectedChannel(const std::string& msg) : SimError(msg) {}
};

class RankDeficientBasis : public SimError {
public:
    explicit RankDeficientBasis(const std::string& msg) : SimError(msg) {}
};

class SearchSpaceTooLarge : public SimError {
public:
    explicit SearchSpaceTooLarge(const std::string& msg) : SimError(msg) {}
};

class ResampleBudgetExceeded : public SimError {
public:
    explicit ResampleBudgetExceeded(const std::string& msg, std::uint32_t degenerate = 0,
                                    std::uint32_t singular = 0)
        : SimError(msg), degenerate_events(degenerate), singular_events(singular) {}

    // Per-cause attempt counts of the aborted trial, preserved so the
    // sweep aggregator loses nothing when it catches and counts.
    std::uint32_t degenerate_events;
    std::uint32_t singular_events;
};

class SchemaMismatch : public SimError {
public:
    explicit SchemaMismatch(const std::string& msg) : SimError(msg) {}
};

class IoError : public SimError {
public:
    explicit IoError(const std::string& msg) : SimError(msg) {}
};

} // namespace iasim
