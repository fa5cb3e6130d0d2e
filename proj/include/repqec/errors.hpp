#pragma once

#include <stdexcept>
#include <string>

namespace repqec {

// A Kraus branch whose probability is below eps_prob; callers must not
// select such a branch.
struct ZeroProbabilityOutcome : std::runtime_error {
    explicit ZeroProbabilityOutcome(const std::string& what) : std::runtime_error(what) {}
};

// Raised while sampling when every available branch has vanishing
// probability. The sample is aborted and redrawn from a fresh stream.
struct NumericalDegeneracy : std::runtime_error {
    explicit NumericalDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

struct InternalInvariantViolation : std::logic_error {
    explicit InternalInvariantViolation(const std::string& what) : std::logic_error(what) {}
};

struct FitDiverged : std::runtime_error {
    explicit FitDiverged(const std::string& what) : std::runtime_error(what) {}
};

// Probability threshold on det(M - D): below it a branch is treated as
// probability zero to guard the inverse against blow-up.
inline constexpr double kEpsProb = 1e-14;

}  // namespace repqec
