#ifndef BIASIM_ZPATTERN_HPP
#define BIASIM_ZPATTERN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "biasim/fading.hpp"

// Type-Z supersymbol scheduling. A type-Z block is a triple of slots on which
// one user's channel changes between slots 2 and 3 while the other's changes
// between slots 1 and 2; such blocks admit interference alignment with fixed
// binary beamformers, independent of the coefficient values. Any two links
// with the same coherence length N and relative block offset tau in
// [ceil(N/3), floor(N/2)] decompose into N type-Z blocks per 3N slots.

namespace biasim {

enum class Orientation { kRight, kLeft, kNotZ };

std::string to_string(Orientation o);

/// Three slots forming a type-Z pattern, with the coherence block labels each
/// user sees at those slots. user_blocks[j][k] is user j's block at slots[k].
struct ZBlock {
    std::array<std::int64_t, 3> slots{};
    Orientation orientation = Orientation::kNotZ;
    std::array<std::array<BlockIndex, 3>, 2> user_blocks{};
};

/// How many blocks each construction family contributed to a plan.
struct FamilyCounts {
    int gamma = 0;  // tau blocks
    int phi = 0;    // N - 2*tau blocks
    int omega = 0;  // 3*tau - N blocks
    int theta = 0;  // N - 2*tau blocks

    bool operator==(const FamilyCounts&) const = default;
    int total() const { return gamma + phi + omega + theta; }
};

/// N type-Z blocks covering one 3N-slot window exactly once.
struct DecompositionPlan {
    int N = 0;
    int offset = 0;
    std::int64_t period = 0;
    int tau = 0;
    FamilyCounts family_counts;
    std::vector<ZBlock> blocks;

    /// First scheduled slot of this period's window; the window is
    /// [window_start(), window_start() + 3N).
    std::int64_t window_start() const;
};

/// Relative block offset between a zero-offset link and one offset by
/// `offset` slots: ring distance min(offset, N - offset).
int tau_of(int N, int offset);

/// Smallest tau that admits a type-Z decomposition: ceil(N/3).
inline int min_feasible_tau(int N) { return (N + 2) / 3; }

/// True iff links with this coherence length and offset decompose into type-Z
/// blocks (tau >= ceil(N/3); tau <= floor(N/2) holds by construction).
bool feasible(int N, int offset);

/// Classify the slot triple n1 < n2 < n3 against the two users' coherence
/// grids. kRight when user 1 changes block last and user 2 first, kLeft for
/// the mirror image, kNotZ otherwise.
Orientation classify_triple(const CoherenceSchedule& sched1, const CoherenceSchedule& sched2,
                            std::int64_t n1, std::int64_t n2, std::int64_t n3);

/// Build the N-block schedule for one 3N-slot window. Throws InfeasibleOffset
/// when feasible(N, offset) is false. Blocks are emitted family by family
/// (gamma, phi, omega, theta), ascending within each family.
DecompositionPlan decompose_period(int N, int offset, std::int64_t period);

/// Outcome of checking a plan against the schedules it claims to cover.
struct PlanValidation {
    enum class Failure { kNone, kShape, kCoverage, kClassification, kCounts };

    bool pass = true;
    Failure failure = Failure::kNone;
    std::string detail;  // first violation, empty on pass
};

/// Re-derive everything the plan asserts: exact slot coverage of the window,
/// per-block classification and block labels, and the family count formulas.
PlanValidation validate_plan(const DecompositionPlan& plan, const CoherenceSchedule& sched1,
                             const CoherenceSchedule& sched2);

/// JSON with keys {N, offset, period, tau, familyCounts, blocks}.
std::string plan_to_json(const DecompositionPlan& plan, int indent = -1);

}  // namespace biasim

#endif  // BIASIM_ZPATTERN_HPP
