#ifndef BIASIM_FADING_HPP
#define BIASIM_FADING_HPP

#include <cstdint>
#include <Eigen/Dense>

#include "biasim/errors.hpp"
#include "biasim/rng.hpp"

// Homogeneous block fading downlink: every user sees a channel vector that is
// constant over coherence blocks of N slots, with a per-user initial offset.

namespace biasim {

using Complex = std::complex<double>;
using Vec2c = Eigen::Vector2cd;

/// Index of a coherence block. 0 labels the leading partial block (when the
/// offset is nonzero); 1 labels the first full block. Only label equality is
/// meaningful downstream.
using BlockIndex = std::uint64_t;

/// One user's block-fading time structure: coherence length N and the slot at
/// which the first full block starts.
struct CoherenceSchedule {
    CoherenceSchedule(int coherence_len, int initial_offset)
        : N(coherence_len), offset(initial_offset) {
        if (N < 1) throw std::invalid_argument("CoherenceSchedule: N must be >= 1");
        if (offset < 0 || offset >= N)
            throw std::invalid_argument("CoherenceSchedule: offset must lie in [0, N)");
    }

    int N;
    int offset;
};

/// Coherence block containing slot n.
inline BlockIndex block_id(const CoherenceSchedule& schedule, std::int64_t n) {
    if (n < schedule.offset) return 0;
    return static_cast<BlockIndex>((n - schedule.offset) / schedule.N) + 1;
}

/// Deterministic map from (seed, user, block) to a 2-antenna coefficient
/// vector, each entry i.i.d. circularly-symmetric complex Gaussian with unit
/// variance. Pure lookup: no internal state, safe to query from any thread in
/// any order.
struct ChannelProcess {
    ChannelProcess(std::uint64_t seed_, int num_users_)
        : seed(seed_), num_users(num_users_) {
        if (num_users < 1) throw std::invalid_argument("ChannelProcess: num_users must be >= 1");
    }

    Vec2c coefficients(int user, BlockIndex block) const {
        if (user < 0 || user >= num_users)
            throw InvalidUser("ChannelProcess: user index out of range");
        std::uint64_t key = rng::derive(rng::splitmix64(seed), rng::kChannelStream);
        key = rng::derive(key, static_cast<std::uint64_t>(user));
        key = rng::derive(key, block);
        return {rng::complex_gaussian(rng::derive(key, 0)),
                rng::complex_gaussian(rng::derive(key, 1))};
    }

    std::uint64_t seed;
    int num_users;
};

/// Channel vector seen by `user` at slot n: constant within a coherence block.
inline Vec2c coefficients_at(const ChannelProcess& process, const CoherenceSchedule& schedule,
                             int user, std::int64_t n) {
    return process.coefficients(user, block_id(schedule, n));
}

}  // namespace biasim

#endif  // BIASIM_FADING_HPP
