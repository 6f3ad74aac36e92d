#ifndef BIASIM_PAIRING_HPP
#define BIASIM_PAIRING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "biasim/errors.hpp"
#include "biasim/zpattern.hpp"

// K-user offset combinatorics: with user offsets uniform on a ring of N
// slots, how likely is it that some pair of users ends up with relative block
// offset tau >= ceil(N/3), i.e. a pair the transmitter can serve with blind
// interference alignment? All counts and probabilities in this module are
// exact (arbitrary precision); floating point appears only in Monte Carlo
// estimates and at the reporting boundary.

namespace biasim {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline constexpr std::int64_t kDefaultEnumerationBudget = 100'000'000;

/// Offsets of K users on a ring of N slots; user 0 is pinned at 0.
struct OffsetAssignment {
    OffsetAssignment(int ring_size, std::vector<int> user_offsets)
        : N(ring_size), offsets(std::move(user_offsets)) {
        if (N < 1) throw std::invalid_argument("OffsetAssignment: N must be >= 1");
        if (offsets.size() < 2) throw std::invalid_argument("OffsetAssignment: need K >= 2 users");
        if (offsets.front() != 0)
            throw std::invalid_argument("OffsetAssignment: offsets[0] must be 0");
        for (int o : offsets)
            if (o < 0 || o >= N)
                throw std::invalid_argument("OffsetAssignment: offsets must lie in [0, N)");
    }

    int num_users() const { return static_cast<int>(offsets.size()); }

    int N;
    std::vector<int> offsets;
};

/// Shortest step count between two positions on a cycle of N boxes.
inline int ring_distance(int N, int a, int b) {
    const int d = std::abs(a - b) % N;
    return std::min(d, N - d);
}

/// Exact power sum 1^b + 2^b + ... + a^b. Requires a >= 1, b >= 0; negative b
/// throws OutOfDomain.
BigInt power_sum(std::int64_t a, int b);

/// Closed-form count of "no feasible pair" offset tuples:
/// 3*power_sum(ceil(N/3), K-2) - 2*power_sum(ceil(N/3), K-3). Requires K >= 3
/// (the second term's exponent turns negative below that).
BigInt blocked_count_formula(int N, int K);

/// 1 - 3*power_sum(ceil(N/3), K-2) / N^(K-1), exact and unclamped; the bound
/// can be vacuous (<= 0) for small K.
BigRat pairing_probability_lower_bound(int N, int K);

/// Exhaustive count over all N^(K-1) ordered offset tuples of those where
/// every pairwise ring distance stays below ceil(N/3). Throws BudgetExceeded
/// when N^(K-1) exceeds the tuple budget.
BigInt blocked_count_bruteforce(int N, int K,
                                std::int64_t budget = kDefaultEnumerationBudget);

/// 1 - blocked_count_bruteforce(N, K) / N^(K-1), exact.
BigRat pairing_probability_exact(int N, int K,
                                 std::int64_t budget = kDefaultEnumerationBudget);

/// Exact probability that a single uniform offset is feasible:
/// (N - 2*ceil(N/3) + 1) / N. Requires N >= 3.
BigRat pairing_probability_two_user(int N);

struct MonteCarloEstimate {
    double probability = 0.0;
    double std_err = 0.0;
    std::int64_t samples = 0;
};

/// Sampled fraction of assignments containing at least one feasible pair,
/// with binomial standard error. Sample s derives its offsets from
/// (seed, s), so the estimate is identical for any worker count.
MonteCarloEstimate pairing_probability_montecarlo(int N, int K, std::int64_t samples,
                                                  std::uint64_t seed, int threads = 1);

struct FeasiblePair {
    int i = 0;
    int j = 0;
    int tau = 0;
};

/// The feasible pair with maximal tau (ties: smallest (i, j) lexicographic),
/// or nullopt when no pair reaches ceil(N/3).
std::optional<FeasiblePair> select_feasible_pair(const OffsetAssignment& assignment);

/// Everything the toolkit knows about one (N, K) instance. Formula and
/// enumeration are reported side by side with no equality assertion: the two
/// counts genuinely differ on small instances (see compare_formula_oracle).
struct PairingReport {
    int N = 0;
    int K = 0;
    std::optional<BigInt> formula_value;   // absent for K < 3
    std::optional<BigInt> oracle_count;    // absent when over budget or skipped
    std::optional<BigRat> p_exact;         // derived from oracle_count
    BigRat p_lower_bound;
    std::optional<BigRat> p_two_user;      // present for K == 2
    std::optional<MonteCarloEstimate> monte_carlo;
};

/// Closed-form count vs. exhaustive enumeration for one instance, plus the
/// probabilities both imply. Throws BudgetExceeded like the oracle. K >= 3.
PairingReport compare_formula_oracle(int N, int K,
                                     std::int64_t budget = kDefaultEnumerationBudget);

/// Decimal string of an exact rational, rounded to `digits` places.
std::string rational_to_decimal(const BigRat& value, int digits);

/// Nearest-double conversion for reporting.
double rational_to_double(const BigRat& value);

}  // namespace biasim

#endif  // BIASIM_PAIRING_HPP
