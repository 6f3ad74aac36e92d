#include "biasim/pairing.hpp"

#include <algorithm>
#include <thread>

#include "biasim/rng.hpp"

namespace biasim {

BigInt power_sum(std::int64_t a, int b) {
    if (a < 1) throw OutOfDomain("power_sum: a must be >= 1");
    if (b < 0) throw OutOfDomain("power_sum: negative exponent");
    BigInt total = 0;
    for (std::int64_t i = 1; i <= a; ++i)
        total += boost::multiprecision::pow(BigInt(i), static_cast<unsigned>(b));
    return total;
}

BigInt blocked_count_formula(int N, int K) {
    if (N < 1) throw OutOfDomain("blocked_count_formula: N must be >= 1");
    if (K < 3) throw OutOfDomain("blocked_count_formula: K must be >= 3");
    const int c = min_feasible_tau(N);
    return 3 * power_sum(c, K - 2) - 2 * power_sum(c, K - 3);
}

BigRat pairing_probability_lower_bound(int N, int K) {
    if (N < 1) throw OutOfDomain("pairing_probability_lower_bound: N must be >= 1");
    if (K < 2) throw OutOfDomain("pairing_probability_lower_bound: K must be >= 2");
    const BigInt numerator = 3 * power_sum(min_feasible_tau(N), K - 2);
    const BigInt denominator = boost::multiprecision::pow(BigInt(N), static_cast<unsigned>(K - 1));
    return BigRat(1) - BigRat(numerator, denominator);
}

namespace {

BigInt tuple_space_size(int N, int K) {
    return boost::multiprecision::pow(BigInt(N), static_cast<unsigned>(K - 1));
}

void check_budget(int N, int K, std::int64_t budget) {
    const BigInt required = tuple_space_size(N, K);
    if (required > budget)
        throw BudgetExceeded("enumeration needs " + required.str() + " tuples, budget is " +
                                 std::to_string(budget),
                             required.str());
}

// Depth-first walk over offsets[1..K-1]; a prefix is extended only while all
// its pairwise ring distances stay below the threshold, so violating subtrees
// are skipped wholesale.
std::int64_t count_blocked(int N, int K, int threshold) {
    std::vector<int> chosen;
    chosen.reserve(K);
    chosen.push_back(0);

    std::int64_t count = 0;
    auto descend = [&](auto&& self, int depth) -> void {
        if (depth == K) {
            ++count;
            return;
        }
        for (int o = 0; o < N; ++o) {
            const bool close = std::all_of(chosen.begin(), chosen.end(), [&](int prev) {
                return ring_distance(N, prev, o) < threshold;
            });
            if (!close) continue;
            chosen.push_back(o);
            self(self, depth + 1);
            chosen.pop_back();
        }
    };
    descend(descend, 1);
    return count;
}

}  // namespace

BigInt blocked_count_bruteforce(int N, int K, std::int64_t budget) {
    if (N < 1) throw OutOfDomain("blocked_count_bruteforce: N must be >= 1");
    if (K < 2) throw OutOfDomain("blocked_count_bruteforce: K must be >= 2");
    check_budget(N, K, budget);
    return count_blocked(N, K, min_feasible_tau(N));
}

BigRat pairing_probability_exact(int N, int K, std::int64_t budget) {
    return BigRat(1) - BigRat(blocked_count_bruteforce(N, K, budget), tuple_space_size(N, K));
}

BigRat pairing_probability_two_user(int N) {
    if (N < 3) throw OutOfDomain("pairing_probability_two_user: N must be >= 3");
    return BigRat(N - 2 * min_feasible_tau(N) + 1, N);
}

MonteCarloEstimate pairing_probability_montecarlo(int N, int K, std::int64_t samples,
                                                  std::uint64_t seed, int threads) {
    if (N < 1) throw std::invalid_argument("pairing_probability_montecarlo: N must be >= 1");
    if (K < 2) throw std::invalid_argument("pairing_probability_montecarlo: K must be >= 2");
    if (samples < 1)
        throw std::invalid_argument("pairing_probability_montecarlo: samples must be >= 1");

    const int threshold = min_feasible_tau(N);
    const std::uint64_t base = rng::derive(rng::splitmix64(seed), rng::kOffsetStream);

    auto count_range = [&](std::int64_t begin, std::int64_t end) {
        std::int64_t hits = 0;
        std::vector<int> offsets(K);
        offsets[0] = 0;
        for (std::int64_t s = begin; s < end; ++s) {
            const std::uint64_t sample_key = rng::derive(base, static_cast<std::uint64_t>(s));
            for (int j = 1; j < K; ++j)
                offsets[j] = static_cast<int>(
                    rng::bounded(rng::derive(sample_key, static_cast<std::uint64_t>(j)),
                                 static_cast<std::uint64_t>(N)));
            bool found = false;
            for (int i = 0; i < K && !found; ++i)
                for (int j = i + 1; j < K && !found; ++j)
                    found = ring_distance(N, offsets[i], offsets[j]) >= threshold;
            hits += found ? 1 : 0;
        }
        return hits;
    };

    // Integer per-chunk tallies summed in chunk order: identical totals for
    // any worker count.
    const int workers = static_cast<int>(std::max<std::int64_t>(
        1, std::min<std::int64_t>(threads, samples)));
    std::int64_t hits = 0;
    if (workers == 1) {
        hits = count_range(0, samples);
    } else {
        std::vector<std::int64_t> partial(workers, 0);
        std::vector<std::thread> pool;
        const std::int64_t chunk = (samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t begin = w * chunk;
            const std::int64_t end = std::min<std::int64_t>(samples, begin + chunk);
            if (begin < end)
                pool.emplace_back([&, w, begin, end] { partial[w] = count_range(begin, end); });
        }
        for (std::thread& t : pool) t.join();
        for (std::int64_t p : partial) hits += p;
    }

    MonteCarloEstimate est;
    est.samples = samples;
    est.probability = static_cast<double>(hits) / static_cast<double>(samples);
    est.std_err = std::sqrt(est.probability * (1.0 - est.probability) /
                            static_cast<double>(samples));
    return est;
}

std::optional<FeasiblePair> select_feasible_pair(const OffsetAssignment& assignment) {
    const int threshold = min_feasible_tau(assignment.N);
    std::optional<FeasiblePair> best;
    for (int i = 0; i < assignment.num_users(); ++i) {
        for (int j = i + 1; j < assignment.num_users(); ++j) {
            const int tau = ring_distance(assignment.N, assignment.offsets[i],
                                          assignment.offsets[j]);
            if (tau < threshold) continue;
            if (!best || tau > best->tau) best = FeasiblePair{i, j, tau};
        }
    }
    return best;
}

PairingReport compare_formula_oracle(int N, int K, std::int64_t budget) {
    if (K < 3) throw OutOfDomain("compare_formula_oracle: K must be >= 3");
    PairingReport report;
    report.N = N;
    report.K = K;
    report.formula_value = blocked_count_formula(N, K);
    report.oracle_count = blocked_count_bruteforce(N, K, budget);
    report.p_exact = BigRat(1) - BigRat(*report.oracle_count, tuple_space_size(N, K));
    report.p_lower_bound = pairing_probability_lower_bound(N, K);
    return report;
}

std::string rational_to_decimal(const BigRat& value, int digits) {
    BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    const bool negative = num < 0;
    if (negative) num = -num;

    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    // Round half away from zero at the last digit.
    const BigInt scaled = (num * scale * 2 + den) / (den * 2);
    const BigInt whole = scaled / scale;
    BigInt frac = scaled % scale;

    std::string out = negative ? "-" : "";
    out += whole.str();
    if (digits > 0) {
        std::string f = frac.str();
        out += "." + std::string(static_cast<std::size_t>(digits) - f.size(), '0') + f;
    }
    return out;
}

double rational_to_double(const BigRat& value) {
    return value.convert_to<double>();
}

}  // namespace biasim
