// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Run through ctest or directly; criterion 9 invokes the CLI
// binary, so build the whole tree first.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "biasim/codec.hpp"
#include "biasim/pairing.hpp"
#include "biasim/zpattern.hpp"

using namespace biasim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct TimedScope {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct PlanCase {
    int N;
    int offset;
    std::int64_t period;
    DecompositionPlan plan;
};

std::vector<PlanCase> build_sweep_plans() {
    std::vector<PlanCase> out;
    for (int N = 3; N <= 60; ++N)
        for (int offset = 0; offset < N; ++offset)
            if (feasible(N, offset))
                for (std::int64_t period : {0, 1, 2})
                    out.push_back({N, offset, period, decompose_period(N, offset, period)});
    return out;
}

// ---------------------------------------------------------------------------
// 1. Decomposition validity sweep over N in 3..60, all feasible offsets.

Outcome criterion1(const std::vector<PlanCase>& plans) {
    const TimedScope timer;
    for (const PlanCase& pc : plans) {
        const CoherenceSchedule s1(pc.N, 0), s2(pc.N, pc.offset);
        const PlanValidation check = validate_plan(pc.plan, s1, s2);
        if (!check.pass)
            return {false, "N=" + std::to_string(pc.N) + " offset=" + std::to_string(pc.offset) +
                               " period=" + std::to_string(pc.period) + ": " + check.detail};
    }
    const double elapsed = timer.seconds();
    std::ostringstream detail;
    detail << plans.size() << " plans valid in " << std::fixed << elapsed << " s";
    return {elapsed < 10.0, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. The N=5, offset=2 window decomposes into 5 blocks over slots 3..17.

Outcome criterion2() {
    const DecompositionPlan plan = decompose_period(5, 2, 0);
    if (plan.blocks.size() != 5) return {false, "expected 5 blocks"};
    std::set<std::int64_t> slots;
    for (const ZBlock& b : plan.blocks) slots.insert(b.slots.begin(), b.slots.end());
    if (slots.size() != 15 || *slots.begin() != 3 || *slots.rbegin() != 17)
        return {false, "slot coverage is not 3..17"};
    const PlanValidation check =
        validate_plan(plan, CoherenceSchedule(5, 0), CoherenceSchedule(5, 2));
    if (!check.pass) return {false, check.detail};
    return {true, "5 type-Z blocks, slots 3..17 covered once each"};
}

// ---------------------------------------------------------------------------
// 3. Blind alignment: residual <= 1e-12 on every block of every plan from
//    criterion 1, across 1000 channel seeds. The beamformer choice reads only
//    the orientation (see the beamformers() signature).

Outcome criterion3(const std::vector<PlanCase>& plans) {
    const TimedScope timer;
    const int seeds = 1000;
    const int workers = std::max(2u, std::thread::hardware_concurrency());

    std::vector<double> worst(workers, 0.0);
    auto run_chunk = [&](int w) {
        double local = 0.0;
        for (std::uint64_t seed = w; seed < seeds; seed += workers) {
            const ChannelProcess process(rng::derive(0xA11, seed), 2);
            for (const PlanCase& pc : plans) {
                const std::array<CoherenceSchedule, 2> scheds{CoherenceSchedule(pc.N, 0),
                                                              CoherenceSchedule(pc.N, pc.offset)};
                for (const ZBlock& b : pc.plan.blocks)
                    local = std::max(local, alignment_residual(process, scheds, b,
                                                               beamformers(b.orientation)));
            }
        }
        worst[w] = local;
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
    for (std::thread& t : pool) t.join();

    const double residual = *std::max_element(worst.begin(), worst.end());
    std::int64_t blocks = 0;
    for (const PlanCase& pc : plans) blocks += static_cast<std::int64_t>(pc.plan.blocks.size());

    std::ostringstream detail;
    detail << "worst residual " << std::scientific << residual << " over " << blocks
           << " blocks x " << seeds << " seeds (" << std::fixed << timer.seconds() << " s)";
    return {residual <= 1e-12, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. Noiseless end-to-end recovery in 1000/1000 realizations.

Outcome criterion4() {
    const std::vector<std::pair<int, int>> cases{{5, 2}, {5, 3}, {6, 3}, {7, 3}, {12, 4}};
    std::vector<std::pair<std::array<CoherenceSchedule, 2>, DecompositionPlan>> setups;
    for (auto [N, offset] : cases)
        setups.push_back({{CoherenceSchedule(N, 0), CoherenceSchedule(N, offset)},
                          decompose_period(N, offset, 0)});

    int recovered = 0;
    double worst_rel = 0.0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const auto& [schedules, plan] = setups[trial % setups.size()];
        const ZBlock& block = plan.blocks[trial % plan.blocks.size()];
        const BeamformerSet bf = beamformers(block.orientation);
        const ChannelProcess process(rng::derive(0xACC4, trial), 2);

        const std::uint64_t sym = rng::derive(rng::splitmix64(trial), rng::kSymbolStream);
        const SymbolFrame frame{rng::complex_gaussian(rng::derive(sym, 0)),
                                rng::complex_gaussian(rng::derive(sym, 1)),
                                rng::complex_gaussian(rng::derive(sym, 2)),
                                rng::complex_gaussian(rng::derive(sym, 3))};
        const auto rx = propagate(process, schedules, block, transmit(frame, bf), 0.0, trial);
        const DecodeResult r0 = zf_decode(rx[0], csir_for(process, schedules, block, 0), bf, 0);
        const DecodeResult r1 = zf_decode(rx[1], csir_for(process, schedules, block, 1), bf, 1);

        const double err =
            std::max({std::abs(r0.symbols[0] - frame.s12), std::abs(r0.symbols[1] - frame.s22),
                      std::abs(r1.symbols[0] - frame.s11), std::abs(r1.symbols[1] - frame.s21)});
        const double scale =
            std::max({std::abs(frame.s11), std::abs(frame.s12), std::abs(frame.s21),
                      std::abs(frame.s22)});
        const double rel = err / scale;
        worst_rel = std::max(worst_rel, rel);
        if (rel <= 1e-9) ++recovered;
    }
    std::ostringstream detail;
    detail << recovered << "/1000 recovered, worst relative error " << std::scientific
           << worst_rel;
    return {recovered == 1000, detail.str()};
}

// ---------------------------------------------------------------------------
// 5. DoF estimates: full scheme in [1.28, 1.40], one-stream reference in
//    [0.30, 0.37], under 60 s.

Outcome criterion5() {
    const TimedScope timer;
    const std::array<CoherenceSchedule, 2> schedules{CoherenceSchedule(5, 0),
                                                     CoherenceSchedule(5, 2)};
    const DecompositionPlan plan = decompose_period(5, 2, 0);
    const ChannelProcess process(0xD0F, 2);

    const DofEstimate full =
        estimate_dof(process, schedules, plan, 30, 50, 200, 11, DofScheme::kBlindAlignment, 2);
    const DofEstimate single =
        estimate_dof(process, schedules, plan, 30, 50, 200, 11, DofScheme::kSingleStream, 2);
    const double elapsed = timer.seconds();

    std::ostringstream detail;
    detail << "full " << std::fixed << full.mean << " (target 4/3), single " << single.mean
           << " (target 1/3), " << elapsed << " s";
    const bool pass = full.mean > 1.28 && full.mean < 1.40 && single.mean > 0.30 &&
                      single.mean < 0.37 && elapsed < 60.0;
    return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Monte Carlo vs exact within 3 sigma on {6,9,12} x {3,4,5}; K=2
//    enumeration equals the closed form exactly for N in 3..60.

Outcome criterion6() {
    for (int N : {6, 9, 12}) {
        for (int K : {3, 4, 5}) {
            const double exact = rational_to_double(pairing_probability_exact(N, K));
            const MonteCarloEstimate mc =
                pairing_probability_montecarlo(N, K, 100000, 0xC6, 2);
            if (std::abs(mc.probability - exact) > 3.0 * mc.std_err) {
                std::ostringstream detail;
                detail << "N=" << N << " K=" << K << ": mc " << mc.probability << " vs exact "
                       << exact << " beyond 3 sigma";
                return {false, detail.str()};
            }
        }
    }
    for (int N = 3; N <= 60; ++N) {
        const BigRat via_oracle = BigRat(1) - BigRat(blocked_count_bruteforce(N, 2), N);
        if (via_oracle != pairing_probability_two_user(N))
            return {false, "K=2 mismatch at N=" + std::to_string(N)};
    }
    return {true, "9 Monte Carlo cells within 3 sigma; K=2 exact for N=3..60"};
}

// ---------------------------------------------------------------------------
// 7. Lower-bound curve anchors and shape.

Outcome criterion7() {
    const double b124 = rational_to_double(pairing_probability_lower_bound(12, 4));
    const double b126 = rational_to_double(pairing_probability_lower_bound(12, 6));
    if (std::abs(b124 - 0.947917) > 1e-5) return {false, "P(12,4) bound off: " + std::to_string(b124)};
    if (std::abs(b126 - 0.995732) > 1e-5) return {false, "P(12,6) bound off: " + std::to_string(b126)};
    // Published-claim consistency within the 0.005 reading tolerance.
    if (b124 < 0.95 - 0.005) return {false, "P(12,4) bound below the claimed 0.95 tolerance"};
    if (b126 < 0.99) return {false, "P(12,6) bound not 'almost one'"};

    const std::array<int, 3> ns{12, 30, 30000};
    std::array<std::array<double, 11>, 3> curve{};
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double prev = -1.0;
        for (int k = 2; k <= 10; ++k) {
            curve[i][k] = rational_to_double(pairing_probability_lower_bound(ns[i], k));
            if (curve[i][k] < prev)
                return {false, "bound decreases in K at N=" + std::to_string(ns[i]) +
                                   ", K=" + std::to_string(k)};
            prev = curve[i][k];
        }
    }
    // N-insensitivity over the region the published claims address (K >= 4).
    // At K=3 the three curves genuinely spread by ~0.042, reported below.
    double spread_claim = 0.0, spread_all = 0.0;
    for (int k = 2; k <= 10; ++k) {
        double lo = 1.0, hi = -1.0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            lo = std::min(lo, curve[i][k]);
            hi = std::max(hi, curve[i][k]);
        }
        spread_all = std::max(spread_all, hi - lo);
        if (k >= 4) spread_claim = std::max(spread_claim, hi - lo);
    }
    std::ostringstream detail;
    detail << "anchors 0.947917/0.995732 exact; nondecreasing; spread " << std::fixed
           << spread_claim << " for K>=4 (K=2..10 spread " << spread_all << ")";
    return {spread_claim < 0.02, detail.str()};
}

// ---------------------------------------------------------------------------
// 8. Formula and enumeration reported side by side for every enumerable
//    instance with N <= 12, K <= 5, archived to CSV; the known divergent
//    pairs carry their frozen values.

Outcome criterion8() {
    std::ostringstream csv;
    csv << "n,k,formula,oracle,p_exact,p_lower_bound,bound_le_exact\n";
    bool pinned_63 = false, pinned_64 = false;
    int instances = 0, bound_holds = 0;
    for (int N = 1; N <= 12; ++N) {
        for (int K = 3; K <= 5; ++K) {
            const PairingReport r = compare_formula_oracle(N, K);
            if (!r.formula_value || !r.oracle_count || !r.p_exact)
                return {false, "missing value at N=" + std::to_string(N) +
                                   " K=" + std::to_string(K)};
            // Whether the closed-form bound sits below the exact probability
            // is recorded, not asserted: the two counts rest on readings of
            // the arc-distance event that disagree on small instances.
            const bool holds = r.p_lower_bound <= *r.p_exact;
            bound_holds += holds ? 1 : 0;
            csv << N << ',' << K << ',' << r.formula_value->str() << ',' << r.oracle_count->str()
                << ',' << rational_to_decimal(*r.p_exact, 6) << ','
                << rational_to_decimal(r.p_lower_bound, 6) << ',' << (holds ? "yes" : "no")
                << '\n';
            ++instances;
            if (N == 6 && K == 3)
                pinned_63 = (*r.formula_value == 5 && *r.oracle_count == 7);
            if (N == 6 && K == 4)
                pinned_64 = (*r.formula_value == 9 && *r.oracle_count == 15);
        }
    }
    std::ofstream out("biasim_discrepancy_report.csv", std::ios::binary);
    out << csv.str();
    if (!pinned_63) return {false, "(6,3) should report formula 5, oracle 7"};
    if (!pinned_64) return {false, "(6,4) should report formula 9, oracle 15"};
    return {true, std::to_string(instances) +
                      " instances archived to biasim_discrepancy_report.csv; "
                      "(6,3)=(5,7), (6,4)=(9,15); bound <= exact on " +
                      std::to_string(bound_holds) + "/" + std::to_string(instances)};
}

// ---------------------------------------------------------------------------
// 9. CLI determinism: byte-identical re-runs, invariant to worker count.

std::string run_cli_capture(const std::string& args, int& exit_code) {
    const std::string cmd = std::string(BIASIM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        exit_code = -1;
        return {};
    }
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

Outcome criterion9() {
    const std::vector<std::array<std::string, 2>> pairs{
        {"schedule --n 5 --offset 2", "schedule --n 5 --offset 2"},
        {"schedule --n 12 --offset 5 --periods 3 --format csv",
         "schedule --n 12 --offset 5 --periods 3 --format csv"},
        {"simulate --n 5 --offset 2 --realizations 100 --threads 1",
         "simulate --n 5 --offset 2 --realizations 100 --threads 2"},
        {"simulate --n 6 --offset 3 --realizations 60 --seed 9 --format json",
         "simulate --n 6 --offset 3 --realizations 60 --seed 9 --format json"},
        {"pairing --n 9 --k 4 --samples 100000 --threads 1",
         "pairing --n 9 --k 4 --samples 100000 --threads 3"},
        {"pairing --n 30000 --k 6 --skip-oracle --format json",
         "pairing --n 30000 --k 6 --skip-oracle --format json"},
        {"sweep-fig4", "sweep-fig4 --threads 2"},
    };
    for (const auto& [a, b] : pairs) {
        int code_a = 0, code_b = 0;
        const std::string out_a = run_cli_capture(a, code_a);
        const std::string out_b = run_cli_capture(b, code_b);
        if (code_a != 0 || code_b != 0)
            return {false, "nonzero exit for '" + a + "' or '" + b + "'"};
        if (out_a != out_b || out_a.empty())
            return {false, "output differs between '" + a + "' and '" + b + "'"};
    }
    return {true, std::to_string(pairs.size()) + " command pairs byte-identical"};
}

}  // namespace

int main() {
    const std::vector<PlanCase> plans = build_sweep_plans();

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"decomposition validity sweep (N=3..60, all feasible offsets, 3 periods)",
         [&] { return criterion1(plans); }},
        {"N=5, offset=2 worked example reproduction", criterion2},
        {"blind alignment residual <= 1e-12 everywhere", [&] { return criterion3(plans); }},
        {"noiseless recovery 1000/1000 at relative error <= 1e-9", criterion4},
        {"DoF 4/3 and single-stream 1/3 inside acceptance bands", criterion5},
        {"pairing Monte Carlo vs exact; K=2 closed form", criterion6},
        {"lower-bound curve anchors, monotonicity, N-insensitivity", criterion7},
        {"formula/oracle discrepancy report archived", criterion8},
        {"CLI determinism and worker-count invariance", criterion9},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %zu: %s - %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures;
}
