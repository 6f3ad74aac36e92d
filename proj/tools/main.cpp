// Command-line front end: type-Z schedule construction, blind-alignment
// simulation, and user-pairing probability reports, all reproducible from an
// explicit seed.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "biasim/codec.hpp"
#include "biasim/pairing.hpp"
#include "biasim/zpattern.hpp"

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 0xB1A5EEDULL;

std::string format_double(double value, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

std::string rational_string(const biasim::BigRat& value) {
    return boost::multiprecision::numerator(value).str() + "/" +
           boost::multiprecision::denominator(value).str();
}

std::string join_invocation(int argc, char** argv) {
    std::string out = "biasim";
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        // The worker count never changes results, so it is not part of the
        // recorded invocation; outputs stay byte-identical across it.
        if (arg == "--threads") {
            ++i;
            continue;
        }
        if (arg.rfind("--threads=", 0) == 0) continue;
        out += ' ';
        out += arg;
    }
    return out;
}

void write_output(const std::string& payload, const std::string& path) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << payload;
}

struct CommonOptions {
    std::string format = "csv";
    std::string out_path;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& common, const std::string& default_format) {
    common.format = default_format;
    cmd->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", common.out_path, "Output path (default: stdout)");
    cmd->add_option("--seed", common.seed, "Random seed (fixed default for reproducibility)");
    cmd->add_option("--threads", common.threads, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
}

std::string csv_comment(const std::string& invocation, std::uint64_t seed) {
    return "# " + invocation + " [seed=" + std::to_string(seed) + "]\n";
}

ordered_json json_envelope(const std::string& invocation, std::uint64_t seed) {
    ordered_json j;
    j["invocation"] = invocation;
    j["seed"] = seed;
    return j;
}

// ---------------------------------------------------------------- schedule

int run_schedule(int n, int offset, int periods, const CommonOptions& common,
                 const std::string& invocation) {
    std::vector<biasim::DecompositionPlan> plans;
    plans.reserve(periods);
    for (int p = 0; p < periods; ++p) plans.push_back(biasim::decompose_period(n, offset, p));

    std::string payload;
    if (common.format == "json") {
        ordered_json j = json_envelope(invocation, common.seed);
        auto& arr = j["plans"] = ordered_json::array();
        for (const auto& plan : plans)
            arr.push_back(ordered_json::parse(biasim::plan_to_json(plan)));
        payload = j.dump(2) + "\n";
    } else {
        std::ostringstream csv;
        csv << csv_comment(invocation, common.seed);
        csv << "n,offset,period,tau,gamma,phi,omega,theta,block,slot1,slot2,slot3,orientation\n";
        for (const auto& plan : plans) {
            for (std::size_t i = 0; i < plan.blocks.size(); ++i) {
                const biasim::ZBlock& b = plan.blocks[i];
                csv << plan.N << ',' << plan.offset << ',' << plan.period << ',' << plan.tau
                    << ',' << plan.family_counts.gamma << ',' << plan.family_counts.phi << ','
                    << plan.family_counts.omega << ',' << plan.family_counts.theta << ',' << i
                    << ',' << b.slots[0] << ',' << b.slots[1] << ',' << b.slots[2] << ','
                    << to_string(b.orientation) << '\n';
            }
        }
        payload = csv.str();
    }
    write_output(payload, common.out_path);
    return 0;
}

// ---------------------------------------------------------------- simulate

int run_simulate(int n, int offset, double snr_low_db, double snr_high_db, double snr_step_db,
                 int realizations, bool baseline, const CommonOptions& common,
                 const std::string& invocation) {
    if (realizations < 1) throw std::invalid_argument("--realizations must be >= 1");
    if (snr_step_db <= 0) throw std::invalid_argument("--snr-step must be positive");

    const biasim::DecompositionPlan plan = biasim::decompose_period(n, offset, 0);
    const std::array<biasim::CoherenceSchedule, 2> schedules{
        biasim::CoherenceSchedule(n, 0), biasim::CoherenceSchedule(n, offset)};
    const biasim::ChannelProcess process(common.seed, 2);
    const biasim::DofScheme scheme =
        baseline ? biasim::DofScheme::kSingleStream : biasim::DofScheme::kBlindAlignment;

    const biasim::DofEstimate dof =
        biasim::estimate_dof(process, schedules, plan, snr_low_db, snr_high_db, realizations,
                             common.seed, scheme, common.threads);

    // Per-SNR mean sum rate over the same realization streams.
    std::vector<double> grid;
    for (double db = snr_low_db; db <= snr_high_db + 1e-9; db += snr_step_db) grid.push_back(db);

    struct RatePoint {
        double snr_db, mean, std_err;
    };
    std::vector<RatePoint> rates;
    const std::uint64_t base =
        biasim::rng::derive(biasim::rng::splitmix64(process.seed), common.seed);
    for (double db : grid) {
        const double snr = biasim::db_to_linear(db);
        double sum = 0.0, sum_sq = 0.0;
        int used = 0;
        for (int r = 0; r < realizations; ++r) {
            const biasim::ChannelProcess draw(
                biasim::rng::derive(base, static_cast<std::uint64_t>(r)), 2);
            double acc = 0.0;
            for (const biasim::ZBlock& b : plan.blocks)
                acc += baseline ? biasim::single_stream_rate(draw, schedules, b, snr)
                                : biasim::sum_rate(draw, schedules, b, snr);
            const double mean_rate = acc / static_cast<double>(plan.blocks.size());
            sum += mean_rate;
            sum_sq += mean_rate * mean_rate;
            ++used;
        }
        const double mean = sum / used;
        const double var = used > 1 ? (sum_sq - used * mean * mean) / (used - 1) : 0.0;
        rates.push_back({db, mean, std::sqrt(std::max(0.0, var) / used)});
    }

    std::string payload;
    if (common.format == "json") {
        ordered_json j = json_envelope(invocation, common.seed);
        j["n"] = n;
        j["offset"] = offset;
        j["scheme"] = baseline ? "single_stream" : "blind_alignment";
        j["dof"] = {{"snr_db_low", snr_low_db},
                    {"snr_db_high", snr_high_db},
                    {"realizations", realizations},
                    {"dof_mean", dof.mean},
                    {"dof_stderr", dof.std_err},
                    {"singular_skips", dof.singular_skips}};
        auto& arr = j["rates"] = ordered_json::array();
        for (const RatePoint& p : rates)
            arr.push_back({{"snr_db", p.snr_db},
                           {"sum_rate_mean", p.mean},
                           {"sum_rate_stderr", p.std_err}});
        payload = j.dump(2) + "\n";
    } else {
        std::ostringstream csv;
        csv << csv_comment(invocation, common.seed);
        csv << "n,offset,snr_db_low,snr_db_high,realizations,dof_mean,dof_stderr,"
               "singular_skips\n";
        csv << n << ',' << offset << ',' << format_double(snr_low_db, 1) << ','
            << format_double(snr_high_db, 1) << ',' << realizations << ','
            << format_double(dof.mean) << ',' << format_double(dof.std_err) << ','
            << dof.singular_skips << '\n';
        csv << "# rate_sweep\n";
        csv << "snr_db,sum_rate_mean,sum_rate_stderr\n";
        for (const RatePoint& p : rates)
            csv << format_double(p.snr_db, 1) << ',' << format_double(p.mean) << ','
                << format_double(p.std_err) << '\n';
        payload = csv.str();
    }
    write_output(payload, common.out_path);
    return 0;
}

// ----------------------------------------------------------------- pairing

int run_pairing(int n, int k, std::int64_t samples, bool skip_oracle, std::int64_t budget,
                const CommonOptions& common, const std::string& invocation) {
    if (n < 1) throw std::invalid_argument("--n must be >= 1");
    if (k < 2) throw std::invalid_argument("--k must be >= 2");
    if (samples < 0) throw std::invalid_argument("--samples must be >= 0");

    biasim::PairingReport report;
    report.N = n;
    report.K = k;
    report.p_lower_bound = biasim::pairing_probability_lower_bound(n, k);
    if (k >= 3) report.formula_value = biasim::blocked_count_formula(n, k);
    if (k == 2 && n >= 3) report.p_two_user = biasim::pairing_probability_two_user(n);
    if (!skip_oracle) {
        report.oracle_count = biasim::blocked_count_bruteforce(n, k, budget);
        report.p_exact = biasim::pairing_probability_exact(n, k, budget);
    }
    if (samples > 0)
        report.monte_carlo =
            biasim::pairing_probability_montecarlo(n, k, samples, common.seed, common.threads);

    std::string payload;
    if (common.format == "json") {
        ordered_json j = json_envelope(invocation, common.seed);
        j["n"] = report.N;
        j["k"] = report.K;
        j["formula"] =
            report.formula_value ? ordered_json(report.formula_value->str()) : ordered_json();
        j["oracle"] =
            report.oracle_count ? ordered_json(report.oracle_count->str()) : ordered_json();
        j["p_exact"] = report.p_exact ? ordered_json(rational_string(*report.p_exact))
                                      : ordered_json();
        j["p_exact_decimal"] = report.p_exact
                                   ? ordered_json(biasim::rational_to_decimal(*report.p_exact, 6))
                                   : ordered_json();
        j["p_lower_bound"] = rational_string(report.p_lower_bound);
        j["p_lower_bound_decimal"] = biasim::rational_to_decimal(report.p_lower_bound, 6);
        j["p_two_user"] = report.p_two_user ? ordered_json(rational_string(*report.p_two_user))
                                            : ordered_json();
        j["p_two_user_decimal"] =
            report.p_two_user ? ordered_json(biasim::rational_to_decimal(*report.p_two_user, 6))
                              : ordered_json();
        if (report.monte_carlo) {
            j["p_mc"] = format_double(report.monte_carlo->probability);
            j["p_mc_stderr"] = format_double(report.monte_carlo->std_err);
            j["samples"] = report.monte_carlo->samples;
        } else {
            j["p_mc"] = ordered_json();
            j["p_mc_stderr"] = ordered_json();
            j["samples"] = 0;
        }
        payload = j.dump(2) + "\n";
    } else {
        std::ostringstream csv;
        csv << csv_comment(invocation, common.seed);
        csv << "n,k,formula,oracle,p_exact,p_exact_dec,p_lower_bound,p_lower_bound_dec,"
               "p_two_user,p_two_user_dec,p_mc,p_mc_stderr,samples\n";
        csv << n << ',' << k << ',';
        csv << (report.formula_value ? report.formula_value->str() : "") << ',';
        csv << (report.oracle_count ? report.oracle_count->str() : "") << ',';
        csv << (report.p_exact ? rational_string(*report.p_exact) : "") << ',';
        csv << (report.p_exact ? biasim::rational_to_decimal(*report.p_exact, 6) : "") << ',';
        csv << rational_string(report.p_lower_bound) << ','
            << biasim::rational_to_decimal(report.p_lower_bound, 6) << ',';
        csv << (report.p_two_user ? rational_string(*report.p_two_user) : "") << ',';
        csv << (report.p_two_user ? biasim::rational_to_decimal(*report.p_two_user, 6) : "")
            << ',';
        if (report.monte_carlo) {
            csv << format_double(report.monte_carlo->probability) << ','
                << format_double(report.monte_carlo->std_err) << ','
                << report.monte_carlo->samples;
        } else {
            csv << ",,0";
        }
        csv << '\n';
        payload = csv.str();
    }
    write_output(payload, common.out_path);
    return 0;
}

// -------------------------------------------------------------- sweep-fig4

int run_sweep(const std::vector<int>& n_list, int k_min, int k_max, bool with_exact, bool with_mc,
              std::int64_t samples, std::int64_t budget, const CommonOptions& common,
              const std::string& invocation) {
    if (k_min < 2) throw std::invalid_argument("--k-min must be >= 2");
    if (k_max < k_min) throw std::invalid_argument("empty K range");
    if (n_list.empty()) throw std::invalid_argument("empty N list");

    struct Row {
        int n, k;
        std::string lower_bound;
        std::string exact;  // empty when not enumerable or not requested
        std::string mc, mc_stderr;
    };
    std::vector<Row> rows;
    for (int n : n_list) {
        for (int k = k_min; k <= k_max; ++k) {
            Row row{n, k, biasim::rational_to_decimal(
                              biasim::pairing_probability_lower_bound(n, k), 6),
                    "", "", ""};
            if (with_exact) {
                try {
                    row.exact = biasim::rational_to_decimal(
                        biasim::pairing_probability_exact(n, k, budget), 6);
                } catch (const biasim::BudgetExceeded&) {
                    // Leave blank: the sweep exists precisely for the sizes
                    // enumeration cannot reach.
                }
            }
            if (with_mc && samples > 0) {
                const biasim::MonteCarloEstimate est = biasim::pairing_probability_montecarlo(
                    n, k, samples, common.seed, common.threads);
                row.mc = format_double(est.probability);
                row.mc_stderr = format_double(est.std_err);
            }
            rows.push_back(std::move(row));
        }
    }

    std::string payload;
    if (common.format == "json") {
        ordered_json j = json_envelope(invocation, common.seed);
        auto& arr = j["rows"] = ordered_json::array();
        for (const Row& r : rows) {
            ordered_json o{{"n", r.n}, {"k", r.k}, {"lower_bound", r.lower_bound}};
            if (with_exact) o["exact"] = r.exact.empty() ? ordered_json() : ordered_json(r.exact);
            if (with_mc) {
                o["mc"] = r.mc.empty() ? ordered_json() : ordered_json(r.mc);
                o["mc_stderr"] = r.mc_stderr.empty() ? ordered_json() : ordered_json(r.mc_stderr);
            }
            arr.push_back(std::move(o));
        }
        payload = j.dump(2) + "\n";
    } else {
        std::ostringstream csv;
        csv << csv_comment(invocation, common.seed);
        csv << "n,k,lower_bound";
        if (with_exact) csv << ",exact";
        if (with_mc) csv << ",mc,mc_stderr";
        csv << '\n';
        for (const Row& r : rows) {
            csv << r.n << ',' << r.k << ',' << r.lower_bound;
            if (with_exact) csv << ',' << r.exact;
            if (with_mc) csv << ',' << r.mc << ',' << r.mc_stderr;
            csv << '\n';
        }
        payload = csv.str();
    }
    write_output(payload, common.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind interference alignment toolkit for homogeneous block fading"};
    app.require_subcommand(1);
    const std::string invocation = join_invocation(argc, argv);

    // schedule
    auto* schedule = app.add_subcommand("schedule", "Construct a type-Z decomposition plan");
    int sched_n = 5, sched_offset = 2, sched_periods = 1;
    CommonOptions sched_common;
    schedule->add_option("--n", sched_n, "Coherence length")->required()->check(CLI::PositiveNumber);
    schedule->add_option("--offset", sched_offset, "Second user's block offset")->required();
    schedule->add_option("--periods", sched_periods, "Number of 3N-slot periods to emit")
        ->check(CLI::PositiveNumber);
    add_common(schedule, sched_common, "json");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Estimate rate and DoF of the blind scheme");
    int sim_n = 5, sim_offset = 2, sim_realizations = 200;
    double sim_low = 30.0, sim_high = 50.0, sim_step = 5.0;
    bool sim_baseline = false;
    CommonOptions sim_common;
    simulate->add_option("--n", sim_n, "Coherence length")->check(CLI::PositiveNumber);
    simulate->add_option("--offset", sim_offset, "Second user's block offset");
    simulate->add_option("--snr-low", sim_low, "Low edge of the SNR bracket (dB)");
    simulate->add_option("--snr-high", sim_high, "High edge of the SNR bracket (dB)");
    simulate->add_option("--snr-step", sim_step, "Rate sweep step (dB)");
    simulate->add_option("--realizations", sim_realizations, "Channel realizations");
    simulate->add_flag("--baseline", sim_baseline, "Simulate the one-stream reference instead");
    add_common(simulate, sim_common, "csv");

    // pairing
    auto* pairing = app.add_subcommand("pairing", "Report pairing counts and probabilities");
    int pair_n = 6, pair_k = 3;
    std::int64_t pair_samples = 0, pair_budget = biasim::kDefaultEnumerationBudget;
    bool pair_skip_oracle = false;
    CommonOptions pair_common;
    pairing->add_option("--n", pair_n, "Ring size (coherence length)")->required();
    pairing->add_option("--k", pair_k, "Number of users")->required();
    pairing->add_option("--samples", pair_samples, "Monte Carlo samples (0 = off)");
    pairing->add_option("--budget", pair_budget, "Enumeration budget in tuples")
        ->check(CLI::PositiveNumber);
    pairing->add_flag("--skip-oracle", pair_skip_oracle, "Skip exhaustive enumeration");
    add_common(pairing, pair_common, "csv");

    // sweep-fig4
    auto* sweep = app.add_subcommand("sweep-fig4", "Lower-bound curves over K for several N");
    std::vector<int> sweep_n{12, 30, 30000};
    int sweep_kmin = 2, sweep_kmax = 10;
    std::int64_t sweep_samples = 100000, sweep_budget = biasim::kDefaultEnumerationBudget;
    bool sweep_exact = false, sweep_mc = false;
    CommonOptions sweep_common;
    sweep->add_option("--n-list", sweep_n, "Coherence lengths to sweep")->delimiter(',');
    sweep->add_option("--k-min", sweep_kmin, "Smallest K");
    sweep->add_option("--k-max", sweep_kmax, "Largest K");
    sweep->add_flag("--with-exact", sweep_exact, "Add exact probabilities where enumerable");
    sweep->add_flag("--with-mc", sweep_mc, "Add Monte Carlo estimates");
    sweep->add_option("--samples", sweep_samples, "Monte Carlo samples per point");
    sweep->add_option("--budget", sweep_budget, "Enumeration budget in tuples")
        ->check(CLI::PositiveNumber);
    add_common(sweep, sweep_common, "csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (schedule->parsed())
            return run_schedule(sched_n, sched_offset, sched_periods, sched_common, invocation);
        if (simulate->parsed())
            return run_simulate(sim_n, sim_offset, sim_low, sim_high, sim_step, sim_realizations,
                                sim_baseline, sim_common, invocation);
        if (pairing->parsed())
            return run_pairing(pair_n, pair_k, pair_samples, pair_skip_oracle, pair_budget,
                               pair_common, invocation);
        if (sweep->parsed())
            return run_sweep(sweep_n, sweep_kmin, sweep_kmax, sweep_exact, sweep_mc,
                             sweep_samples, sweep_budget, sweep_common, invocation);
    } catch (const biasim::InfeasibleOffset& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const biasim::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << " (use --skip-oracle or raise --budget)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
