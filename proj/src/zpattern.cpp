#include "biasim/zpattern.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace biasim {

std::string to_string(Orientation o) {
    switch (o) {
        case Orientation::kRight: return "RIGHT";
        case Orientation::kLeft: return "LEFT";
        case Orientation::kNotZ: return "NOT_Z";
    }
    return "NOT_Z";
}

int tau_of(int N, int offset) {
    return std::min(offset, N - offset);
}

bool feasible(int N, int offset) {
    return tau_of(N, offset) >= min_feasible_tau(N);
}

Orientation classify_triple(const CoherenceSchedule& sched1, const CoherenceSchedule& sched2,
                            std::int64_t n1, std::int64_t n2, std::int64_t n3) {
    const BlockIndex a1 = block_id(sched1, n1), a2 = block_id(sched1, n2), a3 = block_id(sched1, n3);
    const BlockIndex b1 = block_id(sched2, n1), b2 = block_id(sched2, n2), b3 = block_id(sched2, n3);
    if (a1 == a2 && a2 != a3 && b1 != b2 && b2 == b3) return Orientation::kRight;
    if (a1 != a2 && a2 == a3 && b1 == b2 && b2 != b3) return Orientation::kLeft;
    return Orientation::kNotZ;
}

std::int64_t DecompositionPlan::window_start() const {
    const std::int64_t base = (offset <= N / 2) ? N - tau : 2 * std::int64_t{offset} - N;
    return base + 3 * std::int64_t{N} * period;
}

namespace {

// The window splits into seven runs on which the (user-1 block, user-2 block)
// pair is constant; segment k starts at seg[k] and has length len[k].
struct Segments {
    std::array<std::int64_t, 7> start{};
    std::array<int, 7> len{};
};

Segments carve_segments(int N, int tau, std::int64_t m0) {
    Segments s;
    s.len = {tau, tau, N - tau, tau, N - tau, tau, N - 2 * tau};
    std::int64_t at = m0;
    for (int k = 0; k < 7; ++k) {
        s.start[k] = at;
        at += s.len[k];
    }
    return s;
}

}  // namespace

DecompositionPlan decompose_period(int N, int offset, std::int64_t period) {
    if (!feasible(N, offset))
        throw InfeasibleOffset("decompose_period: tau=" + std::to_string(tau_of(N, offset)) +
                               " < ceil(N/3)=" + std::to_string(min_feasible_tau(N)) +
                               " for N=" + std::to_string(N) +
                               ", offset=" + std::to_string(offset));

    const int tau = tau_of(N, offset);
    // Canonical grid: the zero-offset link on top, the tau-offset link below.
    // When offset > floor(N/2) the roles are mirrored: run the construction in
    // coordinates shifted by (offset - N), where user 2 is the top link, and
    // map slots back. Orientations flip with the roles.
    const bool mirrored = offset > N / 2;
    const std::int64_t shift = mirrored ? std::int64_t{offset} - N : 0;

    const std::int64_t m0 = (N - tau) + 3 * std::int64_t{N} * period;
    const Segments seg = carve_segments(N, tau, m0);

    const CoherenceSchedule sched1(N, 0);
    const CoherenceSchedule sched2(N, offset);

    DecompositionPlan plan;
    plan.N = N;
    plan.offset = offset;
    plan.period = period;
    plan.tau = tau;
    plan.family_counts = {tau, N - 2 * tau, 3 * tau - N, N - 2 * tau};
    plan.blocks.reserve(N);

    const Orientation straight = mirrored ? Orientation::kRight : Orientation::kLeft;
    const Orientation crossed = mirrored ? Orientation::kLeft : Orientation::kRight;

    auto emit = [&](std::int64_t m1, std::int64_t m2, std::int64_t m3, Orientation o) {
        ZBlock b;
        b.slots = {m1 + shift, m2 + shift, m3 + shift};
        b.orientation = o;
        for (int k = 0; k < 3; ++k) {
            b.user_blocks[0][k] = block_id(sched1, b.slots[k]);
            b.user_blocks[1][k] = block_id(sched2, b.slots[k]);
        }
        plan.blocks.push_back(b);
    };

    const int n2t = N - 2 * tau;  // phi/theta family size
    const int o3t = 3 * tau - N;  // omega family size

    for (int k = 0; k < tau; ++k)
        emit(seg.start[0] + k, seg.start[1] + k, seg.start[2] + k, straight);
    for (int k = 0; k < n2t; ++k)
        emit(seg.start[2] + tau + k, seg.start[3] + k, seg.start[4] + k, straight);
    for (int k = 0; k < o3t; ++k)
        emit(seg.start[3] + n2t + k, seg.start[4] + n2t + k, seg.start[5] + k, crossed);
    for (int k = 0; k < n2t; ++k)
        emit(seg.start[4] + tau + k, seg.start[5] + o3t + k, seg.start[6] + k, straight);

    return plan;
}

PlanValidation validate_plan(const DecompositionPlan& plan, const CoherenceSchedule& sched1,
                             const CoherenceSchedule& sched2) {
    using Failure = PlanValidation::Failure;
    auto fail = [](Failure f, std::string detail) {
        return PlanValidation{false, f, std::move(detail)};
    };

    if (plan.N < 1 || plan.offset < 0 || plan.offset >= plan.N)
        return fail(Failure::kShape, "plan header out of range");
    if (static_cast<int>(plan.blocks.size()) != plan.N)
        return fail(Failure::kShape, "expected " + std::to_string(plan.N) + " blocks, got " +
                                         std::to_string(plan.blocks.size()));

    // Family count formulas.
    const int tau = tau_of(plan.N, plan.offset);
    const FamilyCounts expected{tau, plan.N - 2 * tau, 3 * tau - plan.N, plan.N - 2 * tau};
    if (plan.tau != tau)
        return fail(Failure::kCounts, "tau mismatch: plan says " + std::to_string(plan.tau) +
                                          ", schedule gives " + std::to_string(tau));
    if (!(plan.family_counts == expected) || expected.total() != plan.N)
        return fail(Failure::kCounts, "family counts disagree with (tau, N-2tau, 3tau-N, N-2tau)");

    // Exact coverage of the period window.
    const std::int64_t w0 = plan.window_start();
    std::vector<std::int64_t> slots;
    slots.reserve(3 * plan.blocks.size());
    for (const ZBlock& b : plan.blocks)
        slots.insert(slots.end(), b.slots.begin(), b.slots.end());
    std::sort(slots.begin(), slots.end());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i] != w0 + static_cast<std::int64_t>(i))
            return fail(Failure::kCoverage,
                        "window slot " + std::to_string(w0 + static_cast<std::int64_t>(i)) +
                            " missing or duplicated");
    }

    // Per-block classification and stored block labels.
    int lefts = 0;
    for (std::size_t i = 0; i < plan.blocks.size(); ++i) {
        const ZBlock& b = plan.blocks[i];
        if (!(b.slots[0] < b.slots[1] && b.slots[1] < b.slots[2]))
            return fail(Failure::kShape, "block " + std::to_string(i) + " slots not increasing");
        const Orientation got =
            classify_triple(sched1, sched2, b.slots[0], b.slots[1], b.slots[2]);
        if (got != b.orientation || got == Orientation::kNotZ)
            return fail(Failure::kClassification,
                        "block " + std::to_string(i) + " declared " + to_string(b.orientation) +
                            " but classifies as " + to_string(got));
        for (int k = 0; k < 3; ++k) {
            if (b.user_blocks[0][k] != block_id(sched1, b.slots[k]) ||
                b.user_blocks[1][k] != block_id(sched2, b.slots[k]))
                return fail(Failure::kClassification,
                            "block " + std::to_string(i) + " stores wrong block labels");
        }
        lefts += (b.orientation == Orientation::kLeft) ? 1 : 0;
    }
    const bool mirrored = plan.offset > plan.N / 2;
    const int expected_lefts =
        mirrored ? expected.omega : expected.gamma + expected.phi + expected.theta;
    if (lefts != expected_lefts)
        return fail(Failure::kClassification,
                    "orientation totals disagree with family counts: " + std::to_string(lefts) +
                        " LEFT blocks, expected " + std::to_string(expected_lefts));

    return {};
}

std::string plan_to_json(const DecompositionPlan& plan, int indent) {
    nlohmann::ordered_json j;
    j["N"] = plan.N;
    j["offset"] = plan.offset;
    j["period"] = plan.period;
    j["tau"] = plan.tau;
    j["familyCounts"] = {{"gamma", plan.family_counts.gamma},
                         {"phi", plan.family_counts.phi},
                         {"omega", plan.family_counts.omega},
                         {"theta", plan.family_counts.theta}};
    auto& blocks = j["blocks"] = nlohmann::ordered_json::array();
    for (const ZBlock& b : plan.blocks) {
        nlohmann::ordered_json jb;
        jb["slots"] = b.slots;
        jb["orientation"] = to_string(b.orientation);
        blocks.push_back(std::move(jb));
    }
    return j.dump(indent);
}

}  // namespace biasim
