#include "biasim/codec.hpp"

#include <cmath>
#include <thread>
#include <vector>

namespace biasim {

namespace {

constexpr double kConditionCutoff = 1e12;

// Receiver j's interference rides on streams (v1, u1) for j=0 and (v2, u2)
// for j=1; the other pair carries its payload.
struct StreamSplit {
    Vec3d interf_a, interf_b;    // antenna 1 / antenna 2 interfering vectors
    Vec3d desired_a, desired_b;  // antenna 1 / antenna 2 desired vectors
};

StreamSplit split_streams(const BeamformerSet& bf, int receiver) {
    if (receiver == 0) return {bf.v1, bf.u1, bf.v2, bf.u2};
    return {bf.v2, bf.u2, bf.v1, bf.u1};
}

double sine_between(const Vec3c& x, const Vec3c& y) {
    // sin of the principal angle, via the orthogonal residual of the smaller
    // vector against the larger; exact collinearity gives ~1e-16.
    const Vec3c& a = (x.squaredNorm() >= y.squaredNorm()) ? x : y;
    const Vec3c& b = (x.squaredNorm() >= y.squaredNorm()) ? y : x;
    const double bn = b.norm();
    if (bn == 0.0) return 0.0;
    const Vec3c r = b - a * (a.dot(b) / a.squaredNorm());
    return r.norm() / bn;
}

}  // namespace

BeamformerSet beamformers(Orientation orientation) {
    const Vec3d leading(1, 1, 0);
    const Vec3d trailing(0, 1, 1);
    switch (orientation) {
        case Orientation::kRight: return {leading, trailing, leading, trailing};
        case Orientation::kLeft: return {trailing, leading, trailing, leading};
        case Orientation::kNotZ: break;
    }
    throw NotAZPattern("beamformers: slot triple is not a type-Z pattern");
}

Mat32c transmit(const SymbolFrame& frame, const BeamformerSet& bf) {
    Mat32c tx;
    tx.col(0) = bf.v1.cast<Complex>() * frame.s11 + bf.v2.cast<Complex>() * frame.s12;
    tx.col(1) = bf.u1.cast<Complex>() * frame.s21 + bf.u2.cast<Complex>() * frame.s22;
    return tx;
}

std::array<ReceivedFrame, 2> propagate(const ChannelProcess& process,
                                       const std::array<CoherenceSchedule, 2>& schedules,
                                       const ZBlock& zblock, const Mat32c& tx, double sigma2,
                                       std::uint64_t noise_seed) {
    std::array<ReceivedFrame, 2> out;
    const double noise_scale = std::sqrt(sigma2);
    const std::uint64_t base = rng::derive(rng::splitmix64(noise_seed), rng::kNoiseStream);
    for (int j = 0; j < 2; ++j) {
        out[j].noise_variance = sigma2;
        for (int k = 0; k < 3; ++k) {
            const Vec2c h = coefficients_at(process, schedules[j], j, zblock.slots[k]);
            Complex z{0.0, 0.0};
            if (sigma2 > 0.0) {
                const std::uint64_t key =
                    rng::derive(rng::derive(base, static_cast<std::uint64_t>(j)),
                                static_cast<std::uint64_t>(k));
                z = noise_scale * rng::complex_gaussian(key);
            }
            out[j].y[k] = h[0] * tx(k, 0) + h[1] * tx(k, 1) + z;
        }
    }
    return out;
}

Mat32c csir_for(const ChannelProcess& process, const std::array<CoherenceSchedule, 2>& schedules,
                const ZBlock& zblock, int receiver) {
    Mat32c csir;
    for (int k = 0; k < 3; ++k)
        csir.row(k) = coefficients_at(process, schedules[receiver], receiver, zblock.slots[k])
                          .transpose();
    return csir;
}

double alignment_residual(const ChannelProcess& process,
                          const std::array<CoherenceSchedule, 2>& schedules, const ZBlock& zblock,
                          const BeamformerSet& bf) {
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
        const Mat32c csir = csir_for(process, schedules, zblock, j);
        const StreamSplit split = split_streams(bf, j);
        const Vec3c ia = csir.col(0).cwiseProduct(split.interf_a.cast<Complex>());
        const Vec3c ib = csir.col(1).cwiseProduct(split.interf_b.cast<Complex>());
        worst = std::max(worst, sine_between(ia, ib));
    }
    return worst;
}

EffectiveChannel effective_channel(const Mat32c& csir, const BeamformerSet& bf, int receiver) {
    const StreamSplit split = split_streams(bf, receiver);

    const Vec3c ia = csir.col(0).cwiseProduct(split.interf_a.cast<Complex>());
    const Vec3c ib = csir.col(1).cwiseProduct(split.interf_b.cast<Complex>());

    EffectiveChannel eff;
    const Vec3c d = (ia.squaredNorm() >= ib.squaredNorm()) ? ia : ib;
    eff.interference_direction = d.normalized();

    // Complete the interference line to a unitary basis; the trailing two
    // columns span its orthogonal complement, so projected noise stays white.
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(eff.interference_direction);
    const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(3, 3);
    eff.noise_basis = q.rightCols(2);

    const Vec3c da = csir.col(0).cwiseProduct(split.desired_a.cast<Complex>());
    const Vec3c db = csir.col(1).cwiseProduct(split.desired_b.cast<Complex>());
    eff.G.col(0) = eff.noise_basis.adjoint() * da;
    eff.G.col(1) = eff.noise_basis.adjoint() * db;
    return eff;
}

DecodeResult zf_decode(const ReceivedFrame& rx, const Mat32c& csir, const BeamformerSet& bf,
                       int receiver) {
    DecodeResult result;
    result.channel = effective_channel(csir, bf, receiver);

    Eigen::JacobiSVD<Mat2c> svd(result.channel.G, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(1);
    const double smax = svd.singularValues()(0);
    if (smin == 0.0 || smax / smin > kConditionCutoff)
        throw SingularEffectiveChannel("zf_decode: effective channel condition number above 1e12");

    const Eigen::Vector2cd projected = result.channel.noise_basis.adjoint() * rx.y;
    result.symbols = svd.solve(projected);
    return result;
}

namespace {

double receiver_rate(const Mat2c& g, double snr) {
    const Mat2c gram = Mat2c::Identity() + snr * g * g.adjoint();
    return std::log2(gram.determinant().real());
}

}  // namespace

double sum_rate(const ChannelProcess& process, const std::array<CoherenceSchedule, 2>& schedules,
                const ZBlock& zblock, double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("sum_rate: snr must be positive");
    const BeamformerSet bf = beamformers(zblock.orientation);
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
        const Mat32c csir = csir_for(process, schedules, zblock, j);
        total += receiver_rate(effective_channel(csir, bf, j).G, snr);
    }
    return total / 3.0;
}

double single_stream_rate(const ChannelProcess& process,
                          const std::array<CoherenceSchedule, 2>& schedules, const ZBlock& zblock,
                          double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("single_stream_rate: snr must be positive");
    const BeamformerSet bf = beamformers(zblock.orientation);
    // Only s11 is sent; its target receiver hears it through the antenna-1
    // channel with no interference to null.
    const Mat32c csir = csir_for(process, schedules, zblock, 1);
    const Vec3c g = csir.col(0).cwiseProduct(bf.v1.cast<Complex>());
    return std::log2(1.0 + snr * g.squaredNorm()) / 3.0;
}

DofEstimate estimate_dof(const ChannelProcess& process,
                         const std::array<CoherenceSchedule, 2>& schedules,
                         const DecompositionPlan& plan, double snr_low_db, double snr_high_db,
                         int realizations, std::uint64_t seed, DofScheme scheme, int threads) {
    if (!(snr_low_db >= 30.0))
        throw std::invalid_argument("estimate_dof: snr_low_db must be >= 30 dB");
    if (!(snr_high_db > snr_low_db))
        throw std::invalid_argument("estimate_dof: snr_high_db must exceed snr_low_db");
    if (realizations < 1) throw std::invalid_argument("estimate_dof: realizations must be >= 1");
    if (plan.blocks.empty()) throw std::invalid_argument("estimate_dof: plan has no blocks");

    const double snr_low = db_to_linear(snr_low_db);
    const double snr_high = db_to_linear(snr_high_db);
    const double denom = std::log2(snr_high) - std::log2(snr_low);
    const std::uint64_t base = rng::derive(rng::splitmix64(process.seed), seed);

    // slope[r] is written by exactly one worker and reduced in index order, so
    // the estimate is bit-identical for any thread count.
    std::vector<double> slope(realizations, 0.0);
    std::vector<char> singular(realizations, 0);

    auto run_range = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            const ChannelProcess draw(rng::derive(base, static_cast<std::uint64_t>(r)),
                                      process.num_users);
            double acc = 0.0;
            try {
                for (const ZBlock& b : plan.blocks) {
                    const double r_low = scheme == DofScheme::kBlindAlignment
                                             ? sum_rate(draw, schedules, b, snr_low)
                                             : single_stream_rate(draw, schedules, b, snr_low);
                    const double r_high = scheme == DofScheme::kBlindAlignment
                                              ? sum_rate(draw, schedules, b, snr_high)
                                              : single_stream_rate(draw, schedules, b, snr_high);
                    acc += (r_high - r_low) / denom;
                }
                slope[r] = acc / static_cast<double>(plan.blocks.size());
            } catch (const SingularEffectiveChannel&) {
                singular[r] = 1;
            }
        }
    };

    const int workers = std::max(1, std::min(threads, realizations));
    if (workers == 1) {
        run_range(0, realizations);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (realizations + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(realizations, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }

    DofEstimate est;
    double sum = 0.0;
    for (int r = 0; r < realizations; ++r) {
        if (singular[r]) {
            ++est.singular_skips;
            continue;
        }
        sum += slope[r];
        ++est.realizations_used;
    }
    if (est.realizations_used == 0) return est;
    est.mean = sum / est.realizations_used;

    double ss = 0.0;
    for (int r = 0; r < realizations; ++r) {
        if (singular[r]) continue;
        const double d = slope[r] - est.mean;
        ss += d * d;
    }
    if (est.realizations_used > 1)
        est.std_err = std::sqrt(ss / (est.realizations_used - 1)) /
                      std::sqrt(static_cast<double>(est.realizations_used));
    return est;
}

}  // namespace biasim
