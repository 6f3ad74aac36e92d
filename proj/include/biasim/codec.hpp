#ifndef BIASIM_CODEC_HPP
#define BIASIM_CODEC_HPP

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "biasim/fading.hpp"
#include "biasim/zpattern.hpp"

// Blind interference alignment over one type-Z block: fixed binary
// beamformers, transmit synthesis, alignment checking, zero-forcing decoding
// and rate/DoF estimation. Four symbols cross three slots, so the scheme
// targets a sum-rate slope of 4/3 per slot at high SNR.

namespace biasim {

using Vec3c = Eigen::Vector3cd;
using Vec3d = Eigen::Vector3d;
using Mat2c = Eigen::Matrix2cd;
using Mat32c = Eigen::Matrix<Complex, 3, 2>;

/// The four binary signaling vectors spanning one 3-slot block. v1/v2 feed
/// antenna 1, u1/u2 feed antenna 2; the choice depends only on the block's
/// orientation, never on coefficient values.
struct BeamformerSet {
    Vec3d v1, v2, u1, u2;
};

/// Two symbol streams per transmit antenna, unit average power each.
struct SymbolFrame {
    Complex s11, s12;  // antenna 1, streams 1 and 2
    Complex s21, s22;  // antenna 2, streams 1 and 2
};

/// One receiver's observations over the three slots of a block.
struct ReceivedFrame {
    Vec3c y = Vec3c::Zero();
    double noise_variance = 0.0;  // sigma^2 per complex dimension
};

/// Desired-signal map after interference nulling: y_projected = G * s + noise.
struct EffectiveChannel {
    Mat2c G = Mat2c::Zero();
    Vec3c interference_direction = Vec3c::Zero();  // unit norm
    Mat32c noise_basis = Mat32c::Zero();           // orthonormal basis of the complement
};

/// Beamformers for a type-Z orientation. Throws NotAZPattern for kNotZ.
BeamformerSet beamformers(Orientation orientation);

/// Per-slot antenna signals (3 slots x 2 antennas):
/// column 0 = v1*s11 + v2*s12, column 1 = u1*s21 + u2*s22.
Mat32c transmit(const SymbolFrame& frame, const BeamformerSet& bf);

/// Push the antenna signals through both users' channels and add AWGN of
/// variance sigma2 keyed by noise_seed. Entry k of frame j is
/// h_{1j}(n_k)*tx(k,0) + h_{2j}(n_k)*tx(k,1) + z_j(k).
std::array<ReceivedFrame, 2> propagate(const ChannelProcess& process,
                                       const std::array<CoherenceSchedule, 2>& schedules,
                                       const ZBlock& zblock, const Mat32c& tx, double sigma2,
                                       std::uint64_t noise_seed);

/// Channel vectors a receiver knows about itself: row k = [h_{1j}(n_k), h_{2j}(n_k)].
Mat32c csir_for(const ChannelProcess& process, const std::array<CoherenceSchedule, 2>& schedules,
                const ZBlock& zblock, int receiver);

/// Worst sine of the angle between the two interference pairs
/// (H11*v1 vs H21*u1 and H12*v2 vs H22*u2). Zero to rounding whenever the
/// beamformers match the block's orientation, for every coefficient draw.
double alignment_residual(const ChannelProcess& process,
                          const std::array<CoherenceSchedule, 2>& schedules, const ZBlock& zblock,
                          const BeamformerSet& bf);

/// Interference direction, orthonormal complement basis and projected 2x2
/// desired map at one receiver (0 or 1). Throws SingularEffectiveChannel when
/// the 2x2 map's condition number exceeds 1e12.
EffectiveChannel effective_channel(const Mat32c& csir, const BeamformerSet& bf, int receiver);

struct DecodeResult {
    Eigen::Vector2cd symbols;  // receiver 0: (s12, s22); receiver 1: (s11, s21)
    EffectiveChannel channel;
};

/// Project the received frame onto the interference null space and solve the
/// 2x2 system for the desired pair by least squares.
DecodeResult zf_decode(const ReceivedFrame& rx, const Mat32c& csir, const BeamformerSet& bf,
                       int receiver);

/// (R1 + R2)/3 bits per slot with R_j = log2 det(I + snr * G_j * G_j^H).
double sum_rate(const ChannelProcess& process, const std::array<CoherenceSchedule, 2>& schedules,
                const ZBlock& zblock, double snr);

/// Rate of the one-stream reference scheme (only v1 carries a symbol, decoded
/// at receiver 1 without interference): log2(1 + snr*|g|^2)/3 bits per slot.
double single_stream_rate(const ChannelProcess& process,
                          const std::array<CoherenceSchedule, 2>& schedules, const ZBlock& zblock,
                          double snr);

enum class DofScheme {
    kBlindAlignment,  // full two-user scheme, target slope 4/3
    kSingleStream,    // one symbol per block, target slope 1/3
};

struct DofEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::int64_t singular_skips = 0;
    int realizations_used = 0;
};

/// Mean high-SNR slope [R(high) - R(low)] / [log2(high) - log2(low)] over
/// independent channel realizations and over the plan's blocks. Realization r
/// draws its channel from (process.seed, seed, r), so the result is identical
/// for any worker count. Requires snr_high_db > snr_low_db >= 30.
DofEstimate estimate_dof(const ChannelProcess& process,
                         const std::array<CoherenceSchedule, 2>& schedules,
                         const DecompositionPlan& plan, double snr_low_db, double snr_high_db,
                         int realizations, std::uint64_t seed,
                         DofScheme scheme = DofScheme::kBlindAlignment, int threads = 1);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace biasim

#endif  // BIASIM_CODEC_HPP
