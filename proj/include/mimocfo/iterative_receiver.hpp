#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimocfo/constellation.hpp"
#include "mimocfo/fec.hpp"
#include "mimocfo/realify.hpp"
#include "mimocfo/stcodes.hpp"

namespace mimocfo {

/**
 * Everything needed to lay one coded frame onto the space-time/OFDM grid and
 * to detect it again. A frame fills `chunks` whole grids of nfft subcarriers
 * by T OFDM symbols, so every subcarrier carries data (the ICI model needs
 * full loading).
 */
struct FramePlan {
    const StScheme* scheme = nullptr;
    Constellation constel = Constellation::qam(4);
    CodeRate rate = CodeRate::R12;
    int info_bits = 0;
    uint64_t interleaver_seed = 0;
    int nfft = 0;
    int chunks = 0;
    bool exact_log_map = false;  // full log-MAP in the SISO decoder

    int coded_bits() const { return 2 * (info_bits + kConvTailBits); }
    size_t punctured_bits() const { return punctured_length(coded_bits(), rate); }
    int total_blocks() const { return chunks * nfft; }
    int total_symbols() const { return total_blocks() * scheme->q; }
    int bits_per_block() const { return scheme->q * constel.bits_per_symbol(); }
};

// per-component detector statistics for one subcarrier block
struct DetectorOutput {
    std::vector<double> s_hat;      // 2Q estimated real/imag components
    std::vector<double> bias_gain;  // effective amplitude per component
    std::vector<double> resid_var;  // residual variance per component
};

enum class LlrRole { DemapperExtrinsic, DecoderExtrinsic, Aposteriori };

struct LlrFrame {
    std::vector<double> values;  // positive means bit 0; |v| <= 30
    LlrRole role = LlrRole::DemapperExtrinsic;
};

// First-iteration linear detection:
//   s_hat_u = g_u^T (G G^T + sigma^2 I)^-1 y,  gain_u = g_u^T (...)^-1 g_u,
//   resid_var_u = gain_u (1 - gain_u) Es + floor.
// sigma^2 = 0 with a rank-deficient G is regularized by a 1e-12 floor.
DetectorOutput mmse_detect(const RealifiedSystem& sys);

// Parallel interference cancellation plus inverse filtering for component u:
// subtract everyone else's soft estimate, then matched-filter.
double pic_detect(const RealifiedSystem& sys, std::span<const double> s_tilde, int u);

// PIC over all components, with residual variances built from the soft
// symbol variances plus thermal noise. A zero-norm column is an erasure
// (gain 1, huge variance, so its LLRs come out 0).
DetectorOutput pic_detect_all(const RealifiedSystem& sys, std::span<const double> s_tilde,
                              std::span<const double> s_tilde_var);

// Max-log demapping of one PAM dimension: z observed, `gain` the effective
// amplitude, `var` the residual variance, `apriori` (bits_per_dim LLRs, may
// be null). Writes bits_per_dim LLRs; extrinsic when apriori is present.
void demap_dim(double z, double gain, double var, const Constellation& c,
               const double* apriori, double* out);

// Bitwise-independent soft symbol expectation for one PAM dimension.
void soft_map_dim(const Constellation& c, const double* llr, double& mean, double& var);

// Block-level wrappers over the per-dimension cores. Bit order inside a
// block: symbol-major, I bits then Q bits (component 2q is Re s_q and
// carries the I bits, component 2q+1 the Q bits).
LlrFrame demap_llr(const DetectorOutput& det, const Constellation& c, const LlrFrame* apriori);
void soft_map(const LlrFrame& extrinsic, const Constellation& c,
              std::vector<double>& s_tilde, std::vector<double>& s_tilde_var);

struct DetectDiag {
    std::vector<long long> iter_info_errors;  // vs true info bits, per iteration
    std::vector<double> iter_mean_abs_ext;    // mean |demapper extrinsic| per iteration
};

/**
 * Full receiver: MMSE first pass, then PIC fed by the soft mapper from the
 * decoder's interleaved extrinsics, a SISO decoding pass per iteration, hard
 * decisions from the final info a-posteriori LLRs. `systems` is indexed by
 * block = chunk * nfft + subcarrier.
 */
std::vector<uint8_t> detect_frame(const FramePlan& plan, std::span<const RealifiedSystem> systems,
                                  int iterations, const uint8_t* true_info = nullptr,
                                  DetectDiag* diag = nullptr);

}  // namespace mimocfo
