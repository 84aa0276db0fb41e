#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mimocfo {

enum class CodeRate { R12, R34 };

CodeRate rate_from_name(std::string_view name);  // "1/2" | "3/4"
const char* to_string(CodeRate r);
double rate_value(CodeRate r);

// (133,171) octal, constraint length 7, terminated with 6 zero tail bits.
inline constexpr int kConvTailBits = 6;
inline constexpr unsigned kConvG0 = 0133;  // 1011011b
inline constexpr unsigned kConvG1 = 0171;  // 1111001b

// info bits -> coded bits, 2*(K + 6), pairs (g0, g1) per step
std::vector<uint8_t> conv_encode(std::span<const uint8_t> info);

// Rate 3/4 uses the DVB-T mask X:[1 0 1], Y:[1 1 0]; six coded bits
// (x1 y1 x2 y2 x3 y3) keep (x1, y1, y2, x3). Rate 1/2 is the identity.
std::vector<uint8_t> puncture(std::span<const uint8_t> coded, CodeRate rate);
std::vector<double> puncture_llr(std::span<const double> llr, CodeRate rate);
// inverse: zero LLRs (erasures) at the removed positions
std::vector<double> depuncture(std::span<const double> llr, CodeRate rate);
size_t punctured_length(size_t coded_len, CodeRate rate);

// Seeded uniform random permutation; the permutation depends only on
// (seed, length). interleave(x)[i] = x[perm[i]].
std::vector<uint32_t> interleaver_permutation(size_t length, uint64_t seed);

template <typename T>
std::vector<T> interleave(std::span<const T> x, std::span<const uint32_t> perm) {
    std::vector<T> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = x[perm[i]];
    return y;
}

template <typename T>
std::vector<T> deinterleave(std::span<const T> x, std::span<const uint32_t> perm) {
    std::vector<T> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[perm[i]] = x[i];
    return y;
}

struct SisoResult {
    std::vector<double> coded_extrinsic;   // 2*(K+6), apo minus input, clipped
    std::vector<double> info_aposteriori;  // K
};

/**
 * Soft-in/soft-out decoder over the 64-state trellis (BCJR), terminated at
 * state zero on both ends. coded_llr is the full rate-1/2 frame after
 * depuncturing; positive LLR means bit 0. Max-log by default; exact_log
 * switches to full log-MAP (used by oracle tests).
 */
SisoResult siso_decode(std::span<const double> coded_llr, int info_bits, bool exact_log = false);

inline constexpr double kLlrClip = 30.0;
inline double clip_llr(double x) {
    if (x > kLlrClip) return kLlrClip;
    if (x < -kLlrClip) return -kLlrClip;
    return x;
}

}  // namespace mimocfo
