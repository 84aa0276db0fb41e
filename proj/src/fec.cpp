#include "mimocfo/fec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mimocfo/rng.hpp"

namespace mimocfo {

namespace {

constexpr int kStates = 64;
constexpr double kMinf = -1e30;

struct Trellis {
    // state = last six input bits, newest in the high bit
    std::array<std::array<int, 2>, kStates> next;
    std::array<std::array<int, 2>, kStates> c0, c1;

    Trellis() {
        for (int s = 0; s < kStates; ++s)
            for (int b = 0; b < 2; ++b) {
                const unsigned w = (static_cast<unsigned>(b) << 6) | static_cast<unsigned>(s);
                next[s][b] = static_cast<int>(w >> 1);
                c0[s][b] = std::popcount(w & kConvG0) & 1;
                c1[s][b] = std::popcount(w & kConvG1) & 1;
            }
    }
};

const Trellis& trellis() {
    static const Trellis t;
    return t;
}

// 3/4 mask over one period of six coded bits
constexpr std::array<int, 4> kKeep34 = {0, 1, 3, 4};

double maxstar(double a, double b, bool exact) {
    const double m = std::max(a, b);
    if (!exact) return m;
    const double d = std::abs(a - b);
    return m + std::log1p(std::exp(-d));
}

}  // namespace

CodeRate rate_from_name(std::string_view name) {
    if (name == "1/2") return CodeRate::R12;
    if (name == "3/4") return CodeRate::R34;
    throw std::invalid_argument("unknown code rate: " + std::string(name));
}

const char* to_string(CodeRate r) { return r == CodeRate::R12 ? "1/2" : "3/4"; }

double rate_value(CodeRate r) { return r == CodeRate::R12 ? 0.5 : 0.75; }

std::vector<uint8_t> conv_encode(std::span<const uint8_t> info) {
    if (info.empty()) throw std::invalid_argument("conv_encode: empty frame");
    const Trellis& tr = trellis();
    std::vector<uint8_t> out;
    out.reserve(2 * (info.size() + kConvTailBits));
    int state = 0;
    for (size_t k = 0; k < info.size() + kConvTailBits; ++k) {
        const int b = k < info.size() ? (info[k] & 1) : 0;
        out.push_back(static_cast<uint8_t>(tr.c0[state][b]));
        out.push_back(static_cast<uint8_t>(tr.c1[state][b]));
        state = tr.next[state][b];
    }
    return out;
}

size_t punctured_length(size_t coded_len, CodeRate rate) {
    if (rate == CodeRate::R12) return coded_len;
    if (coded_len % 6 != 0) throw std::invalid_argument("puncture: length not a multiple of 6");
    return coded_len / 6 * 4;
}

template <typename T>
static std::vector<T> puncture_impl(std::span<const T> coded, CodeRate rate) {
    if (rate == CodeRate::R12) return std::vector<T>(coded.begin(), coded.end());
    if (coded.size() % 6 != 0) throw std::invalid_argument("puncture: length not a multiple of 6");
    std::vector<T> out;
    out.reserve(coded.size() / 6 * 4);
    for (size_t g = 0; g < coded.size(); g += 6)
        for (int k : kKeep34) out.push_back(coded[g + k]);
    return out;
}

std::vector<uint8_t> puncture(std::span<const uint8_t> coded, CodeRate rate) {
    return puncture_impl(coded, rate);
}

std::vector<double> puncture_llr(std::span<const double> llr, CodeRate rate) {
    return puncture_impl(llr, rate);
}

std::vector<double> depuncture(std::span<const double> llr, CodeRate rate) {
    if (rate == CodeRate::R12) return std::vector<double>(llr.begin(), llr.end());
    if (llr.size() % 4 != 0) throw std::invalid_argument("depuncture: length not a multiple of 4");
    std::vector<double> out(llr.size() / 4 * 6, 0.0);
    size_t i = 0;
    for (size_t g = 0; g < out.size(); g += 6)
        for (int k : kKeep34) out[g + k] = llr[i++];
    return out;
}

std::vector<uint32_t> interleaver_permutation(size_t length, uint64_t seed) {
    std::vector<uint32_t> perm(length);
    for (size_t i = 0; i < length; ++i) perm[i] = static_cast<uint32_t>(i);
    Rng rng = Rng::derive(seed, 0x496e746cull, length);
    for (size_t i = length; i > 1; --i) {
        const size_t j = rng.below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

SisoResult siso_decode(std::span<const double> coded_llr, int info_bits, bool exact_log) {
    const Trellis& tr = trellis();
    const int steps = info_bits + kConvTailBits;
    if (coded_llr.size() != static_cast<size_t>(2 * steps))
        throw std::invalid_argument("siso_decode: LLR frame length mismatch");

    // branch metric: log p(c) up to a constant, gamma = sum (1-2c) L/2
    auto gamma = [&](int k, int s, int b) {
        const double l0 = coded_llr[2 * k];
        const double l1 = coded_llr[2 * k + 1];
        return 0.5 * ((1 - 2 * tr.c0[s][b]) * l0 + (1 - 2 * tr.c1[s][b]) * l1);
    };

    std::vector<double> alpha(static_cast<size_t>(steps + 1) * kStates, kMinf);
    std::vector<double> beta(static_cast<size_t>(steps + 1) * kStates, kMinf);
    alpha[0] = 0.0;
    beta[static_cast<size_t>(steps) * kStates] = 0.0;  // terminated

    for (int k = 0; k < steps; ++k) {
        const int nb = k < info_bits ? 2 : 1;  // tail forces input 0
        double* ak = &alpha[static_cast<size_t>(k) * kStates];
        double* an = &alpha[static_cast<size_t>(k + 1) * kStates];
        double mx = kMinf;
        for (int s = 0; s < kStates; ++s) {
            if (ak[s] <= kMinf) continue;
            for (int b = 0; b < nb; ++b) {
                const double m = ak[s] + gamma(k, s, b);
                double& dst = an[tr.next[s][b]];
                dst = exact_log && dst > kMinf ? maxstar(dst, m, true) : std::max(dst, m);
            }
        }
        for (int s = 0; s < kStates; ++s) mx = std::max(mx, an[s]);
        for (int s = 0; s < kStates; ++s)
            if (an[s] > kMinf) an[s] -= mx;
    }

    for (int k = steps - 1; k >= 0; --k) {
        const int nb = k < info_bits ? 2 : 1;
        const double* bn = &beta[static_cast<size_t>(k + 1) * kStates];
        double* bk = &beta[static_cast<size_t>(k) * kStates];
        double mx = kMinf;
        for (int s = 0; s < kStates; ++s) {
            double acc = kMinf;
            for (int b = 0; b < nb; ++b) {
                const double nxt = bn[tr.next[s][b]];
                if (nxt <= kMinf) continue;
                const double m = gamma(k, s, b) + nxt;
                acc = exact_log && acc > kMinf ? maxstar(acc, m, true) : std::max(acc, m);
            }
            bk[s] = acc;
            mx = std::max(mx, acc);
        }
        if (mx > kMinf)
            for (int s = 0; s < kStates; ++s)
                if (bk[s] > kMinf) bk[s] -= mx;
    }

    SisoResult res;
    res.coded_extrinsic.assign(2 * static_cast<size_t>(steps), 0.0);
    res.info_aposteriori.assign(info_bits, 0.0);

    for (int k = 0; k < steps; ++k) {
        const int nb = k < info_bits ? 2 : 1;
        const double* ak = &alpha[static_cast<size_t>(k) * kStates];
        const double* bn = &beta[static_cast<size_t>(k + 1) * kStates];
        double m_c0[2] = {kMinf, kMinf};  // coded bit 0 value {0,1}
        double m_c1[2] = {kMinf, kMinf};
        double m_in[2] = {kMinf, kMinf};
        for (int s = 0; s < kStates; ++s) {
            if (ak[s] <= kMinf) continue;
            for (int b = 0; b < nb; ++b) {
                const double nxt = bn[tr.next[s][b]];
                if (nxt <= kMinf) continue;
                const double m = ak[s] + gamma(k, s, b) + nxt;
                auto fold = [&](double& slot) {
                    slot = exact_log && slot > kMinf ? maxstar(slot, m, true) : std::max(slot, m);
                };
                fold(m_c0[tr.c0[s][b]]);
                fold(m_c1[tr.c1[s][b]]);
                fold(m_in[b]);
            }
        }
        const double apo0 = m_c0[0] - m_c0[1];
        const double apo1 = m_c1[0] - m_c1[1];
        res.coded_extrinsic[2 * k] = clip_llr(apo0 - coded_llr[2 * k]);
        res.coded_extrinsic[2 * k + 1] = clip_llr(apo1 - coded_llr[2 * k + 1]);
        if (k < info_bits) res.info_aposteriori[k] = m_in[0] - m_in[1];
    }
    return res;
}

}  // namespace mimocfo
