#include "mimocfo/ofdm_cfo_channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mimocfo {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// radix-2 iterative FFT, in place; inverse includes the 1/N factor
void fft_inplace(std::vector<cplx>& a, bool inverse) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (cplx& x : a) x *= inv;
    }
}

void check_inputs(std::span<const CMat> x_all, const ChannelRealization& ch, const CfoParams& cfo) {
    validate(cfo);
    if (ch.nfft != cfo.nfft || x_all.size() != static_cast<size_t>(cfo.nfft))
        throw std::invalid_argument("transmit: subcarrier count mismatch");
    for (const CMat& x : x_all)
        if (x.rows != ch.mt) throw std::invalid_argument("transmit: X antenna count mismatch");
}

void add_noise(std::vector<CMat>& y_all, double n0, Rng& rng) {
    if (n0 <= 0.0) return;
    for (CMat& y : y_all)
        for (cplx& v : y.a) v += rng.cgaussian(n0);
}

}  // namespace

void validate(const CfoParams& cfo) {
    if (!is_pow2(cfo.nfft)) throw std::invalid_argument("nfft must be a power of two");
    if (!(std::abs(cfo.epsilon) < 0.5)) throw std::invalid_argument("|epsilon| must be < 0.5");
}

ChannelRealization ChannelRealization::draw(int mr, int mt, int nfft, Rng& rng) {
    ChannelRealization ch;
    ch.mr = mr;
    ch.mt = mt;
    ch.nfft = nfft;
    ch.h.reserve(nfft);
    for (int n = 0; n < nfft; ++n) {
        CMat m(mr, mt);
        for (cplx& v : m.a) v = rng.cgaussian(1.0);
        ch.h.push_back(std::move(m));
    }
    return ch;
}

ChannelRealization ChannelRealization::draw_flat(int mr, int mt, int nfft, Rng& rng) {
    ChannelRealization ch;
    ch.mr = mr;
    ch.mt = mt;
    ch.nfft = nfft;
    CMat m(mr, mt);
    for (cplx& v : m.a) v = rng.cgaussian(1.0);
    ch.h.assign(nfft, m);
    return ch;
}

cplx phi(int n, int p, const CfoParams& cfo) {
    const double nn = static_cast<double>(cfo.nfft);
    const double a = cfo.epsilon + static_cast<double>(n - p);
    if (a == 0.0) return {1.0, 0.0};
    const double mag = std::sin(kPi * a) / (nn * std::sin(kPi * a / nn));
    const double ang = kPi * (nn - 1.0) / nn * a;
    return {mag * std::cos(ang), mag * std::sin(ang)};
}

std::vector<double> ici_power_profile(const CfoParams& cfo) {
    validate(cfo);
    std::vector<double> prof(cfo.nfft);
    for (int d = 0; d < cfo.nfft; ++d) prof[d] = std::norm(phi(d, 0, cfo));
    return prof;
}

std::vector<CMat> transmit_exact(std::span<const CMat> x_all, const ChannelRealization& ch,
                                 const CfoParams& cfo, const NoiseParams& noise, Rng& rng) {
    check_inputs(x_all, ch, cfo);
    const int n = cfo.nfft;
    const int t_slots = x_all[0].cols;
    const double txs = 1.0 / std::sqrt(static_cast<double>(ch.mt));

    // per-subcarrier products Z[p] = H[p] X[p] / sqrt(M_T)
    std::vector<CMat> z(n);
    for (int p = 0; p < n; ++p) {
        z[p] = ch.h[p] * x_all[p];
        for (cplx& v : z[p].a) v *= txs;
    }

    std::vector<CMat> y(n);
    for (int k = 0; k < n; ++k) {
        CMat acc(ch.mr, t_slots);
        for (int p = 0; p < n; ++p) {
            const cplx c = phi(k, p, cfo);
            for (size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += c * z[p].a[i];
        }
        y[k] = std::move(acc);
    }
    add_noise(y, noise.n0, rng);
    return y;
}

std::vector<CMat> transmit_fast(std::span<const CMat> x_all, const ChannelRealization& ch,
                                const CfoParams& cfo, const NoiseParams& noise, Rng& rng) {
    check_inputs(x_all, ch, cfo);
    const int n = cfo.nfft;
    const int t_slots = x_all[0].cols;
    const double txs = 1.0 / std::sqrt(static_cast<double>(ch.mt));

    // time-domain phase ramp equivalent to the phi(n,p) kernel
    std::vector<cplx> ramp(n);
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * kPi * cfo.epsilon * k / n;
        ramp[k] = {std::cos(ang), std::sin(ang)};
    }

    std::vector<CMat> y(n);
    for (int k = 0; k < n; ++k) y[k] = CMat(ch.mr, t_slots);

    std::vector<cplx> lane(n);
    for (int j = 0; j < ch.mr; ++j)
        for (int t = 0; t < t_slots; ++t) {
            for (int p = 0; p < n; ++p) {
                cplx acc{0.0, 0.0};
                for (int i = 0; i < ch.mt; ++i) acc += ch.h[p](j, i) * x_all[p](i, t);
                lane[p] = acc * txs;
            }
            fft_inplace(lane, false);
            for (int k = 0; k < n; ++k) lane[k] *= ramp[k];
            fft_inplace(lane, true);
            for (int k = 0; k < n; ++k) y[k](j, t) = lane[k];
        }
    add_noise(y, noise.n0, rng);
    return y;
}

}  // namespace mimocfo
