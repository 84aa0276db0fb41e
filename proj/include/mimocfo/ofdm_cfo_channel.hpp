#pragma once

#include <span>
#include <vector>

#include "mimocfo/linalg.hpp"
#include "mimocfo/rng.hpp"

namespace mimocfo {

// Normalized CFO: epsilon = N * dF * Ts, as a fraction of the inter-carrier
// spacing. |epsilon| < 0.5 so subcarriers keep their nominal assignment.
struct CfoParams {
    double epsilon = 0.0;
    int nfft = 0;
};

void validate(const CfoParams& cfo);

// One-sided noise spectral density; per-complex-sample variance is n0
// (n0/2 per real dimension). n0 = 0 means noiseless.
struct NoiseParams {
    double n0 = 0.0;
};

// Per-subcarrier MIMO channel, CN(0,1) entries, constant over the T OFDM
// symbols of one space-time block. draw() gives independent matrices per
// subcarrier; draw_flat() gives a frequency non-selective realization (one
// matrix shared by every subcarrier).
struct ChannelRealization {
    int mr = 0, mt = 0, nfft = 0;
    std::vector<CMat> h;  // nfft matrices, each (mr x mt)

    static ChannelRealization draw(int mr, int mt, int nfft, Rng& rng);
    static ChannelRealization draw_flat(int mr, int mt, int nfft, Rng& rng);
};

// Subcarrier leakage coefficient of the CFO, evaluated exactly as the
// Dirichlet-kernel closed form; the removable singularity at
// epsilon + (n - p) = 0 evaluates to 1.
cplx phi(int n, int p, const CfoParams& cfo);

// |phi|^2 per offset d = (n - p) mod N; sums to 1 over one period.
std::vector<double> ici_power_profile(const CfoParams& cfo);

/**
 * CFO-distorted transmission of one space-time block across all subcarriers:
 *
 *   Y[n] = phi(n,n) H[n] X[n] + sum_{p != n} phi(n,p) H[p] X[p] + W[n]
 *
 * with the 1/sqrt(M_T) transmit scaling applied and W i.i.d. CN(0, n0).
 * transmit_exact evaluates the O(N^2) sum and is the reference oracle;
 * transmit_fast does the same through FFTs and a time-domain phase ramp,
 * numerically equal when fed the same noise stream.
 */
std::vector<CMat> transmit_exact(std::span<const CMat> x_all, const ChannelRealization& ch,
                                 const CfoParams& cfo, const NoiseParams& noise, Rng& rng);
std::vector<CMat> transmit_fast(std::span<const CMat> x_all, const ChannelRealization& ch,
                                const CfoParams& cfo, const NoiseParams& noise, Rng& rng);

}  // namespace mimocfo
