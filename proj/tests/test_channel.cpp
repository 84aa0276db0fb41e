#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mimocfo/ofdm_cfo_channel.hpp"
#include "mimocfo/rng.hpp"
#include "mimocfo/stcodes.hpp"

using namespace mimocfo;

namespace {

std::vector<CMat> random_blocks(int nfft, int mt, int t, Rng& rng) {
    std::vector<CMat> x(nfft);
    for (auto& m : x) {
        m = CMat(mt, t);
        for (auto& v : m.a) v = rng.cgaussian(1.0);
    }
    return x;
}

double max_rel_dev(const std::vector<CMat>& a, const std::vector<CMat>& b) {
    double num = 0.0, den = 0.0;
    for (size_t n = 0; n < a.size(); ++n)
        for (size_t i = 0; i < a[n].a.size(); ++i) {
            num = std::max(num, std::abs(a[n].a[i] - b[n].a[i]));
            den = std::max(den, std::abs(a[n].a[i]));
        }
    return num / den;
}

}  // namespace

TEST_CASE("phi at zero CFO is a Kronecker delta") {
    const CfoParams cfo{0.0, 64};
    for (int n : {0, 5, 63}) {
        CHECK(phi(n, n, cfo) == cplx{1.0, 0.0});
        for (int p = 0; p < 64; ++p)
            if (p != n) CHECK(std::abs(phi(n, p, cfo)) < 1e-14);
    }
}

TEST_CASE("phi(n,n) magnitude matches the closed form, eps=0.05, N=2048") {
    const CfoParams cfo{0.05, 2048};
    CHECK(std::abs(phi(100, 100, cfo)) == doctest::Approx(0.995892736219991).epsilon(1e-12));
    // approximately sinc(eps) for large N
    const double sinc = std::sin(M_PI * 0.05) / (M_PI * 0.05);
    CHECK(std::abs(phi(0, 0, cfo)) == doctest::Approx(sinc).epsilon(1e-5));
}

TEST_CASE("phi depends on n - p only") {
    const CfoParams cfo{0.13, 256};
    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        const int d = static_cast<int>(rng.below(40)) - 20;
        const int n1 = 20 + static_cast<int>(rng.below(200));
        const int n2 = 20 + static_cast<int>(rng.below(200));
        const cplx a = phi(n1, n1 - d, cfo);
        const cplx b = phi(n2, n2 - d, cfo);
        CHECK(std::abs(a - b) < 1e-14);
    }
}

TEST_CASE("power conservation: sum_p |phi(n,p)|^2 = 1") {
    for (int nfft : {16, 64, 256, 2048})
        for (double eps : {0.0, 0.01, 0.05, 0.3, 0.49}) {
            const CfoParams cfo{eps, nfft};
            const auto prof = ici_power_profile(cfo);
            double sum = 0.0;
            for (double v : prof) sum += v;
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
}

TEST_CASE("ici power profile shape") {
    const CfoParams none{0.0, 64};
    const auto p0 = ici_power_profile(none);
    CHECK(p0[0] == doctest::Approx(1.0));
    for (int d = 1; d < 64; ++d) CHECK(p0[d] < 1e-25);

    const CfoParams cfo{0.05, 64};
    const auto p = ici_power_profile(cfo);
    CHECK(p[0] < 1.0);
    double ici = 0.0;
    for (int d = 1; d < 64; ++d) ici += p[d];
    CHECK(ici == doctest::Approx(1.0 - p[0]).epsilon(1e-12));
}

TEST_CASE("channel draw statistics: unit-variance entries") {
    Rng rng(7);
    double acc = 0.0;
    long cnt = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto ch = ChannelRealization::draw(2, 2, 256, rng);
        for (const auto& m : ch.h)
            for (const auto& v : m.a) {
                acc += std::norm(v);
                ++cnt;
            }
    }
    CHECK(cnt >= 1000000);
    CHECK(acc / cnt == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("noise calibration: injected variance within 1%") {
    Rng rng(9);
    const double n0 = 0.42;
    double acc = 0.0;
    long cnt = 0;
    CMat zero(2, 2);
    std::vector<CMat> x(64, zero);
    ChannelRealization ch;
    ch.mr = 2;
    ch.mt = 2;
    ch.nfft = 64;
    ch.h.assign(64, CMat(2, 2));
    for (int t = 0; t < 4000; ++t) {
        const auto y = transmit_fast(x, ch, CfoParams{0.0, 64}, NoiseParams{n0}, rng);
        for (const auto& m : y)
            for (const auto& v : m.a) {
                acc += std::norm(v);
                ++cnt;
            }
    }
    CHECK(cnt >= 1000000);
    CHECK(acc / cnt == doctest::Approx(n0).epsilon(0.01));
}

TEST_CASE("eps=0 noiseless collapses to per-subcarrier product with 1/sqrt(Mt)") {
    Rng rng(11);
    const int nfft = 32;
    const auto ch = ChannelRealization::draw(2, 2, nfft, rng);
    const auto x = random_blocks(nfft, 2, 2, rng);
    Rng nr(0);
    const auto y = transmit_exact(x, ch, CfoParams{0.0, nfft}, NoiseParams{0.0}, nr);
    const double s = 1.0 / std::sqrt(2.0);
    for (int n = 0; n < nfft; ++n) {
        const CMat hx = ch.h[n] * x[n];
        for (size_t i = 0; i < hx.a.size(); ++i)
            CHECK(std::abs(y[n].a[i] - s * hx.a[i]) < 1e-12);
    }
}

TEST_CASE("single active subcarrier leaks with the Dirichlet profile") {
    Rng rng(13);
    const int nfft = 64;
    const CfoParams cfo{0.07, nfft};
    const auto ch = ChannelRealization::draw(2, 2, nfft, rng);
    std::vector<CMat> x(nfft, CMat(2, 1));
    const int n0 = 17;
    for (auto& v : x[n0].a) v = rng.cgaussian(1.0);
    Rng nr(0);
    const auto y = transmit_exact(x, ch, cfo, NoiseParams{0.0}, nr);
    const double s = 1.0 / std::sqrt(2.0);
    const CMat hx = ch.h[n0] * x[n0];
    for (int n = 0; n < nfft; ++n) {
        const cplx c = phi(n, n0, cfo) * s;
        for (size_t i = 0; i < hx.a.size(); ++i)
            CHECK(std::abs(y[n].a[i] - c * hx.a[i]) < 1e-12);
    }
}

TEST_CASE("fast path equals the exact sum") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int nfft = 64;
        const double eps = trial % 2 ? 0.02 : -0.31;
        const CfoParams cfo{eps, nfft};
        const auto ch = ChannelRealization::draw(2, 2, nfft, rng);
        const auto x = random_blocks(nfft, 2, 2, rng);

        Rng na(12345 + trial), nb(12345 + trial);
        const auto ye = transmit_exact(x, ch, cfo, NoiseParams{0.1}, na);
        const auto yf = transmit_fast(x, ch, cfo, NoiseParams{0.1}, nb);
        CHECK(max_rel_dev(ye, yf) < 1e-9);

        // energy agreement, noiseless
        Rng nz(0);
        const auto y0e = transmit_exact(x, ch, cfo, NoiseParams{0.0}, nz);
        const auto y0f = transmit_fast(x, ch, cfo, NoiseParams{0.0}, nz);
        double ee = 0.0, ef = 0.0;
        for (int n = 0; n < nfft; ++n) {
            ee += frob_norm_sq(y0e[n]);
            ef += frob_norm_sq(y0f[n]);
        }
        CHECK(ee == doctest::Approx(ef).epsilon(1e-9));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(CfoParams{0.0, 100}), std::invalid_argument);   // not a power of 2
    CHECK_THROWS_AS(validate(CfoParams{0.5, 64}), std::invalid_argument);    // |eps| too large
    CHECK_NOTHROW(validate(CfoParams{-0.49, 64}));

    Rng rng(1);
    const auto ch = ChannelRealization::draw(2, 2, 16, rng);
    auto x = random_blocks(16, 2, 1, rng);
    x[3] = CMat(3, 1);  // wrong antenna count
    CHECK_THROWS_AS((void)transmit_exact(x, ch, CfoParams{0.0, 16}, NoiseParams{0.0}, rng),
                    std::invalid_argument);
}
