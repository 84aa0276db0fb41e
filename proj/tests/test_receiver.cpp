#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mimocfo/iterative_receiver.hpp"
#include "mimocfo/ofdm_cfo_channel.hpp"
#include "mimocfo/rng.hpp"
#include "mimocfo/simharness.hpp"

using namespace mimocfo;

namespace {

const Scheme kAll[] = {Scheme::Alamouti, Scheme::VBlast, Scheme::LD, Scheme::Golden};

CMat random_cmat(int r, int c, Rng& rng) {
    CMat m(r, c);
    for (auto& v : m.a) v = rng.cgaussian(1.0);
    return m;
}

// noiseless realified system carrying known symbols
struct Instance {
    RealifiedSystem sys;
    std::vector<double> s_true;
};

Instance make_instance(Scheme sname, double noise_var, Rng& rng, double wgn_std = 0.0) {
    const auto& d = StScheme::get(sname);
    std::vector<cplx> sym(d.q);
    for (auto& v : sym) v = rng.cgaussian(1.0);
    const CMat h = random_cmat(2, 2, rng);
    const CMat x = st_encode(sname, sym);
    CMat y = h * x;
    const double s = 1.0 / std::sqrt(2.0);
    for (auto& v : y.a) v *= s;
    if (wgn_std > 0.0)
        for (auto& v : y.a) v += wgn_std * cplx{rng.gaussian(), rng.gaussian()};
    Instance inst;
    inst.sys = build_system(h, cplx{1.0, 0.0}, d.f, noise_var, y, 0);
    inst.s_true = realify_vec(sym);
    return inst;
}

}  // namespace

TEST_CASE("mmse: noiseless limit recovers the symbol (scalar system)") {
    RealifiedSystem sys;
    sys.g_eq = RMat(1, 1);
    sys.g_eq(0, 0) = 0.8;
    sys.y = {0.8 * 1.3};
    sys.noise_var = 0.0;  // floor regularized
    const auto out = mmse_detect(sys);
    CHECK(out.s_hat[0] == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(out.bias_gain[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mmse: zero channel gives zero estimates") {
    RealifiedSystem sys;
    sys.g_eq = RMat(4, 4);
    sys.y = {1.0, -2.0, 0.5, 3.0};
    sys.noise_var = 0.0;
    const auto out = mmse_detect(sys);
    for (double v : out.s_hat) CHECK(v == 0.0);
}

TEST_CASE("mmse on alamouti: known shrinkage c/(c+sigma2)") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const double sigma2 = 0.3;
        Instance inst = make_instance(Scheme::Alamouti, sigma2, rng);
        const RMat gg = gram(inst.sys.g_eq);
        const double c = gg(0, 0);
        const double mu = c / (c + sigma2);
        const auto out = mmse_detect(inst.sys);
        for (int u = 0; u < 4; ++u) {
            CHECK(out.s_hat[u] == doctest::Approx(mu * inst.s_true[u]).epsilon(1e-10));
            CHECK(out.bias_gain[u] == doctest::Approx(mu).epsilon(1e-10));
            CHECK(out.resid_var[u] == doctest::Approx(mu * (1.0 - mu)).epsilon(1e-9));
        }
    }
}

TEST_CASE("pic with perfect priors cancels everything, noiseless") {
    Rng rng(5);
    for (Scheme s : kAll)
        for (int t = 0; t < 50; ++t) {
            Instance inst = make_instance(s, 0.01, rng);
            for (size_t u = 0; u < inst.s_true.size(); ++u) {
                const double est = pic_detect(inst.sys, inst.s_true, static_cast<int>(u));
                CHECK(std::abs(est - inst.s_true[u]) < 1e-10);
            }
            // block form, including variances
            const std::vector<double> zero_var(inst.s_true.size(), 0.0);
            const auto out = pic_detect_all(inst.sys, inst.s_true, zero_var);
            for (size_t u = 0; u < inst.s_true.size(); ++u)
                CHECK(std::abs(out.s_hat[u] - inst.s_true[u]) < 1e-10);
        }
}

TEST_CASE("pic with zero priors is the pure matched filter") {
    Rng rng(7);
    Instance inst = make_instance(Scheme::VBlast, 0.1, rng);
    const std::vector<double> zeros(4, 0.0);
    for (int u = 0; u < 4; ++u) {
        double num = 0.0, den = 0.0;
        for (int r = 0; r < inst.sys.g_eq.rows; ++r) {
            num += inst.sys.g_eq(r, u) * inst.sys.y[r];
            den += inst.sys.g_eq(r, u) * inst.sys.g_eq(r, u);
        }
        CHECK(pic_detect(inst.sys, zeros, u) == doctest::Approx(num / den).epsilon(1e-12));
    }
}

TEST_CASE("pic with truth-except-u equals single-stream zero forcing") {
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        Instance inst = make_instance(Scheme::VBlast, 0.1, rng, 0.05);
        for (int u = 0; u < 4; ++u) {
            auto priors = inst.s_true;
            priors[u] = 0.0;
            // oracle: remove all other columns from y, matched-filter what is left
            std::vector<double> resid = inst.sys.y;
            for (int r = 0; r < inst.sys.g_eq.rows; ++r)
                for (int v = 0; v < 4; ++v)
                    if (v != u) resid[r] -= inst.sys.g_eq(r, v) * inst.s_true[v];
            double num = 0.0, den = 0.0;
            for (int r = 0; r < inst.sys.g_eq.rows; ++r) {
                num += inst.sys.g_eq(r, u) * resid[r];
                den += inst.sys.g_eq(r, u) * inst.sys.g_eq(r, u);
            }
            CHECK(pic_detect(inst.sys, priors, u) == doctest::Approx(num / den).epsilon(1e-10));
        }
    }
}

TEST_CASE("erased component: zero column yields LLR 0") {
    RealifiedSystem sys;
    sys.g_eq = RMat(2, 2);
    sys.g_eq(0, 0) = 1.0;
    sys.g_eq(1, 0) = 0.5;  // column 1 all zero
    sys.y = {0.7, 0.1};
    sys.noise_var = 0.1;
    const std::vector<double> st(2, 0.0), sv(2, 0.5);
    CHECK(pic_detect(sys, st, 1) == 0.0);
    const auto out = pic_detect_all(sys, st, sv);
    const Constellation c = Constellation::qam(4);
    double llr;
    demap_dim(out.s_hat[1], out.bias_gain[1], out.resid_var[1], c, nullptr, &llr);
    CHECK(llr == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("demap matches the two-point closed form (2-PAM)") {
    const Constellation c = Constellation::qam(4);
    const double a = c.pam_points()[1];  // +1/sqrt(2)
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const double z = 2.0 * rng.gaussian();
        const double v = 0.37;
        double llr;
        demap_dim(z, 1.0, v, c, nullptr, &llr);
        // (z+a)^2 - (z-a)^2 over 2v = 2 a z / v; in +-1 units this is 2 z' / v
        CHECK(llr == doctest::Approx(clip_llr(2.0 * a * z / v)).epsilon(1e-12));
    }
}

TEST_CASE("demap on an exact point with vanishing variance saturates with the Gray sign") {
    const Constellation c = Constellation::qam(16);
    for (int lvl = 0; lvl < c.levels(); ++lvl) {
        const double z = c.pam_points()[lvl];
        double llr[2];
        demap_dim(z, 1.0, 1e-12, c, nullptr, llr);
        for (int b = 0; b < 2; ++b) {
            CHECK(std::abs(llr[b]) == doctest::Approx(kLlrClip));
            CHECK((llr[b] > 0.0 ? 0 : 1) == c.pam_bit(lvl, b));
        }
    }
}

TEST_CASE("max-log demapper sign agrees with exact log-MAP (4-PAM)") {
    // max-log deviates from the exact sum by at most log(2) per side, so
    // signs can only differ inside a band around zero; exclude that band
    const Constellation c = Constellation::qam(16);
    Rng rng(13);
    long agree = 0, total = 0;
    for (int t = 0; t < 10000; ++t) {
        const double z = 1.5 * rng.gaussian();
        const double v = 0.05 + 0.5 * rng.uniform();
        const double mu = 0.3 + 0.7 * rng.uniform();
        double ml[2];
        demap_dim(z, mu, v, c, nullptr, ml);
        for (int b = 0; b < 2; ++b) {
            // exact log-MAP over the four points
            double p0 = 0.0, p1 = 0.0;
            for (int i = 0; i < 4; ++i) {
                const double d = z - mu * c.pam_points()[i];
                const double w = std::exp(-d * d / (2.0 * v));
                (c.pam_bit(i, b) == 0 ? p0 : p1) += w;
            }
            const double exact = std::log(p0) - std::log(p1);
            if (std::abs(exact) < 0.5 || std::abs(ml[b]) < 0.5) continue;  // tie band
            ++total;
            if ((exact < 0.0) == (ml[b] < 0.0)) ++agree;
        }
    }
    CHECK(total > 10000);
    CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("soft mapper: uniform priors give the constellation mean and energy") {
    for (int qam : {4, 16, 64, 256}) {
        const Constellation c = Constellation::qam(qam);
        std::vector<double> llr(c.bits_per_dim(), 0.0);
        double mean, var;
        soft_map_dim(c, llr.data(), mean, var);
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(var == doctest::Approx(c.dim_energy()).epsilon(1e-12));
    }
}

TEST_CASE("soft mapper: saturated LLRs pin the exact point") {
    const Constellation c = Constellation::qam(64);
    for (int lvl = 0; lvl < c.levels(); ++lvl) {
        double llr[3];
        for (int b = 0; b < 3; ++b) llr[b] = c.pam_bit(lvl, b) ? -kLlrClip : kLlrClip;
        double mean, var;
        soft_map_dim(c, llr, mean, var);
        CHECK(mean == doctest::Approx(c.pam_points()[lvl]).epsilon(1e-9));
        CHECK(var < 1e-9);
    }
}

TEST_CASE("soft mapper: one known bit leaves a two-point expectation (4-PAM)") {
    const Constellation c = Constellation::qam(16);
    const double l1 = 1.3;  // remaining LLR on bit 1
    double llr[2] = {kLlrClip, l1};  // bit 0 known to be 0
    double mean, var;
    soft_map_dim(c, llr, mean, var);

    // surviving points: those with bit0 == 0, weighted by bit1 probability
    const double p1of0 = 1.0 / (1.0 + std::exp(-l1));  // P(bit1 = 0)
    double e1 = 0.0, e2 = 0.0, psum = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (c.pam_bit(i, 0) != 0) continue;
        const double p = c.pam_bit(i, 1) == 0 ? p1of0 : 1.0 - p1of0;
        psum += p;
        e1 += p * c.pam_points()[i];
        e2 += p * c.pam_points()[i] * c.pam_points()[i];
    }
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mean == doctest::Approx(e1).epsilon(1e-9));
    CHECK(var == doctest::Approx(e2 - e1 * e1).epsilon(1e-7));
}

TEST_CASE("demapper/soft-mapper consistency on exact points") {
    const Constellation c = Constellation::qam(64);
    for (int lvl = 0; lvl < c.levels(); ++lvl) {
        const double z = c.pam_points()[lvl];
        double llr[3];
        demap_dim(z, 1.0, 1e-12, c, nullptr, llr);
        double mean, var;
        soft_map_dim(c, llr, mean, var);
        CHECK(mean == doctest::Approx(z).epsilon(1e-9));
        CHECK(var < 1e-9);
    }
}

namespace {

// noiseless loopback through the whole frame pipeline
struct Loopback {
    FramePlan plan;
    TxFrame tx;
    std::vector<RealifiedSystem> systems;
};

Loopback make_loopback(Scheme s, int qam, CodeRate rate, double eps, double n0, uint64_t seed,
                       int nfft = 16, int target_bits = 256) {
    SimConfig cfg;
    cfg.scheme = s;
    cfg.qam = qam;
    cfg.rate = rate;
    cfg.nfft = nfft;
    cfg.cfo_eps = eps;
    cfg.target_frame_bits = target_bits;
    cfg.master_seed = seed;

    Loopback lb;
    lb.plan = make_plan(cfg);
    Rng rng = Rng::derive(seed, 1, 2);
    lb.tx = build_tx_frame(lb.plan, rng);
    const CfoParams cfo{eps, nfft};
    const cplx p00 = phi(0, 0, cfo);
    for (int c = 0; c < lb.plan.chunks; ++c) {
        const auto ch = ChannelRealization::draw(2, 2, nfft, rng);
        const auto y = transmit_fast(lb.tx.blocks[c], ch, cfo, NoiseParams{n0}, rng);
        for (int n = 0; n < nfft; ++n)
            lb.systems.push_back(build_system(ch.h[n], p00, lb.plan.scheme->f, n0 / 2.0, y[n], n));
    }
    return lb;
}

}  // namespace

TEST_CASE("noiseless end-to-end: decoded bits equal transmitted bits") {
    for (Scheme s : kAll) {
        auto lb = make_loopback(s, 16, CodeRate::R12, 0.0, 0.0, 99);
        const auto bits = detect_frame(lb.plan, lb.systems, 1);
        REQUIRE(bits.size() == lb.tx.info.size());
        for (size_t i = 0; i < bits.size(); ++i) CHECK(bits[i] == lb.tx.info[i]);
    }
}

TEST_CASE("noiseless end-to-end survives three iterations, rate 3/4, 64-QAM") {
    for (Scheme s : kAll) {
        auto lb = make_loopback(s, 64, CodeRate::R34, 0.0, 0.0, 7);
        const auto bits = detect_frame(lb.plan, lb.systems, 3);
        for (size_t i = 0; i < bits.size(); ++i) CHECK(bits[i] == lb.tx.info[i]);
    }
}

TEST_CASE("alamouti: one and three iterations give identical decisions") {
    // orthogonal columns leave the PIC nothing to cancel; with 4-QAM the
    // demapper extrinsic is prior-free, so iterations change nothing at all
    auto lb = make_loopback(Scheme::Alamouti, 4, CodeRate::R12, 0.0, 0.15, 21);
    const auto one = detect_frame(lb.plan, lb.systems, 1);
    const auto three = detect_frame(lb.plan, lb.systems, 3);
    CHECK(one == three);
}

TEST_CASE("monotone information: mean |extrinsic| non-decreasing, noiseless") {
    auto lb = make_loopback(Scheme::Golden, 16, CodeRate::R12, 0.0, 0.0, 33);
    DetectDiag diag;
    (void)detect_frame(lb.plan, lb.systems, 3, lb.tx.info.data(), &diag);
    REQUIRE(diag.iter_mean_abs_ext.size() == 3);
    CHECK(diag.iter_mean_abs_ext[1] >= diag.iter_mean_abs_ext[0] - 1e-12);
    CHECK(diag.iter_mean_abs_ext[2] >= diag.iter_mean_abs_ext[1] - 1e-12);
}

TEST_CASE("detect_frame validates its inputs") {
    auto lb = make_loopback(Scheme::VBlast, 4, CodeRate::R12, 0.0, 0.0, 5);
    CHECK_THROWS_AS((void)detect_frame(lb.plan, lb.systems, 0), std::invalid_argument);
    auto fewer = lb.systems;
    fewer.pop_back();
    CHECK_THROWS_AS((void)detect_frame(lb.plan, fewer, 1), std::invalid_argument);
}
