#include "mimocfo/iterative_receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mimocfo {

namespace {

constexpr double kVarFloor = 1e-12;
constexpr double kErasedVar = 1e30;
constexpr double kSymbolEnergy = 1.0;  // unit-energy constellations

}  // namespace

DetectorOutput mmse_detect(const RealifiedSystem& sys) {
    const RMat& g = sys.g_eq;
    const int m = g.rows;
    const int q2 = g.cols;

    RMat a = outer_gram(g);
    const double sigma2 = std::max(sys.noise_var, kVarFloor);
    for (int i = 0; i < m; ++i) a(i, i) += sigma2;
    if (!cholesky(a)) throw std::runtime_error("mmse_detect: covariance not positive definite");

    DetectorOutput out;
    out.s_hat.resize(q2);
    out.bias_gain.resize(q2);
    out.resid_var.resize(q2);

    std::vector<double> col(m);
    for (int u = 0; u < q2; ++u) {
        for (int r = 0; r < m; ++r) col[r] = g(r, u);
        chol_solve(a, col);  // col = (G G^T + s2 I)^-1 g_u
        double est = 0.0, mu = 0.0;
        for (int r = 0; r < m; ++r) {
            est += col[r] * sys.y[r];
            mu += col[r] * g(r, u);
        }
        out.s_hat[u] = est;
        out.bias_gain[u] = mu;
        out.resid_var[u] = std::max(mu * (1.0 - mu) * kSymbolEnergy, kVarFloor);
    }
    return out;
}

double pic_detect(const RealifiedSystem& sys, std::span<const double> s_tilde, int u) {
    const RMat& g = sys.g_eq;
    if (s_tilde.size() != static_cast<size_t>(g.cols))
        throw std::invalid_argument("pic_detect: soft estimate length mismatch");

    // residual with every soft estimate removed; adding back g_u s_tilde_u
    // is folded into the matched-filter output
    double num = 0.0, den = 0.0;
    for (int r = 0; r < g.rows; ++r) {
        double ri = sys.y[r];
        for (int c = 0; c < g.cols; ++c) ri -= g(r, c) * s_tilde[c];
        num += g(r, u) * ri;
        den += g(r, u) * g(r, u);
    }
    if (den == 0.0) return 0.0;  // erased component
    return num / den + s_tilde[u];
}

DetectorOutput pic_detect_all(const RealifiedSystem& sys, std::span<const double> s_tilde,
                              std::span<const double> s_tilde_var) {
    const RMat& g = sys.g_eq;
    const int q2 = g.cols;
    if (s_tilde.size() != static_cast<size_t>(q2) || s_tilde_var.size() != static_cast<size_t>(q2))
        throw std::invalid_argument("pic_detect_all: soft estimate length mismatch");

    std::vector<double> resid(sys.y.begin(), sys.y.end());
    for (int r = 0; r < g.rows; ++r) {
        double acc = 0.0;
        for (int c = 0; c < q2; ++c) acc += g(r, c) * s_tilde[c];
        resid[r] -= acc;
    }
    const std::vector<double> gtr = matvec_t(g, resid);
    const RMat gg = gram(g);
    const double sigma2 = std::max(sys.noise_var, kVarFloor);

    DetectorOutput out;
    out.s_hat.assign(q2, 0.0);
    out.bias_gain.assign(q2, 1.0);
    out.resid_var.assign(q2, kErasedVar);
    for (int u = 0; u < q2; ++u) {
        const double guu = gg(u, u);
        if (guu <= 0.0) continue;  // erased, LLR will be 0
        out.s_hat[u] = gtr[u] / guu + s_tilde[u];
        double interf = 0.0;
        for (int v = 0; v < q2; ++v)
            if (v != u) interf += gg(u, v) * gg(u, v) * s_tilde_var[v];
        out.resid_var[u] = std::max((interf + sigma2 * guu) / (guu * guu), kVarFloor);
    }
    return out;
}

void demap_dim(double z, double gain, double var, const Constellation& c,
               const double* apriori, double* out) {
    const int levels = c.levels();
    const int m = c.bits_per_dim();
    const auto& pam = c.pam_points();
    const double inv2v = 0.5 / var;

    double metric[256];
    for (int i = 0; i < levels; ++i) {
        const double d = z - gain * pam[i];
        double mt = d * d * inv2v;
        if (apriori) {
            // -log prior up to a constant: sum_b -(1-2c_b) La_b / 2
            for (int b = 0; b < m; ++b)
                mt -= (1 - 2 * c.pam_bit(i, b)) * apriori[b] * 0.5;
        }
        metric[i] = mt;
    }
    for (int b = 0; b < m; ++b) {
        double m0 = 1e300, m1 = 1e300;
        for (int i = 0; i < levels; ++i) {
            if (c.pam_bit(i, b) == 0)
                m0 = std::min(m0, metric[i]);
            else
                m1 = std::min(m1, metric[i]);
        }
        const double apo = m1 - m0;  // log P(b=0) - log P(b=1), max-log
        out[b] = clip_llr(apriori ? apo - apriori[b] : apo);
    }
}

void soft_map_dim(const Constellation& c, const double* llr, double& mean, double& var) {
    const int levels = c.levels();
    const int m = c.bits_per_dim();
    const auto& pam = c.pam_points();

    double th[16];
    for (int b = 0; b < m; ++b) th[b] = std::tanh(0.5 * llr[b]);

    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < levels; ++i) {
        double p = 1.0;
        for (int b = 0; b < m; ++b) {
            const double s = c.pam_bit(i, b) == 0 ? 1.0 : -1.0;
            p *= 0.5 * (1.0 + s * th[b]);
        }
        e1 += pam[i] * p;
        e2 += pam[i] * pam[i] * p;
    }
    mean = e1;
    var = std::max(e2 - e1 * e1, 0.0);
}

LlrFrame demap_llr(const DetectorOutput& det, const Constellation& c, const LlrFrame* apriori) {
    const int q2 = static_cast<int>(det.s_hat.size());
    const int m = c.bits_per_dim();
    if (apriori && apriori->values.size() != static_cast<size_t>(q2) * m)
        throw std::invalid_argument("demap_llr: a priori length mismatch");

    LlrFrame out;
    out.role = LlrRole::DemapperExtrinsic;
    out.values.resize(static_cast<size_t>(q2) * m);
    for (int u = 0; u < q2; ++u) {
        // component u -> symbol u/2, I bits for even u, Q bits for odd u
        const size_t off = static_cast<size_t>(u / 2) * 2 * m + (u % 2) * m;
        const double* ap = apriori ? apriori->values.data() + off : nullptr;
        demap_dim(det.s_hat[u], det.bias_gain[u], det.resid_var[u], c, ap, out.values.data() + off);
    }
    return out;
}

void soft_map(const LlrFrame& extrinsic, const Constellation& c,
              std::vector<double>& s_tilde, std::vector<double>& s_tilde_var) {
    const int m = c.bits_per_dim();
    const int q2 = static_cast<int>(extrinsic.values.size() / m);
    s_tilde.resize(q2);
    s_tilde_var.resize(q2);
    for (int u = 0; u < q2; ++u) {
        const size_t off = static_cast<size_t>(u / 2) * 2 * m + (u % 2) * m;
        soft_map_dim(c, extrinsic.values.data() + off, s_tilde[u], s_tilde_var[u]);
    }
}

std::vector<uint8_t> detect_frame(const FramePlan& plan, std::span<const RealifiedSystem> systems,
                                  int iterations, const uint8_t* true_info, DetectDiag* diag) {
    if (iterations < 1) throw std::invalid_argument("detect_frame: iterations must be >= 1");
    const int blocks = plan.total_blocks();
    if (systems.size() != static_cast<size_t>(blocks))
        throw std::invalid_argument("detect_frame: wrong number of subcarrier systems");
    const size_t np = plan.punctured_bits();
    const int bpb = plan.bits_per_block();
    if (np != static_cast<size_t>(blocks) * bpb)
        throw std::invalid_argument("detect_frame: frame does not tile the OFDM grid");

    const Constellation& c = plan.constel;
    const auto perm = interleaver_permutation(np, plan.interleaver_seed);

    std::vector<double> chan_llr(np);  // interleaved (transmit) order
    std::vector<double> coded_ext;    // decoder extrinsic, full rate-1/2 order
    SisoResult siso;

    if (diag) {
        diag->iter_info_errors.clear();
        diag->iter_mean_abs_ext.clear();
    }

    for (int it = 1; it <= iterations; ++it) {
        if (it == 1) {
            for (int b = 0; b < blocks; ++b) {
                const DetectorOutput det = mmse_detect(systems[b]);
                const LlrFrame lf = demap_llr(det, c, nullptr);
                std::copy(lf.values.begin(), lf.values.end(),
                          chan_llr.begin() + static_cast<size_t>(b) * bpb);
            }
        } else {
            const auto pr_p = puncture_llr(coded_ext, plan.rate);
            const auto pr_i = interleave<double>(pr_p, perm);
            LlrFrame apriori{{}, LlrRole::DecoderExtrinsic};
            std::vector<double> s_tilde, s_var;
            for (int b = 0; b < blocks; ++b) {
                const size_t off = static_cast<size_t>(b) * bpb;
                apriori.values.assign(pr_i.begin() + off, pr_i.begin() + off + bpb);
                soft_map(apriori, c, s_tilde, s_var);
                const DetectorOutput det = pic_detect_all(systems[b], s_tilde, s_var);
                const LlrFrame lf = demap_llr(det, c, &apriori);
                std::copy(lf.values.begin(), lf.values.end(), chan_llr.begin() + off);
            }
        }

        const auto deint = deinterleave<double>(chan_llr, perm);
        const auto full = depuncture(deint, plan.rate);
        siso = siso_decode(full, plan.info_bits, plan.exact_log_map);
        coded_ext = siso.coded_extrinsic;

        if (diag) {
            if (true_info) {
                long long errs = 0;
                for (int k = 0; k < plan.info_bits; ++k) {
                    const int hard = siso.info_aposteriori[k] < 0.0 ? 1 : 0;
                    errs += hard != (true_info[k] & 1);
                }
                diag->iter_info_errors.push_back(errs);
            }
            double acc = 0.0;
            for (double v : chan_llr) acc += std::abs(v);
            diag->iter_mean_abs_ext.push_back(acc / static_cast<double>(np));
        }
    }

    std::vector<uint8_t> bits(plan.info_bits);
    for (int k = 0; k < plan.info_bits; ++k)
        bits[k] = siso.info_aposteriori[k] < 0.0 ? 1 : 0;
    return bits;
}

}  // namespace mimocfo
