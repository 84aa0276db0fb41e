#include "mimocfo/simharness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mimocfo {

namespace {

int bits_per_symbol(int qam) {
    switch (qam) {
        case 4: return 2;
        case 16: return 4;
        case 64: return 6;
        case 256: return 8;
    }
    throw std::invalid_argument("unsupported QAM order");
}

struct TrialResult {
    long long bits = 0;
    long long errors = 0;
    bool frame_error = false;
    std::vector<long long> iter_errors;
};

TrialResult run_trial(const SimConfig& cfg, const FramePlan& plan, const NoiseParams& noise,
                      uint64_t cell_id, long long trial) {
    Rng rng = Rng::derive(cfg.master_seed, cell_id, static_cast<uint64_t>(trial));
    const CfoParams cfo{cfg.cfo_eps, cfg.nfft};
    const cplx phi00 = phi(0, 0, cfo);

    double nv = noise.n0 / 2.0;  // thermal, per real dimension
    if (cfg.ici_aware_mmse) nv += (1.0 - std::norm(phi00)) * 0.5;

    TxFrame tx = build_tx_frame(plan, rng);

    std::vector<RealifiedSystem> systems;
    systems.reserve(plan.total_blocks());
    for (int c = 0; c < plan.chunks; ++c) {
        const ChannelRealization ch =
            cfg.channel == ChannelModel::FlatPerBlock
                ? ChannelRealization::draw_flat(cfg.mr, plan.scheme->mt, cfg.nfft, rng)
                : ChannelRealization::draw(cfg.mr, plan.scheme->mt, cfg.nfft, rng);
        const auto y_all = transmit_fast(tx.blocks[c], ch, cfo, noise, rng);
        for (int n = 0; n < cfg.nfft; ++n)
            systems.push_back(build_system(ch.h[n], phi00, plan.scheme->f, nv, y_all[n], n));
    }

    DetectDiag diag;
    const auto decoded = detect_frame(plan, systems, cfg.iterations, tx.info.data(), &diag);

    TrialResult res;
    res.bits = plan.info_bits;
    for (int k = 0; k < plan.info_bits; ++k) res.errors += (decoded[k] ^ tx.info[k]) & 1;
    res.frame_error = res.errors > 0;
    res.iter_errors = diag.iter_info_errors;
    return res;
}

}  // namespace

double spectral_efficiency(const SimConfig& cfg) {
    const StScheme& sch = StScheme::get(cfg.scheme);
    return sch.rate * bits_per_symbol(cfg.qam) * rate_value(cfg.rate);
}

FramePlan make_plan(const SimConfig& cfg) {
    const StScheme& sch = StScheme::get(cfg.scheme);
    const int b = bits_per_symbol(cfg.qam);

    FramePlan plan;
    plan.scheme = &sch;
    plan.constel = Constellation::qam(cfg.qam);
    plan.rate = cfg.rate;
    plan.nfft = cfg.nfft;
    plan.interleaver_seed = cfg.interleaver_seed ? cfg.interleaver_seed : cfg.master_seed;
    plan.exact_log_map = cfg.exact_log_map;

    // punctured bits that exactly fill one nfft x T grid
    const long long punct_per_chunk = static_cast<long long>(cfg.nfft) * sch.q * b;
    // info+tail bits per chunk; integral for both rates since Q*B*nfft is
    // divisible by 4
    const long long in_per_chunk = cfg.rate == CodeRate::R12 ? punct_per_chunk / 2
                                                             : punct_per_chunk / 4 * 3;
    long long chunks = (cfg.target_frame_bits + in_per_chunk / 2) / in_per_chunk;
    if (chunks < 1) chunks = 1;
    plan.chunks = static_cast<int>(chunks);
    plan.info_bits = static_cast<int>(chunks * in_per_chunk - kConvTailBits);
    if (plan.info_bits < 1) throw std::invalid_argument("frame too small for this grid");
    return plan;
}

double effective_eta(const FramePlan& plan) {
    const long long uses = static_cast<long long>(plan.chunks) * plan.nfft * plan.scheme->t;
    return static_cast<double>(plan.info_bits) / static_cast<double>(uses);
}

NoiseParams ebn0_to_noise(double ebn0_db, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("ebn0_to_noise: eta must be positive");
    return NoiseParams{1.0 / (eta * std::pow(10.0, ebn0_db / 10.0))};
}

TxFrame build_tx_frame(const FramePlan& plan, Rng& rng) {
    TxFrame tx;
    tx.info.resize(plan.info_bits);
    for (auto& v : tx.info) v = static_cast<uint8_t>(rng.bit());

    const auto coded = conv_encode(tx.info);
    const auto punct = puncture(coded, plan.rate);
    const auto perm = interleaver_permutation(punct.size(), plan.interleaver_seed);
    tx.tx_bits = interleave<uint8_t>(punct, perm);

    const Constellation& c = plan.constel;
    const int b = c.bits_per_symbol();
    std::vector<cplx> symbols(plan.total_symbols());
    std::vector<int> bits(b);
    for (size_t m = 0; m < symbols.size(); ++m) {
        for (int k = 0; k < b; ++k) bits[k] = tx.tx_bits[m * b + k];
        symbols[m] = c.map(bits);
    }

    const int q = plan.scheme->q;
    tx.blocks.assign(plan.chunks, {});
    for (int ch = 0; ch < plan.chunks; ++ch) {
        tx.blocks[ch].reserve(plan.nfft);
        for (int n = 0; n < plan.nfft; ++n) {
            const size_t base = (static_cast<size_t>(ch) * plan.nfft + n) * q;
            tx.blocks[ch].push_back(
                st_encode(plan.scheme->name, std::span<const cplx>(&symbols[base], q)));
        }
    }
    return tx;
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    if (const char* env = std::getenv("SIM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

BerRecord run_point(const SimConfig& cfg, double ebn0_db, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    const FramePlan plan = make_plan(cfg);
    const NoiseParams noise = ebn0_to_noise(ebn0_db, effective_eta(plan));
    const uint64_t cell_id = fnv1a64(cell_key(cfg, ebn0_db).c_str());
    const int nworkers = resolve_workers(workers);

    BerRecord rec;
    rec.ebn0_db = ebn0_db;
    rec.iter_bit_errors.assign(cfg.iterations, 0);

    // Trials are evaluated in waves of doubling size and folded in trial
    // order, so the stopping point does not depend on the worker count.
    long long next_trial = 0;
    int wave = 1;
    bool done = false;
    while (!done) {
        std::vector<TrialResult> results(wave);
        const int nt = std::min(nworkers, wave);
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int w = 0; w < nt; ++w)
            pool.emplace_back([&, w]() {
                for (int i = w; i < wave; i += nt)
                    results[i] = run_trial(cfg, plan, noise, cell_id, next_trial + i);
            });
        for (auto& th : pool) th.join();

        for (int i = 0; i < wave && !done; ++i) {
            const TrialResult& r = results[i];
            rec.bits += r.bits;
            rec.bit_errors += r.errors;
            rec.frames += 1;
            rec.frame_errors += r.frame_error ? 1 : 0;
            for (size_t k = 0; k < r.iter_errors.size() && k < rec.iter_bit_errors.size(); ++k)
                rec.iter_bit_errors[k] += r.iter_errors[k];
            if (rec.bit_errors >= cfg.max_errors || rec.bits >= cfg.max_bits) done = true;
        }
        next_trial += wave;
        wave = std::min(wave * 2, 64);
    }

    rec.ber = rec.bits > 0 ? static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits) : 0.0;
    rec.ber_ci95 = rec.bits > 0 ? 1.96 * std::sqrt(rec.ber / static_cast<double>(rec.bits)) : 0.0;
    rec.zero_errors = rec.bit_errors == 0;
    rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

// --- CSV --------------------------------------------------------------------

std::string csv_header() {
    return "scheme,qam,rate,nfft,eps,ebn0_db,bits,bit_errors,ber,frames,frame_errors,iters,seed";
}

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string cell_key(const SimConfig& cfg, double ebn0_db) {
    std::ostringstream os;
    os << to_string(cfg.scheme) << ',' << cfg.qam << ',' << to_string(cfg.rate) << ','
       << cfg.nfft << ',' << fmt_g(cfg.cfo_eps) << ',' << fmt_g(ebn0_db) << ','
       << cfg.iterations << ',' << cfg.master_seed;
    return os.str();
}

std::string csv_row(const SimConfig& cfg, const BerRecord& rec) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.6e", rec.ber);
    std::ostringstream os;
    os << to_string(cfg.scheme) << ',' << cfg.qam << ',' << to_string(cfg.rate) << ','
       << cfg.nfft << ',' << fmt_g(cfg.cfo_eps) << ',' << fmt_g(rec.ebn0_db) << ','
       << rec.bits << ',' << rec.bit_errors << ',' << buf << ',' << rec.frames << ','
       << rec.frame_errors << ',' << cfg.iterations << ',' << cfg.master_seed;
    return os.str();
}

std::vector<CsvPoint> load_csv(const std::string& path) {
    std::vector<CsvPoint> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line == csv_header()) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 13) throw std::runtime_error("malformed CSV row: " + line);
        CsvPoint p;
        p.scheme = f[0];
        p.qam = std::stoi(f[1]);
        p.rate = f[2];
        p.nfft = std::stoi(f[3]);
        p.eps = std::stod(f[4]);
        p.ebn0_db = std::stod(f[5]);
        p.bits = std::stoll(f[6]);
        p.bit_errors = std::stoll(f[7]);
        p.ber = std::stod(f[8]);
        p.frames = std::stoll(f[9]);
        p.frame_errors = std::stoll(f[10]);
        p.iters = std::stoi(f[11]);
        p.seed = std::stoull(f[12]);
        rows.push_back(std::move(p));
    }
    return rows;
}

std::vector<CsvPoint> sweep(const SimConfig& base, const SweepGrid& grid,
                            const std::string& out_path, int workers, std::ostream* log) {
    namespace fs = std::filesystem;

    std::map<std::string, CsvPoint> have;
    const bool existed = fs::exists(out_path);
    if (existed) {
        for (auto& p : load_csv(out_path)) {
            SimConfig c = base;
            c.scheme = scheme_from_name(p.scheme);
            c.qam = p.qam;
            c.rate = rate_from_name(p.rate);
            c.nfft = p.nfft;
            c.cfo_eps = p.eps;
            c.iterations = p.iters;
            c.master_seed = p.seed;
            have[cell_key(c, p.ebn0_db)] = p;
        }
    }

    std::ofstream out(out_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    if (!existed) out << csv_header() << '\n' << std::flush;

    std::vector<CsvPoint> rows;
    for (Scheme s : grid.schemes)
        for (double eps : grid.eps)
            for (double x : grid.ebn0_db) {
                SimConfig cfg = base;
                cfg.scheme = s;
                cfg.cfo_eps = eps;
                const std::string key = cell_key(cfg, x);
                auto it = have.find(key);
                if (it != have.end()) {
                    rows.push_back(it->second);
                    continue;
                }
                const BerRecord rec = run_point(cfg, x, workers);
                const std::string row = csv_row(cfg, rec);
                out << row << '\n' << std::flush;
                if (log)
                    *log << row << "  (ci95 +-" << fmt_g(rec.ber_ci95) << ", "
                         << fmt_g(rec.wall_s) << " s)\n"
                         << std::flush;
                CsvPoint p;
                p.scheme = to_string(s);
                p.qam = cfg.qam;
                p.rate = to_string(cfg.rate);
                p.nfft = cfg.nfft;
                p.eps = eps;
                p.ebn0_db = x;
                p.bits = rec.bits;
                p.bit_errors = rec.bit_errors;
                p.ber = rec.ber;
                p.frames = rec.frames;
                p.frame_errors = rec.frame_errors;
                p.iters = cfg.iterations;
                p.seed = cfg.master_seed;
                rows.push_back(std::move(p));
                have[key] = rows.back();
            }
    return rows;
}

ReqEbn0 required_ebn0(std::vector<CurvePoint> curve, double target_ber) {
    if (curve.empty()) throw std::invalid_argument("required_ebn0: empty curve");
    std::sort(curve.begin(), curve.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.ebn0_db < b.ebn0_db; });

    auto value = [](const CurvePoint& p) {
        if (p.ber > 0.0) return p.ber;
        return p.bits > 0 ? 0.5 / static_cast<double>(p.bits) : 1e-30;
    };

    if (value(curve.front()) < target_ber)
        return {false, curve.front().ebn0_db, ReqStatus::AllBelow};

    for (size_t i = 0; i + 1 < curve.size(); ++i) {
        const double v0 = value(curve[i]);
        const double v1 = value(curve[i + 1]);
        if (v0 >= target_ber && v1 <= target_ber) {
            if (v0 == v1) return {true, curve[i].ebn0_db, ReqStatus::Crossed};
            const double t = (std::log10(target_ber) - std::log10(v0)) /
                             (std::log10(v1) - std::log10(v0));
            return {true, curve[i].ebn0_db + t * (curve[i + 1].ebn0_db - curve[i].ebn0_db),
                    ReqStatus::Crossed};
        }
    }
    return {false, curve.back().ebn0_db, ReqStatus::AllAbove};
}

}  // namespace mimocfo
