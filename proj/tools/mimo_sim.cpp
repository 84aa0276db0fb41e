// Command-line front end: Monte-Carlo BER sweeps over (scheme, CFO, Eb/N0)
// grids, and required-Eb/N0 extraction from result files.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mimocfo/simharness.hpp"

using namespace mimocfo;

namespace {

// "a:step:b" range or comma list
std::vector<double> parse_ebn0(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double a, s, b;
        char c1, c2;
        std::istringstream is(spec);
        if (!(is >> a >> c1 >> s >> c2 >> b) || c1 != ':' || c2 != ':' || s <= 0.0)
            throw CLI::ValidationError("--ebn0", "expected start:step:stop");
        for (double x = a; x <= b + 1e-9; x += s) out.push_back(x);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--ebn0", "empty grid");
    return out;
}

std::string curve_tag(const CsvPoint& p) {
    std::ostringstream os;
    os << p.scheme << "_qam" << p.qam << "_r" << (p.rate == "1/2" ? "12" : "34") << "_nfft"
       << p.nfft << "_eps" << p.eps;
    return os.str();
}

// group rows into curves keyed by everything but Eb/N0
std::map<std::string, std::vector<CsvPoint>> group_curves(const std::vector<CsvPoint>& rows) {
    std::map<std::string, std::vector<CsvPoint>> curves;
    for (const auto& p : rows) {
        std::ostringstream os;
        os << curve_tag(p) << "_it" << p.iters << "_seed" << p.seed;
        curves[os.str()].push_back(p);
    }
    return curves;
}

void write_plot_files(const std::vector<CsvPoint>& rows, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (auto& [tag, pts] : group_curves(rows)) {
        auto sorted = pts;
        std::sort(sorted.begin(), sorted.end(),
                  [](const CsvPoint& a, const CsvPoint& b) { return a.ebn0_db < b.ebn0_db; });
        std::ofstream out(dir + "/" + tag + ".dat");
        for (const auto& p : sorted) out << p.ebn0_db << ' ' << p.ber << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2x2 MIMO-OFDM link simulator: space-time coding robustness to CFO"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file mirroring the flags, under a [simulate] section; "
                   "quote grid values (ebn0=\"8:0.5:16\")");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "run Monte-Carlo BER points over a grid");
    sim->configurable();

    std::vector<std::string> scheme_names{"alamouti"};
    int qam = 64;
    std::string rate_name = "1/2";
    int nfft = 256;
    std::vector<double> eps_list{0.0};
    std::string ebn0_spec;
    int iters = 3;
    uint64_t seed = 42;
    std::string out_path = "results.csv";
    long long max_bits = 20'000'000;
    int max_errors = 200;
    int frame_bits = 9216;
    bool ici_aware = false;
    std::string plot_dir;

    sim->add_option("--scheme", scheme_names, "alamouti|vblast|ld|golden (repeat or comma list)")
        ->delimiter(',');
    sim->add_option("--qam", qam, "constellation order: 4, 16, 64, 256")
        ->check(CLI::IsMember({4, 16, 64, 256}));
    sim->add_option("--rate", rate_name, "convolutional code rate: 1/2 or 3/4")
        ->check(CLI::IsMember({"1/2", "3/4"}));
    sim->add_option("--nfft", nfft, "subcarrier count (power of two; 2048 = 2K mode)");
    sim->add_option("--eps", eps_list, "normalized CFO values N*dF*Ts (comma list)")
        ->delimiter(',');
    sim->add_option("--ebn0", ebn0_spec, "Eb/N0 grid in dB: start:step:stop or comma list")
        ->required();
    sim->add_option("--iters", iters, "receiver iterations (first is MMSE, rest PIC)");
    sim->add_option("--seed", seed, "master seed; trials derive their own streams");
    uint64_t interleaver_seed = 0;
    sim->add_option("--interleaver-seed", interleaver_seed,
                    "bit interleaver seed (default: the master seed)");
    sim->add_option("--out", out_path, "output CSV (existing cells are reused)");
    sim->add_option("--max-bits", max_bits, "stop a point after this many bits");
    sim->add_option("--max-errors", max_errors, "stop a point after this many bit errors");
    sim->add_option("--frame-bits", frame_bits,
                    "target info bits per frame (rounded to tile the OFDM grid)");
    sim->add_flag("--ici-aware-mmse", ici_aware,
                  "add the analytic ICI power to the detector noise variance");
    bool exact_log = false;
    sim->add_flag("--exact-log-map", exact_log, "full log-MAP SISO decoding instead of max-log");
    std::string channel_name = "iid";
    sim->add_option("--channel", channel_name,
                    "frequency correlation: iid (independent per subcarrier) or flat "
                    "(non-selective, one draw per space-time block)")
        ->check(CLI::IsMember({"iid", "flat"}));
    sim->add_option("--plot-dir", plot_dir, "also write two-column (ebn0, ber) files per curve");

    // ---- required-ebn0 ----
    auto* reqcmd = app.add_subcommand("required-ebn0",
                                      "interpolate required Eb/N0 at a target BER from a CSV");
    double target = 1e-3;
    std::string in_path;
    reqcmd->add_option("--target", target, "target BER")->required();
    reqcmd->add_option("--in", in_path, "results CSV from `simulate`")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            SimConfig base;
            base.qam = qam;
            base.rate = rate_from_name(rate_name);
            base.nfft = nfft;
            base.iterations = iters;
            base.master_seed = seed;
            base.interleaver_seed = interleaver_seed;
            base.max_bits = max_bits;
            base.max_errors = max_errors;
            base.target_frame_bits = frame_bits;
            base.ici_aware_mmse = ici_aware;
            base.exact_log_map = exact_log;
            base.channel = channel_name == "flat" ? ChannelModel::FlatPerBlock
                                                  : ChannelModel::IidPerSubcarrier;

            SweepGrid grid;
            for (const auto& name : scheme_names) grid.schemes.push_back(scheme_from_name(name));
            grid.eps = eps_list;
            grid.ebn0_db = parse_ebn0(ebn0_spec);

            for (Scheme s : grid.schemes) {
                SimConfig probe = base;
                probe.scheme = s;
                const FramePlan plan = make_plan(probe);
                std::printf("%s: eta = %g b/s/Hz (effective %.4f), frame %d info bits, %d chunk(s)\n",
                            to_string(s), spectral_efficiency(probe), effective_eta(plan),
                            plan.info_bits, plan.chunks);
            }
            std::printf("workers: %d (override with SIM_WORKERS)\n", resolve_workers(0));

            const auto rows = sweep(base, grid, out_path, 0, &std::cout);
            std::printf("%zu point(s) in %s\n", rows.size(), out_path.c_str());
            if (!plot_dir.empty()) write_plot_files(rows, plot_dir);
        } else if (*reqcmd) {
            const auto rows = load_csv(in_path);
            if (rows.empty()) {
                std::fprintf(stderr, "no rows in %s\n", in_path.c_str());
                return 1;
            }
            std::printf("curve,required_ebn0_db,reached\n");
            for (auto& [tag, pts] : group_curves(rows)) {
                std::vector<CurvePoint> curve;
                for (const auto& p : pts) curve.push_back({p.ebn0_db, p.ber, p.bits});
                const ReqEbn0 r = required_ebn0(curve, target);
                std::printf("%s,%.3f,%s\n", tag.c_str(), r.ebn0_db, r.reached ? "yes" : "no");
            }
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
