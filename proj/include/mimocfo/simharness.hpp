#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mimocfo/iterative_receiver.hpp"
#include "mimocfo/ofdm_cfo_channel.hpp"

namespace mimocfo {

// frequency correlation of the Rayleigh channel: independent matrices per
// subcarrier, or one flat (non-selective) matrix shared by all subcarriers
// of a space-time block
enum class ChannelModel { IidPerSubcarrier, FlatPerBlock };

struct SimConfig {
    Scheme scheme = Scheme::Alamouti;
    int qam = 4;                      // 4 | 16 | 64 | 256
    CodeRate rate = CodeRate::R12;
    int nfft = 256;                   // desk-scale default; 2048 is the 2K mode
    double cfo_eps = 0.0;             // normalized CFO, N*dF*Ts
    ChannelModel channel = ChannelModel::IidPerSubcarrier;
    int iterations = 3;
    long long max_bits = 20'000'000;  // stopping: bits ceiling
    int max_errors = 200;             // stopping: bit-error target
    uint64_t master_seed = 1;
    uint64_t interleaver_seed = 0;    // 0: derive from master_seed
    int target_frame_bits = 9216;     // frame size rounded to tile the grid
    bool ici_aware_mmse = false;
    bool exact_log_map = false;       // SISO decoder in full log-MAP mode
    int mr = 2;                       // receive antennas (2x1 used for calibration only)
};

// eta = L * B * Rc, information bits per subcarrier use
double spectral_efficiency(const SimConfig& cfg);

// Frame sized to fill whole nfft x T grids, as close to target_frame_bits as
// possible (the 6 tail bits come out of the last chunk's budget).
FramePlan make_plan(const SimConfig& cfg);

// info bits per subcarrier use actually achieved, tail overhead included
double effective_eta(const FramePlan& plan);

// With unit received symbol energy per receive antenna, Es = 1 and
// N0 = Es / (eta * 10^(ebn0/10)).
NoiseParams ebn0_to_noise(double ebn0_db, double eta);

struct BerRecord {
    double ebn0_db = 0.0;
    long long bits = 0;
    long long bit_errors = 0;
    double ber = 0.0;
    long long frames = 0;
    long long frame_errors = 0;
    std::vector<long long> iter_bit_errors;  // diagnostic, per receiver iteration
    double ber_ci95 = 0.0;                   // 1.96*sqrt(ber/bits)
    double wall_s = 0.0;
    bool zero_errors = false;  // hit max_bits without a single error
};

// TX side of one frame; exposed so tests can drive loopbacks directly.
struct TxFrame {
    std::vector<uint8_t> info;
    std::vector<uint8_t> tx_bits;          // punctured + interleaved coded bits
    std::vector<std::vector<CMat>> blocks; // chunk -> nfft code matrices
};
TxFrame build_tx_frame(const FramePlan& plan, Rng& rng);

/**
 * One Monte-Carlo point. Trials are independent frames whose random streams
 * are derived from (master_seed, cell, trial); they run on `workers` threads
 * (0 = SIM_WORKERS env or hardware concurrency) and are accumulated in trial
 * order, so the result is identical for any worker count. Stops at
 * max_errors bit errors or max_bits simulated bits, whichever first.
 */
BerRecord run_point(const SimConfig& cfg, double ebn0_db, int workers = 0);

// --- CSV contract -----------------------------------------------------------

std::string csv_header();
std::string csv_row(const SimConfig& cfg, const BerRecord& rec);
// cell identity within an output file (used for resume and for seeding)
std::string cell_key(const SimConfig& cfg, double ebn0_db);

struct CsvPoint {
    std::string scheme;
    int qam = 0;
    std::string rate;
    int nfft = 0;
    double eps = 0.0;
    double ebn0_db = 0.0;
    long long bits = 0;
    long long bit_errors = 0;
    double ber = 0.0;
    long long frames = 0;
    long long frame_errors = 0;
    int iters = 0;
    uint64_t seed = 0;
};
std::vector<CsvPoint> load_csv(const std::string& path);

struct SweepGrid {
    std::vector<Scheme> schemes;
    std::vector<double> eps;
    std::vector<double> ebn0_db;
};

// Runs every grid cell, appending to out_path; cells already present in the
// file are skipped, so an interrupted sweep resumes where it stopped.
std::vector<CsvPoint> sweep(const SimConfig& base, const SweepGrid& grid,
                            const std::string& out_path, int workers = 0,
                            std::ostream* log = nullptr);

// --- required Eb/N0 ---------------------------------------------------------

struct CurvePoint {
    double ebn0_db = 0.0;
    double ber = 0.0;
    long long bits = 0;
};

enum class ReqStatus { Crossed, AllAbove, AllBelow };

struct ReqEbn0 {
    bool reached = false;
    double ebn0_db = 0.0;  // crossing, or the boundary value when not reached
    ReqStatus status = ReqStatus::Crossed;  // AllAbove: BER never got down to target
};

// Log-linear interpolation of log10(BER) against Eb/N0, first crossing from
// above; zero-error points enter as 0.5/bits.
ReqEbn0 required_ebn0(std::vector<CurvePoint> curve, double target_ber);

int resolve_workers(int workers);

}  // namespace mimocfo
