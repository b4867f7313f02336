#pragma once

// Experiment runner: strict key=value configs, seeded Monte Carlo BER/FER
// sweeps over the four FFMA modes, golden-vector replay of the worked
// examples, and CSV/manifest output. Frames are independent work items with
// seeds derived from (master seed, point, frame index), so sweeps are
// bit-reproducible for any worker-thread count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ffma/butterfly.hpp"
#include "ffma/channel_code.hpp"
#include "ffma/encoder.hpp"
#include "ffma/epcode.hpp"
#include "ffma/gf.hpp"
#include "ffma/modem.hpp"
#include "ffma/receiver.hpp"

namespace FFMA {

inline const char* version_string() {
#ifdef FFMA_GIT_REVISION
    return "ffma 0.1.0 (" FFMA_GIT_REVISION ")";
#else
    return "ffma 0.1.0";
#endif
}

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field(field) {}
    std::string field;
};

struct ExperimentConfig {
    // [experiment]
    std::string mode = "ff_cdma"; // ff_tdma | ff_ccma | ff_cdma | ff_noma
    int users = 1;
    int bits_per_user = 1;
    std::uint64_t seed = 1;
    std::string ep_mode; // serial | parallel; default depends on mode

    // [ep]
    std::string ep_construction; // identity_gf3 | ternary_orthogonal | ternary_nonorthogonal_3x2 | scwep_example_16_12 | file
    int kappa = 2;
    int ep_m = 4;
    std::string ep_file;

    // [channel_code]
    std::string cc_kind = "none"; // none | example_16_12 | toy_ldpc | file | alist
    int cc_p = 3;
    int cc_blocks = 3;  // T
    int cc_parity = 8;  // R, toy_ldpc only
    std::uint64_t cc_seed = 7;
    std::string cc_file;

    // [pav]
    std::string pav_mode = "unit"; // unit | td | cc_mip_parallel | cc_mip_serial | cc_mbip_parallel | cc_mbip_serial

    // [decoder]
    std::string chain; // see FfmaSystem::parse_chain; default depends on mode
    int qspa_iterations = 50;
    double threshold = 0.0;

    // [sweep]
    std::vector<double> ebn0_db;
    long long min_frames = 1;
    long long max_frames = 10000;
    long long target_errors = 100;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);
    std::string to_text() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline long long parse_int(const std::string& field, const std::string& v) {
    try {
        std::size_t used = 0;
        long long r = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return r;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + v + "'");
    }
}

inline double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t used = 0;
        double r = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return r;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

} // namespace detail

inline ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "ep" && section != "channel_code" && section != "pav" &&
                section != "decoder" && section != "sweep")
                throw ConfigError("[" + section + "]", "unknown section");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        std::string field = section + "." + key;
        if (section.empty()) throw ConfigError(key, "key appears before any [section]");

        if (section == "experiment") {
            if (key == "mode") cfg.mode = value;
            else if (key == "users") cfg.users = static_cast<int>(detail::parse_int(field, value));
            else if (key == "bits_per_user") cfg.bits_per_user = static_cast<int>(detail::parse_int(field, value));
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_int(field, value));
            else if (key == "ep_mode") cfg.ep_mode = value;
            else throw ConfigError(field, "unknown key");
        } else if (section == "ep") {
            if (key == "construction") cfg.ep_construction = value;
            else if (key == "kappa") cfg.kappa = static_cast<int>(detail::parse_int(field, value));
            else if (key == "m") cfg.ep_m = static_cast<int>(detail::parse_int(field, value));
            else if (key == "file") cfg.ep_file = value;
            else throw ConfigError(field, "unknown key");
        } else if (section == "channel_code") {
            if (key == "kind") cfg.cc_kind = value;
            else if (key == "p") cfg.cc_p = static_cast<int>(detail::parse_int(field, value));
            else if (key == "blocks") cfg.cc_blocks = static_cast<int>(detail::parse_int(field, value));
            else if (key == "parity") cfg.cc_parity = static_cast<int>(detail::parse_int(field, value));
            else if (key == "seed") cfg.cc_seed = static_cast<std::uint64_t>(detail::parse_int(field, value));
            else if (key == "file") cfg.cc_file = value;
            else throw ConfigError(field, "unknown key");
        } else if (section == "pav") {
            if (key == "mode") cfg.pav_mode = value;
            else throw ConfigError(field, "unknown key");
        } else if (section == "decoder") {
            if (key == "chain") cfg.chain = value;
            else if (key == "qspa_iterations") cfg.qspa_iterations = static_cast<int>(detail::parse_int(field, value));
            else if (key == "threshold") cfg.threshold = detail::parse_double(field, value);
            else throw ConfigError(field, "unknown key");
        } else { // sweep
            if (key == "ebn0_db") {
                cfg.ebn0_db.clear();
                std::istringstream vs(value);
                std::string tok;
                while (std::getline(vs, tok, ',')) {
                    tok = detail::trim(tok);
                    if (!tok.empty()) cfg.ebn0_db.push_back(detail::parse_double(field, tok));
                }
            } else if (key == "min_frames") cfg.min_frames = detail::parse_int(field, value);
            else if (key == "max_frames") cfg.max_frames = detail::parse_int(field, value);
            else if (key == "target_errors") cfg.target_errors = detail::parse_int(field, value);
            else throw ConfigError(field, "unknown key");
        }
    }
    return cfg;
}

inline ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

inline std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "mode = " << mode << "\n";
    os << "users = " << users << "\n";
    os << "bits_per_user = " << bits_per_user << "\n";
    os << "seed = " << seed << "\n";
    if (!ep_mode.empty()) os << "ep_mode = " << ep_mode << "\n";
    os << "[ep]\n";
    if (!ep_construction.empty()) os << "construction = " << ep_construction << "\n";
    os << "kappa = " << kappa << "\n";
    os << "m = " << ep_m << "\n";
    if (!ep_file.empty()) os << "file = " << ep_file << "\n";
    os << "[channel_code]\n";
    os << "kind = " << cc_kind << "\n";
    os << "p = " << cc_p << "\n";
    os << "blocks = " << cc_blocks << "\n";
    os << "parity = " << cc_parity << "\n";
    os << "seed = " << cc_seed << "\n";
    if (!cc_file.empty()) os << "file = " << cc_file << "\n";
    os << "[pav]\n";
    os << "mode = " << pav_mode << "\n";
    os << "[decoder]\n";
    if (!chain.empty()) os << "chain = " << chain << "\n";
    os << "qspa_iterations = " << qspa_iterations << "\n";
    os << "threshold = " << threshold << "\n";
    os << "[sweep]\n";
    os << "ebn0_db = ";
    for (std::size_t i = 0; i < ebn0_db.size(); ++i) os << (i ? ", " : "") << ebn0_db[i];
    os << "\n";
    os << "min_frames = " << min_frames << "\n";
    os << "max_frames = " << max_frames << "\n";
    os << "target_errors = " << target_errors << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

enum class DemodStage { None, Hard, Soft };
enum class ChannelStage { None, Ml, Qspa, HardMl };
enum class BitStage { MapDirect, Correlation, FfCorrelation, Invert };

struct DecoderChain {
    DemodStage demod = DemodStage::None;
    ChannelStage channel = ChannelStage::None;
    BitStage bits = BitStage::MapDirect;
};

struct FrameOutcome {
    long long bit_errors = 0;
    bool frame_error = false;
};

// A fully resolved FFMA system: EP code, frame layout, optional channel
// code, symbol-level PAV, per-symbol receive statistics and per-block
// candidate tables. Immutable once built; run_frame is const and pure given
// its seed, so frames may be evaluated concurrently.
class FfmaSystem {
public:
    explicit FfmaSystem(const ExperimentConfig& cfg) : cfg_(cfg), ep_(build_ep(cfg)) {
        validate_mode();
        ep_mode_ = resolve_ep_mode();
        build_channel_code();
        build_layout();
        build_pav();
        chain_ = parse_chain(resolve_chain());
        validate_chain();
        analyze_symbols();
        build_block_tables();
        build_stats();
    }

    const ExperimentConfig& config() const { return cfg_; }
    const EpCode& ep_code() const { return ep_; }
    const FrameLayout& layout() const { return layout_; }
    const std::optional<SystematicCode>& channel_code() const { return cc_; }
    EpMode ep_mode() const { return ep_mode_; }
    const DecoderChain& chain() const { return chain_; }
    int frame_symbols() const { return n_total_; }
    int frame_bits() const { return cfg_.users * cfg_.bits_per_user; }
    double energy_per_bit() const { return eb_; }
    double pav_rescale_factor() const { return pav_rescale_; }
    const std::vector<double>& pav_weights() const { return mu_; }

    // One Monte Carlo frame: random bits, full chain, error counts.
    FrameOutcome run_frame(std::uint64_t frame_seed, double n0) const {
        BitMatrix bits = random_bits(frame_seed);
        std::vector<double> y = transmit(bits, frame_seed, n0);
        BitMatrix decoded = decode(y, n0);
        FrameOutcome out;
        for (std::size_t i = 0; i < bits.bits.size(); ++i)
            if (bits.bits[i] != decoded.bits[i]) ++out.bit_errors;
        out.frame_error = out.bit_errors > 0;
        return out;
    }

    BitMatrix random_bits(std::uint64_t frame_seed) const {
        std::mt19937_64 rng(mix_seed(frame_seed, 0x1));
        BitMatrix bits = BitMatrix::zeros(cfg_.users, cfg_.bits_per_user);
        for (auto& b : bits.bits) b = static_cast<std::uint8_t>(rng() & 1);
        return bits;
    }

    // Per-user modulated, PAV-scaled signals summed over the GMAC.
    std::vector<double> transmit(const BitMatrix& bits, std::uint64_t frame_seed, double n0) const {
        std::vector<RealSignal> signals;
        signals.reserve(cfg_.users);
        for (int j = 0; j < cfg_.users; ++j) {
            FfVector symbols = user_symbols(bits, j);
            RealSignal x = modulate(symbols);
            for (int n = 0; n < n_total_; ++n) x[n] *= amp_[n];
            signals.push_back(std::move(x));
        }
        return gmac(signals, n0, mix_seed(frame_seed, 0x2));
    }

    FfVector user_symbols(const BitMatrix& bits, int j) const {
        FfVector info = place_user_info(layout_, ep_, bits, j);
        if (cc_) return encode(*cc_, info).symbols;
        return info;
    }

    BitMatrix decode(const std::vector<double>& y, double n0) const {
        switch (chain_.bits) {
            case BitStage::Correlation:
                return decode_correlation(y);
            case BitStage::MapDirect:
                if (chain_.channel == ChannelStage::None) return decode_map_direct(y, n0);
                return decode_with_channel(y, n0);
            default:
                return decode_with_channel(y, n0);
        }
    }

    static DecoderChain parse_chain(const std::string& name) {
        if (name == "map") return {DemodStage::None, ChannelStage::None, BitStage::MapDirect};
        if (name == "correlation") return {DemodStage::None, ChannelStage::None, BitStage::Correlation};
        if (name == "ff_correlation") return {DemodStage::Hard, ChannelStage::None, BitStage::FfCorrelation};
        if (name == "hard+invert") return {DemodStage::Hard, ChannelStage::None, BitStage::Invert};
        if (name == "qspa+map") return {DemodStage::Soft, ChannelStage::Qspa, BitStage::MapDirect};
        if (name == "ml+map") return {DemodStage::Soft, ChannelStage::Ml, BitStage::MapDirect};
        if (name == "qspa+invert") return {DemodStage::Soft, ChannelStage::Qspa, BitStage::Invert};
        if (name == "ml+invert") return {DemodStage::Soft, ChannelStage::Ml, BitStage::Invert};
        if (name == "qspa+ff_correlation") return {DemodStage::Soft, ChannelStage::Qspa, BitStage::FfCorrelation};
        if (name == "ml+ff_correlation") return {DemodStage::Soft, ChannelStage::Ml, BitStage::FfCorrelation};
        if (name == "hard+ml+invert") return {DemodStage::Hard, ChannelStage::HardMl, BitStage::Invert};
        throw ConfigError("decoder.chain", "unknown chain '" + name + "'");
    }

private:
    static EpCode build_ep(const ExperimentConfig& cfg) {
        std::string kind = cfg.ep_construction;
        if (kind.empty()) {
            if (cfg.mode == "ff_tdma") kind = "identity_gf3";
            else if (cfg.mode == "ff_cdma") kind = "ternary_orthogonal";
            else if (cfg.mode == "ff_noma") kind = "ternary_nonorthogonal_3x2";
            else if (cfg.mode == "ff_ccma") kind = "scwep_example_16_12";
            else throw ConfigError("experiment.mode", "unknown mode '" + cfg.mode + "'");
        }
        if (kind == "identity_gf3") {
            if (cfg.ep_m < 1) throw ConfigError("ep.m", "must be positive");
            return EpCode::ai_cwep_from_matrix(FfMatrix::identity(3, cfg.ep_m));
        }
        if (kind == "ternary_orthogonal") {
            if (cfg.kappa < 1 || cfg.kappa > 10) throw ConfigError("ep.kappa", "must be in 1..10");
            return EpCode::ai_cwep_from_matrix(ternary_orthogonal(cfg.kappa));
        }
        if (kind == "ternary_nonorthogonal_3x2") return EpCode::ai_cwep_from_matrix(ternary_nonorthogonal_3x2());
        if (kind == "scwep_example_16_12") {
            SystematicCode mc = example_code_16_12(2);
            return EpCode::scwep_from_generator(mc.generator());
        }
        if (kind == "file") {
            if (cfg.ep_file.empty()) throw ConfigError("ep.file", "required when construction = file");
            std::ifstream in(cfg.ep_file);
            if (!in) throw ConfigError("ep.file", "cannot open '" + cfg.ep_file + "'");
            return import_codebook(in);
        }
        throw ConfigError("ep.construction", "unknown construction '" + kind + "'");
    }

    void validate_mode() {
        MaMode cls = classify_mode(ep_);
        bool ok = (cfg_.mode == "ff_tdma" && cls == MaMode::Orthogonal) ||
                  (cfg_.mode == "ff_cdma" && cls == MaMode::Orthogonal) ||
                  (cfg_.mode == "ff_ccma" && cls == MaMode::FfCcma) ||
                  (cfg_.mode == "ff_noma" && cls == MaMode::FfNoma);
        if (!ok)
            throw ConfigError("experiment.mode",
                              "EP code with loading factor " + std::to_string(loading_factor(ep_).value()) +
                                  " cannot serve mode " + cfg_.mode + " (" + to_string(cls) + " code)");
        if (cfg_.users < 1) throw ConfigError("experiment.users", "must be positive");
        if (cfg_.bits_per_user < 1) throw ConfigError("experiment.bits_per_user", "must be positive");
    }

    EpMode resolve_ep_mode() const {
        std::string m = cfg_.ep_mode;
        if (m.empty()) m = (cfg_.mode == "ff_tdma" || cfg_.mode == "ff_ccma") ? "parallel" : "serial";
        if (m == "serial") return EpMode::Serial;
        if (m == "parallel") return EpMode::Parallel;
        throw ConfigError("experiment.ep_mode", "must be 'serial' or 'parallel'");
    }

    void build_channel_code() {
        const int m = static_cast<int>(ep_.m());
        if (cfg_.cc_kind == "none") return;
        if (cfg_.cc_kind == "example_16_12") {
            if (m != 4) throw ConfigError("channel_code.kind", "example_16_12 needs EP block length m = 4");
            cc_ = example_code_16_12(ep_.p());
            return;
        }
        if (cfg_.cc_kind == "toy_ldpc") {
            if (cfg_.cc_blocks < 1) throw ConfigError("channel_code.blocks", "must be positive");
            if (cfg_.cc_parity < 3) throw ConfigError("channel_code.parity", "toy codes need at least 3 parity symbols");
            cc_ = toy_ldpc(ep_.p(), cfg_.cc_blocks, m, cfg_.cc_parity, cfg_.cc_seed);
            return;
        }
        if (cfg_.cc_kind == "file") {
            std::ifstream in(cfg_.cc_file);
            if (!in) throw ConfigError("channel_code.file", "cannot open '" + cfg_.cc_file + "'");
            FfMatrix g = matrix_from_stream(in);
            if (g.p() != ep_.p()) throw ConfigError("channel_code.file", "field does not match the EP code");
            std::size_t k = g.rows();
            if (k % m != 0) throw ConfigError("channel_code.file", "info length must be a multiple of m");
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t c = 0; c < k; ++c)
                    if (g.at(r, c) != (r == c ? 1 : 0))
                        throw ConfigError("channel_code.file", "generator must be systematic [I | F]");
            FfMatrix f(ep_.p(), k, g.cols() - k);
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t c = k; c < g.cols(); ++c) f.set(r, c - k, g.at(r, c));
            cc_ = SystematicCode(static_cast<int>(k) / m, m, f).with_induced_parity_check();
            return;
        }
        if (cfg_.cc_kind == "alist" || cfg_.cc_kind == "parity_file") {
            std::ifstream in(cfg_.cc_file);
            if (!in) throw ConfigError("channel_code.file", "cannot open '" + cfg_.cc_file + "'");
            SparseParityCheck h;
            if (cfg_.cc_kind == "alist") {
                h = parity_check_from_alist(in, ep_.p());
            } else {
                FfMatrix hm = matrix_from_stream(in);
                if (hm.p() != ep_.p()) throw ConfigError("channel_code.file", "field does not match the EP code");
                h.cols = static_cast<int>(hm.cols());
                h.rows.resize(hm.rows());
                for (std::size_t r = 0; r < hm.rows(); ++r)
                    for (std::size_t c = 0; c < hm.cols(); ++c)
                        if (hm.at(r, c) != 0) h.rows[r].push_back({static_cast<int>(c), hm.at(r, c)});
            }
            int mt = h.cols - static_cast<int>(h.row_count());
            if (mt <= 0 || mt % m != 0)
                throw ConfigError("channel_code.file", "parity-check info length must be a positive multiple of m");
            cc_ = systematic_from_parity_check(ep_.p(), mt / m, m, h);
            return;
        }
        throw ConfigError("channel_code.kind", "unknown kind '" + cfg_.cc_kind + "'");
    }

    void build_layout() {
        const int M = static_cast<int>(ep_.pair_count());
        const int m = static_cast<int>(ep_.m());
        const int K = cfg_.bits_per_user, J = cfg_.users;
        int T;
        if (cc_) {
            T = cc_->data_blocks();
        } else if (ep_mode_ == EpMode::Serial) {
            int groups = (J + M - 1) / M;
            T = groups * K;
        } else {
            if (K > M) throw ConfigError("experiment.bits_per_user", "parallel mode needs K <= M");
            int per_block = M / K;
            T = (J + per_block - 1) / per_block;
        }
        try {
            layout_ = plan_frame(M, m, T, K, J, ep_mode_);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("experiment.users", e.what());
        }
        n_total_ = cc_ ? cc_->n() : m * T;
    }

    void build_pav() {
        const int M = static_cast<int>(ep_.pair_count());
        const int m = static_cast<int>(ep_.m());
        mu_.assign(n_total_, 1.0);
        if (cfg_.pav_mode != "unit") {
            PavMode mode;
            if (cfg_.pav_mode == "td") mode = PavMode::Td;
            else if (cfg_.pav_mode == "cc_mip_parallel") mode = PavMode::CcMipParallel;
            else if (cfg_.pav_mode == "cc_mip_serial") mode = PavMode::CcMipSerial;
            else if (cfg_.pav_mode == "cc_mbip_parallel") mode = PavMode::CcMbipParallel;
            else if (cfg_.pav_mode == "cc_mbip_serial") mode = PavMode::CcMbipSerial;
            else throw ConfigError("pav.mode", "unknown mode '" + cfg_.pav_mode + "'");
            bool coded_mode = mode != PavMode::Td;
            if (coded_mode && !cc_) throw ConfigError("pav.mode", "channel-coded PAV modes need a channel code");
            // The regular PAV budgets one user's K bit symbols, the Q
            // multiuser parity symbols of its block and the channel parity.
            // That symbol accounting needs the diagonal layout and a
            // systematic bit prefix in the generator.
            if (ep_mode_ != EpMode::Parallel)
                throw ConfigError("pav.mode", "regular PAV modes need the parallel EP encoder (use 'unit' for serial)");
            for (int r = 0; r < M; ++r)
                for (int c = 0; c < M; ++c)
                    if (ep_.g_one().at(r, c) != (r == c ? 1 : 0))
                        throw ConfigError("pav.mode",
                                          "regular PAV modes need a generator with a systematic bit prefix");
            PavParams prm;
            prm.M = M;
            prm.K = cfg_.bits_per_user;
            prm.Q = m - M;
            prm.m = m;
            if (cc_) {
                prm.K_gc = static_cast<int>(cc_->info_len());
                prm.R = static_cast<int>(cc_->parity_len());
                prm.N = cc_->n();
            }
            RegularPav reg = pav_regular(mode, prm);
            pav_rescale_ = reg.rescale;
            // bit positions carry mu1, each block's parity tail mu2, the
            // channel parity section mu_c; unoccupied positions stay silent
            const int T = layout_.data_blocks;
            for (int t = 0; t < T; ++t)
                for (int i = 0; i < m; ++i) mu_[t * m + i] = i < M ? reg.mu1 : reg.mu2;
            if (cc_)
                for (int r = 0; r < prm.R; ++r) mu_[static_cast<std::size_t>(T) * m + r] = reg.mu_c;
        }
        amp_.resize(n_total_);
        for (int n = 0; n < n_total_; ++n) amp_[n] = std::sqrt(mu_[n]);
    }

    std::string resolve_chain() const {
        if (!cfg_.chain.empty()) return cfg_.chain;
        if (cc_) {
            if (cfg_.mode == "ff_cdma") return "qspa+ff_correlation";
            if (cfg_.mode == "ff_noma") return "qspa+map";
            if (cfg_.mode == "ff_ccma") return "hard+ml+invert";
            return "qspa+invert";
        }
        if (cfg_.mode == "ff_cdma") return "correlation";
        return "map";
    }

    void validate_chain() {
        const bool coded = cc_.has_value();
        if (chain_.channel != ChannelStage::None && !coded)
            throw ConfigError("decoder.chain", "channel-decoding chains need a channel code");
        if (chain_.bits == BitStage::Correlation || chain_.bits == BitStage::FfCorrelation) {
            if (ep_mode_ != EpMode::Serial)
                throw ConfigError("decoder.chain", "correlation decoding needs the serial EP encoder");
            if (ep_.family() != EpFamily::AiCwep)
                throw ConfigError("decoder.chain", "correlation decoding needs an orthogonal AI code");
            if (chain_.bits == BitStage::Correlation)
                for (std::size_t r = 0; r < ep_.pair_count(); ++r)
                    for (std::size_t c = 0; c < ep_.m(); ++c)
                        if (ep_.g_one().at(r, c) == 0)
                            throw ConfigError("decoder.chain", "complex correlation needs zero-free code rows");
        }
        if (chain_.demod == DemodStage::Soft && ep_.p() != 3)
            throw ConfigError("decoder.chain", "soft demodulation is defined for GF(3) signaling only");
        if (chain_.channel == ChannelStage::Ml || chain_.channel == ChannelStage::HardMl) {
            if (cc_->info_len() > 16) throw ConfigError("decoder.chain", "ml decoding needs mT <= 16");
            double total = std::pow(static_cast<double>(ep_.p()), static_cast<double>(cc_->info_len()));
            if (total > 2.1e6) throw ConfigError("decoder.chain", "ml decoding codebook too large");
        }
    }

    RealSignal modulate(const FfVector& v) const {
        if (v.p() == 3) return f_f2c_3ask(v);
        RealSignal x(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i] ? 1.0 : 0.0;
        return x;
    }

    // Enumerate every user's bit patterns once: per-symbol value sets decide
    // which CFSP statistics apply, and the pattern energies give the exact
    // expected energy per information bit.
    void analyze_symbols() {
        const int K = cfg_.bits_per_user;
        value_masks_.assign(cfg_.users, std::vector<std::uint8_t>(n_total_, 0));
        double total_energy = 0.0;
        for (int j = 0; j < cfg_.users; ++j) {
            double user_energy = 0.0;
            long long patterns = 1LL << std::min(K, 20);
            bool exhaustive = K <= 20;
            std::mt19937_64 rng(mix_seed(cfg_.seed, 0xE + j));
            long long count = exhaustive ? patterns : 4096;
            BitMatrix bits = BitMatrix::zeros(cfg_.users, K);
            for (long long idx = 0; idx < count; ++idx) {
                for (int k = 0; k < K; ++k) {
                    int b = exhaustive ? static_cast<int>((idx >> (K - 1 - k)) & 1) : static_cast<int>(rng() & 1);
                    bits.set(j, k, b);
                }
                FfVector v = user_symbols(bits, j);
                RealSignal x = modulate(v);
                for (int n = 0; n < n_total_; ++n) {
                    value_masks_[j][n] |= static_cast<std::uint8_t>(1u << v[n]);
                    user_energy += mu_[n] * x[n] * x[n];
                }
            }
            total_energy += user_energy / count;
        }
        eb_ = total_energy / frame_bits();

        active_count_.assign(n_total_, 0);
        antipodal_.assign(n_total_, true);
        for (int n = 0; n < n_total_; ++n)
            for (int j = 0; j < cfg_.users; ++j) {
                std::uint8_t mask = value_masks_[j][n];
                if (mask == 0x1 || mask == 0) continue; // only ever zero
                ++active_count_[n];
                if (mask != 0x6) antipodal_[n] = false; // not the {1,2} pair
            }
    }

    struct BlockTable {
        std::vector<std::pair<int, int>> engaged; // (user, bit index)
        std::vector<std::vector<double>> cfsp;    // candidate -> m samples
        std::vector<FfVector> ffsp;               // candidate -> FFSP block
        std::unordered_map<std::string, std::vector<int>> by_ffsp;
    };

    void build_block_tables() {
        const int m = static_cast<int>(ep_.m());
        const int T = layout_.data_blocks;
        blocks_.assign(T, BlockTable{});
        for (int j = 0; j < cfg_.users; ++j)
            for (int k = 0; k < cfg_.bits_per_user; ++k)
                blocks_[layout_.slots[j].block_of_bit[k]].engaged.push_back({j, k});
        bool need_tables = chain_.bits == BitStage::MapDirect || chain_.bits == BitStage::Invert;
        if (!need_tables) return;
        for (int t = 0; t < T; ++t) {
            BlockTable& bt = blocks_[t];
            const std::size_t bcount = bt.engaged.size();
            if (bcount > 20) throw ConfigError("decoder.chain", "block " + std::to_string(t) + " has too many bits to enumerate");
            const std::size_t count = std::size_t{1} << bcount;
            bt.cfsp.resize(count);
            bt.ffsp.reserve(count);
            for (std::size_t idx = 0; idx < count; ++idx) {
                // per-user field words summed inside the block, then modulated
                std::map<int, FfVector> per_user;
                for (std::size_t e = 0; e < bcount; ++e) {
                    auto [j, k] = bt.engaged[e];
                    int bit = static_cast<int>((idx >> (bcount - 1 - e)) & 1);
                    FfVector word = f_b2q(bit, ep_.pair(layout_.slots[j].ep_of_bit[k]));
                    auto it = per_user.find(j);
                    if (it == per_user.end()) {
                        per_user.emplace(j, word);
                    } else {
                        for (std::size_t i = 0; i < word.size(); ++i) it->second.set(i, it->second[i] + word[i]);
                    }
                }
                std::vector<double> sum(m, 0.0);
                FfVector w(ep_.p(), m);
                for (const auto& [j, word] : per_user) {
                    RealSignal x = modulate(word);
                    for (int i = 0; i < m; ++i) sum[i] += x[i];
                    for (int i = 0; i < m; ++i) w.set(i, w[i] + word[i]);
                }
                bt.cfsp[idx] = std::move(sum);
                bt.by_ffsp[w.digits()].push_back(static_cast<int>(idx));
                bt.ffsp.push_back(std::move(w));
            }
        }
    }

    void build_stats() {
        stats_of_symbol_.assign(n_total_, -1);
        if (ep_.p() != 3) return;
        std::map<std::pair<int, int>, int> cache; // (alphabet, users) -> index
        for (int n = 0; n < n_total_; ++n) {
            int a = active_count_[n];
            if (a == 0) continue;
            CfspAlphabet alphabet = antipodal_[n] ? CfspAlphabet::BinaryBpsk : CfspAlphabet::Ternary3Ask;
            auto key = std::make_pair(static_cast<int>(alphabet), a);
            auto it = cache.find(key);
            if (it == cache.end()) {
                stats_.push_back(cfsp_stats(a, alphabet));
                it = cache.emplace(key, static_cast<int>(stats_.size()) - 1).first;
            }
            stats_of_symbol_[n] = it->second;
        }
    }

    // --- decoding stages ---

    FfVector hard_demod(const std::vector<double>& y) const {
        FfVector v(ep_.p(), n_total_);
        for (int n = 0; n < n_total_; ++n) {
            if (active_count_[n] == 0 || amp_[n] == 0.0) continue;
            double r = y[n] / amp_[n];
            if (ep_.p() == 2) {
                long long nearest = std::llround(r);
                nearest = std::clamp<long long>(nearest, 0, active_count_[n]);
                v.set(n, static_cast<int>(nearest % 2));
            } else {
                const CfspStats& st = stats_[stats_of_symbol_[n]];
                std::size_t best = 0;
                double best_d = 1e300;
                for (std::size_t l = 0; l < st.omega_r.size(); ++l) {
                    double d = std::abs(r - st.omega_r[l]);
                    if (d < best_d) {
                        best_d = d;
                        best = l;
                    }
                }
                v.set(n, st.omega_v[best]);
            }
        }
        return v;
    }

    SymbolPosteriors soft_posteriors(const std::vector<double>& y, double n0) const {
        SymbolPosteriors post{3, std::vector<double>(static_cast<std::size_t>(n_total_) * 3, 0.0)};
        for (int n = 0; n < n_total_; ++n) {
            if (active_count_[n] == 0) {
                post.set(n, 0, 1.0);
                continue;
            }
            SymbolPosterior sp = posterior(y[n], mu_[n], n0, stats_[stats_of_symbol_[n]]);
            for (int s = 0; s < 3; ++s) post.set(n, s, sp.probs[s]);
        }
        return post;
    }

    BitMatrix decode_map_direct(const std::vector<double>& y, double n0) const {
        (void)n0;
        BitMatrix decoded = BitMatrix::zeros(cfg_.users, cfg_.bits_per_user);
        for (int t = 0; t < layout_.data_blocks; ++t) {
            const BlockTable& bt = blocks_[t];
            if (bt.engaged.empty()) continue;
            int best = block_map_candidate(bt, y, t, nullptr);
            assign_block_bits(bt, best, decoded);
        }
        return decoded;
    }

    // Minimum-distance candidate, optionally restricted to an index subset.
    int block_map_candidate(const BlockTable& bt, const std::vector<double>& y, int t,
                            const std::vector<int>* restrict) const {
        const int m = static_cast<int>(ep_.m());
        const std::size_t base = static_cast<std::size_t>(t) * m;
        double best_d = 1e300;
        int best = 0;
        auto consider = [&](int idx) {
            double d2 = 0.0;
            for (int i = 0; i < m; ++i) {
                double d = y[base + i] - amp_[base + i] * bt.cfsp[idx][i];
                d2 += d * d;
            }
            if (d2 < best_d) {
                best_d = d2;
                best = idx;
            }
        };
        if (restrict) {
            for (int idx : *restrict) consider(idx);
        } else {
            for (std::size_t idx = 0; idx < bt.cfsp.size(); ++idx) consider(static_cast<int>(idx));
        }
        return best;
    }

    void assign_block_bits(const BlockTable& bt, int candidate, BitMatrix& decoded) const {
        const std::size_t bcount = bt.engaged.size();
        for (std::size_t e = 0; e < bcount; ++e) {
            auto [j, k] = bt.engaged[e];
            decoded.set(j, k, static_cast<int>((static_cast<std::size_t>(candidate) >> (bcount - 1 - e)) & 1));
        }
    }

    BitMatrix decode_correlation(const std::vector<double>& y) const {
        BitMatrix decoded = BitMatrix::zeros(cfg_.users, cfg_.bits_per_user);
        const int m = static_cast<int>(ep_.m());
        for (int t = 0; t < layout_.data_blocks; ++t) {
            const BlockTable& bt = blocks_[t];
            const std::size_t base = static_cast<std::size_t>(t) * m;
            RealSignal y_block(y.begin() + base, y.begin() + base + m);
            for (auto [j, k] : bt.engaged) {
                int ep_row = layout_.slots[j].ep_of_bit[k];
                RealSignal row = f_f2c_bpsk(ep_.g_one().row(ep_row));
                CorrDecision d = correlate_complex(y_block, row, cfg_.threshold);
                decoded.set(j, k, d == CorrDecision::Bit1 ? 1 : 0);
            }
        }
        return decoded;
    }

    BitMatrix decode_with_channel(const std::vector<double>& y, double n0) const {
        FfVector info(ep_.p(), static_cast<std::size_t>(layout_.data_blocks) * ep_.m());
        if (chain_.channel == ChannelStage::None) {
            FfVector hard = hard_demod(y);
            for (std::size_t i = 0; i < info.size(); ++i) info.set(i, hard[i]);
        } else {
            SymbolPosteriors post = chain_.demod == DemodStage::Soft ? soft_posteriors(y, n0)
                                                                     : SymbolPosteriors::from_hard(hard_demod(y));
            FfVector decoded_info(ep_.p(), cc_->info_len());
            if (chain_.channel == ChannelStage::Qspa) {
                decoded_info = qspa_decode(*cc_, post, cfg_.qspa_iterations).info;
            } else {
                decoded_info = ml_decode(*cc_, post);
            }
            info = decoded_info;
        }
        return recover_bits(info, y);
    }

    BitMatrix recover_bits(const FfVector& info, const std::vector<double>& y) const {
        BitMatrix decoded = BitMatrix::zeros(cfg_.users, cfg_.bits_per_user);
        const int m = static_cast<int>(ep_.m());
        for (int t = 0; t < layout_.data_blocks; ++t) {
            const BlockTable& bt = blocks_[t];
            if (bt.engaged.empty()) continue;
            FfVector w = info.subvector(static_cast<std::size_t>(t) * m, m);
            if (chain_.bits == BitStage::FfCorrelation) {
                for (auto [j, k] : bt.engaged) {
                    int ep_row = layout_.slots[j].ep_of_bit[k];
                    FfVector row = ep_.g_one().row(ep_row);
                    int self_corr = dot(row, row);
                    int bit = 0;
                    if (self_corr != 0) {
                        try {
                            bit = correlate_ff(w, row, self_corr);
                        } catch (const std::runtime_error&) {
                            bit = 0; // undecodable symbol counts against BER
                        }
                    }
                    decoded.set(j, k, bit);
                }
                continue;
            }
            auto it = bt.by_ffsp.find(w.digits());
            int candidate;
            if (chain_.bits == BitStage::MapDirect) {
                // complex samples resolve whatever ambiguity the FFSP leaves
                candidate = block_map_candidate(bt, y, t, it != bt.by_ffsp.end() ? &it->second : nullptr);
            } else { // Invert
                if (it != bt.by_ffsp.end()) {
                    candidate = it->second.front();
                } else {
                    // decoded FFSP is outside the image; nearest achievable one
                    candidate = 0;
                    int best_d = 1 << 30;
                    for (std::size_t idx = 0; idx < bt.ffsp.size(); ++idx) {
                        int d = 0;
                        for (int i = 0; i < m; ++i) d += bt.ffsp[idx][i] != w[i];
                        if (d < best_d) {
                            best_d = d;
                            candidate = static_cast<int>(idx);
                        }
                    }
                }
            }
            assign_block_bits(bt, candidate, decoded);
        }
        return decoded;
    }

    ExperimentConfig cfg_;
    EpCode ep_;
    EpMode ep_mode_ = EpMode::Serial;
    FrameLayout layout_;
    std::optional<SystematicCode> cc_;
    DecoderChain chain_;
    int n_total_ = 0;
    std::vector<double> mu_, amp_;
    double pav_rescale_ = 1.0;
    double eb_ = 0.0;
    std::vector<std::vector<std::uint8_t>> value_masks_;
    std::vector<int> active_count_;
    std::vector<bool> antipodal_;
    std::vector<BlockTable> blocks_;
    std::vector<CfspStats> stats_;
    std::vector<int> stats_of_symbol_;
};

struct SweepPoint {
    double ebn0_db = 0.0;
    long long frames = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double seconds = 0.0;
};

struct SweepResult {
    ExperimentConfig config;
    double energy_per_bit = 0.0;
    double pav_rescale = 1.0;
    std::vector<SweepPoint> points;
};

inline SweepResult run_sweep(const ExperimentConfig& cfg, int threads = 1) {
    if (threads < 1) throw ConfigError("threads", "must be positive");
    FfmaSystem system(cfg);
    SweepResult result;
    result.config = cfg;
    result.energy_per_bit = system.energy_per_bit();
    result.pav_rescale = system.pav_rescale_factor();
    const int frame_bits = system.frame_bits();

    for (std::size_t pt = 0; pt < cfg.ebn0_db.size(); ++pt) {
        const double ebn0 = std::pow(10.0, cfg.ebn0_db[pt] / 10.0);
        const double n0 = system.energy_per_bit() / ebn0;
        SweepPoint point;
        point.ebn0_db = cfg.ebn0_db[pt];
        auto start = std::chrono::steady_clock::now();

        const long long batch = 256;
        std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(batch));
        while (point.frames < cfg.max_frames) {
            long long todo = std::min(batch, cfg.max_frames - point.frames);
            auto worker = [&](long long lo, long long hi) {
                for (long long i = lo; i < hi; ++i) {
                    std::uint64_t frame_seed = mix_seed(mix_seed(cfg.seed, 0x5EED + pt), point.frames + i);
                    outcomes[static_cast<std::size_t>(i)] = system.run_frame(frame_seed, n0);
                }
            };
            if (threads == 1 || todo < 2 * threads) {
                worker(0, todo);
            } else {
                std::vector<std::thread> pool;
                long long chunk = (todo + threads - 1) / threads;
                for (int w = 0; w < threads; ++w) {
                    long long lo = w * chunk, hi = std::min(todo, lo + chunk);
                    if (lo >= hi) break;
                    pool.emplace_back(worker, lo, hi);
                }
                for (auto& th : pool) th.join();
            }
            for (long long i = 0; i < todo; ++i) {
                point.bit_errors += outcomes[static_cast<std::size_t>(i)].bit_errors;
                point.frame_errors += outcomes[static_cast<std::size_t>(i)].frame_error ? 1 : 0;
            }
            point.frames += todo;
            if (cfg.target_errors > 0 && point.bit_errors >= cfg.target_errors && point.frames >= cfg.min_frames) break;
        }
        point.ber = point.frames ? static_cast<double>(point.bit_errors) / (static_cast<double>(point.frames) * frame_bits) : 0.0;
        point.fer = point.frames ? static_cast<double>(point.frame_errors) / static_cast<double>(point.frames) : 0.0;
        point.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.points.push_back(point);
    }
    return result;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "ebn0_db,frames,bit_errs,frame_errs,ber,fer\n";
    for (const auto& p : result.points) {
        os << p.ebn0_db << ',' << p.frames << ',' << p.bit_errors << ',' << p.frame_errors << ',';
        os.precision(9);
        os << p.ber << ',' << p.fer << '\n';
    }
    return os.str();
}

// Writes sweep.csv plus a manifest that is itself a loadable config, so a
// run can be reproduced from its own output directory.
inline void emit(const SweepResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("emit: cannot create '" + out_dir + "': " + ec.message());

    const fs::path csv_path = fs::path(out_dir) / "sweep.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("emit: cannot write '" + csv_path.string() + "'");
    csv << sweep_csv(result);

    const fs::path manifest_path = fs::path(out_dir) / "manifest.cfg";
    std::ofstream manifest(manifest_path);
    if (!manifest) throw std::runtime_error("emit: cannot write '" + manifest_path.string() + "'");
    manifest << "# " << version_string() << " sweep manifest; rerun with: ffma_cli sweep manifest.cfg\n";
    manifest << "# energy per bit (P_avg = 1): " << result.energy_per_bit << "\n";
    if (result.pav_rescale != 1.0) manifest << "# PAV conservation rescale factor: " << result.pav_rescale << "\n";
    manifest << result.config.to_text();
}

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double bpsk_reference_ber(double ebn0_db) {
    return q_function(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0)));
}

// Corollary-3 style decision equality: spreading by T_o(2^kappa) with unit
// power against single-symbol signaling at kappa-fold power, the latter fed
// the Walsh projection of the former's noise. Returns the number of
// disagreeing bit decisions over `blocks` random user blocks.
inline long long cdma_tdma_decision_disagreements(int kappa, long long blocks, double n0, std::uint64_t seed) {
    FfMatrix t_o = ternary_orthogonal(kappa);
    EpCode code = EpCode::ai_cwep_from_matrix(t_o);
    const int m = static_cast<int>(code.m());
    std::vector<RealSignal> walsh = walsh_rows(t_o);
    long long disagreements = 0;
    std::mt19937_64 bit_rng(mix_seed(seed, 0xB175));
    GaussianNoise noise(mix_seed(seed, 0x2017));
    const double tdma_amp = std::sqrt(static_cast<double>(m)); // kappa-fold power on one symbol

    for (long long blk = 0; blk < blocks; ++blk) {
        UserBlock b(m);
        for (int j = 0; j < m; ++j) b[j] = static_cast<std::uint8_t>(bit_rng() & 1);
        // CDMA block: superposition of +-walsh rows, unit PAV
        RealSignal y(m, 0.0);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) y[i] += (b[j] ? 1.0 : -1.0) * walsh[j][i];
        RealSignal n_samples(m);
        for (int i = 0; i < m; ++i) n_samples[i] = noise.sample(n0 / 2.0);
        for (int i = 0; i < m; ++i) y[i] += n_samples[i];

        for (int j = 0; j < m; ++j) {
            double corr = 0.0;
            for (int i = 0; i < m; ++i) corr += y[i] * walsh[j][i];
            int cdma_bit = corr > 0.0 ? 1 : 0;
            // matched-energy TDMA symbol with the Walsh-projected noise
            double proj = 0.0;
            for (int i = 0; i < m; ++i) proj += n_samples[i] * walsh[j][i];
            proj /= std::sqrt(static_cast<double>(m));
            double y_td = (b[j] ? tdma_amp : -tdma_amp) + proj;
            int tdma_bit = y_td > 0.0 ? 1 : 0;
            if (cdma_bit != tdma_bit) ++disagreements;
        }
    }
    return disagreements;
}

} // namespace FFMA
