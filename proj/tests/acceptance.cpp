// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ffma/harness.hpp"
#include "ffma/replay.hpp"

using namespace FFMA;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << number << ": " << name << " — " << detail << std::endl;
    if (!pass) ++g_failures;
}

// ---------------------------------------------------------------- criterion 1

void criterion1_golden_replay() {
    auto start = std::chrono::steady_clock::now();
    std::vector<ExampleCheck> checks = replay_examples();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = secs < 1.0;
    std::ostringstream detail;
    int passed = 0;
    for (const auto& c : checks) {
        if (c.pass) ++passed;
        else detail << " [" << c.name << ": " << c.detail << "]";
    }
    pass = pass && passed == static_cast<int>(checks.size());
    std::ostringstream os;
    os << passed << "/" << checks.size() << " examples bit-exact in " << secs << " s" << detail.str();
    report(1, "golden-vector replay", pass, os.str());
}

// ---------------------------------------------------------------- criterion 2

bool ffsp_injective(const EpCode& code) {
    std::set<std::string> seen;
    const std::size_t M = code.pair_count();
    for (std::size_t idx = 0; idx < (std::size_t{1} << M); ++idx) {
        UserBlock b(M);
        for (std::size_t j = 0; j < M; ++j) b[j] = (idx >> j) & 1;
        if (!seen.insert(ffsp_of_user_block(b, code).digits()).second) return false;
    }
    return true;
}

void criterion2_construction_properties() {
    bool pass = true;
    std::ostringstream detail;

    for (int kappa = 1; kappa <= 6 && pass; ++kappa) {
        FfMatrix t = ternary_orthogonal(kappa);
        FfMatrix gram = t * t.transpose();
        std::uint8_t d = gram.at(0, 0);
        if (d != 1 && d != 2) pass = false;
        for (std::size_t i = 0; i < gram.rows() && pass; ++i)
            for (std::size_t j = 0; j < gram.cols() && pass; ++j)
                if (gram.at(i, j) != (i == j ? d : 0)) pass = false;
        const int m = 1 << kappa;
        std::vector<RealSignal> rows = walsh_rows(t);
        for (int i = 0; i < m && pass; ++i)
            for (int j = 0; j < m && pass; ++j) {
                double g = 0.0;
                for (int s = 0; s < m; ++s) g += rows[i][s] * rows[j][s];
                if (g != (i == j ? m : 0.0)) pass = false;
            }
        if (!pass) detail << "kappa=" << kappa << " orthogonality failed";
    }

    struct Shipped {
        std::string name;
        EpCode code;
    };
    std::vector<Shipped> shipped;
    shipped.push_back({"scwep-4x8", EpCode::scwep_from_generator(FfMatrix::from_digit_rows(
                                        2, {"11111111", "00001111", "00110011", "01010101"}))});
    shipped.push_back({"scwep-16-12", EpCode::scwep_from_generator(example_code_16_12(2).generator())});
    shipped.push_back({"ortho-udep-4", EpCode::scwep_from_generator(FfMatrix::identity(2, 4))});
    for (int kappa = 1; kappa <= 3; ++kappa)
        shipped.push_back({"to-" + std::to_string(kappa), EpCode::ai_cwep_from_matrix(ternary_orthogonal(kappa))});
    shipped.push_back({"tno-3x2", EpCode::ai_cwep_from_matrix(ternary_nonorthogonal_3x2())});
    for (int m : {4, 8}) shipped.push_back({"identity-gf3-" + std::to_string(m),
                                            EpCode::ai_cwep_from_matrix(FfMatrix::identity(3, m))});
    int verdicts = 0;
    for (const auto& s : shipped) {
        bool unique = check_uspm(s.code) == UspmVerdict::Unique;
        bool injective = ffsp_injective(s.code);
        if (unique != injective) {
            pass = false;
            detail << " [" << s.name << ": verdict/injectivity mismatch]";
        }
        ++verdicts;
    }
    std::ostringstream os;
    os << "kappa 1..6 double-orthogonal; " << verdicts << " shipped codes verdict==exhaustive" << detail.str();
    report(2, "construction properties", pass, os.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion3_superposition() {
    std::mt19937_64 rng(303);
    std::vector<SystematicCode> codes;
    codes.push_back(example_code_16_12(2));
    codes.push_back(example_code_16_12(3));
    codes.push_back(toy_ldpc(2, 3, 4, 6, 1001));
    codes.push_back(toy_ldpc(3, 2, 4, 6, 1002));
    int ok = 0, total = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const SystematicCode& code = codes[trial % codes.size()];
        int users = 2 + static_cast<int>(rng() % 3);
        std::vector<Codeword> words;
        FfVector info_sum(code.p(), code.info_len());
        for (int j = 0; j < users; ++j) {
            FfVector info(code.p(), code.info_len());
            for (std::size_t i = 0; i < info.size(); ++i) info.set(i, static_cast<int>(rng() % code.p()));
            words.push_back(encode(code, info));
            info_sum = info_sum + info;
        }
        Codeword sum = superpose(code, words);
        ok += sum.symbols == encode(code, info_sum).symbols;
        ++total;
    }
    std::ostringstream os;
    os << ok << "/" << total << " random instances satisfy sum(encode) == encode(sum) exactly";
    report(3, "superposition identity", ok == total, os.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion4_receiver_statistics() {
    bool pass = true;
    std::ostringstream detail;

    for (int users = 1; users <= 20 && pass; ++users)
        for (CfspAlphabet alpha : {CfspAlphabet::Ternary3Ask, CfspAlphabet::BinaryBpsk}) {
            CfspStats s = cfsp_stats(users, alpha);
            double total = 0.0;
            for (double p : s.pmf) total += p;
            if (std::abs(total - 1.0) > 1e-12) {
                pass = false;
                detail << "pmf sum J=" << users;
            }
        }

    CfspStats s3 = cfsp_stats(3, CfspAlphabet::Ternary3Ask);
    if (s3.omega_r != std::vector<int>{3, 2, 1, 0, -1, -2, -3} ||
        s3.omega_v != std::vector<std::uint8_t>{0, 2, 1, 0, 2, 1, 0}) {
        pass = false;
        detail << " [J=3 alphabet mismatch]";
    }

    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uy(-4.0, 4.0);
    for (int i = 0; i < 200 && pass; ++i) {
        SymbolPosterior p = posterior(uy(rng), 1.3, 0.8, s3);
        if (std::abs(p.probs[0] + p.probs[1] + p.probs[2] - 1.0) > 1e-12) pass = false;
    }

    double worst = 0.0;
    for (CfspAlphabet alpha : {CfspAlphabet::Ternary3Ask, CfspAlphabet::BinaryBpsk}) {
        CfspStats stats = cfsp_stats(3, alpha);
        const double mu = 1.3, n0 = 0.7, amp = std::sqrt(mu);
        const double sigma = std::sqrt(n0 / 2.0);
        const double lo = -amp * 3 - 10 * sigma, hi = amp * 3 + 10 * sigma;
        const int steps = 40000;
        const double h = (hi - lo) / steps;
        std::array<double, 3> recovered{};
        for (int i = 0; i <= steps; ++i) {
            double y = lo + i * h;
            double py = 0.0;
            for (std::size_t l = 0; l < stats.omega_r.size(); ++l) {
                double d = y - amp * stats.omega_r[l];
                py += stats.pmf[l] * std::exp(-d * d / n0) / std::sqrt(3.14159265358979323846 * n0);
            }
            SymbolPosterior p = posterior(y, mu, n0, stats);
            double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            for (int v = 0; v < 3; ++v) recovered[v] += w * p.probs[v] * py;
        }
        std::array<double, 3> prior{};
        for (std::size_t l = 0; l < stats.omega_r.size(); ++l) prior[stats.omega_v[l]] += stats.pmf[l];
        for (int v = 0; v < 3; ++v) worst = std::max(worst, std::abs(recovered[v] * h / 3.0 - prior[v]));
    }
    if (worst > 1e-6) {
        pass = false;
        detail << " [Bayes quadrature residual " << worst << "]";
    }
    std::ostringstream os;
    os << "pmf sums exact to 1e-12 (J=1..20), J=3 table verbatim, posterior rows normalized, Bayes residual " << worst;
    report(4, "receiver statistics", pass, os.str() + detail.str());
}

// ---------------------------------------------------------------- criterion 5

long long noiseless_errors(ExperimentConfig cfg) {
    cfg.ebn0_db = {60.0};
    cfg.min_frames = 1;
    cfg.max_frames = 24;
    cfg.target_errors = 0;
    SweepResult res = run_sweep(cfg);
    return res.points[0].bit_errors;
}

void criterion5_noiseless_end_to_end() {
    bool pass = true;
    std::ostringstream detail;
    auto expect_zero = [&](const char* name, const ExperimentConfig& cfg) {
        long long errs = noiseless_errors(cfg);
        if (errs != 0) {
            pass = false;
            detail << " [" << name << ": " << errs << " bit errors]";
        }
    };

    {
        ExperimentConfig cfg;
        cfg.mode = "ff_tdma";
        cfg.ep_construction = "identity_gf3";
        cfg.ep_m = 8;
        cfg.users = 4;
        cfg.bits_per_user = 2;
        cfg.chain = "map";
        expect_zero("ff_tdma uncoded", cfg);
        cfg.users = 2;
        cfg.bits_per_user = 4;
        cfg.cc_kind = "toy_ldpc";
        cfg.cc_p = 3;
        cfg.cc_blocks = 2;
        cfg.cc_parity = 6;
        cfg.chain = "qspa+invert";
        expect_zero("ff_tdma coded", cfg);
    }
    {
        ExperimentConfig cfg;
        cfg.mode = "ff_cdma";
        cfg.kappa = 2;
        cfg.users = 4;
        cfg.bits_per_user = 3;
        cfg.chain = "correlation";
        expect_zero("ff_cdma correlation", cfg);
        cfg.chain = "ff_correlation";
        expect_zero("ff_cdma field correlation", cfg);
        cfg.cc_kind = "example_16_12";
        cfg.chain = "qspa+ff_correlation";
        expect_zero("ff_cdma coded", cfg);
        cfg.cc_kind = "none";
        cfg.kappa = 4;
        cfg.users = 16;
        cfg.bits_per_user = 2;
        cfg.chain = "correlation";
        expect_zero("ff_cdma 16 users", cfg);
    }
    {
        ExperimentConfig cfg;
        cfg.mode = "ff_ccma";
        cfg.users = 12;
        cfg.bits_per_user = 1;
        cfg.chain = "map";
        expect_zero("ff_ccma uncoded", cfg);
        cfg.users = 4;
        cfg.bits_per_user = 3;
        cfg.cc_kind = "toy_ldpc";
        cfg.cc_p = 2;
        cfg.cc_blocks = 1;
        cfg.cc_parity = 6;
        cfg.chain = "hard+ml+invert";
        expect_zero("ff_ccma coded", cfg);
    }
    {
        ExperimentConfig cfg;
        cfg.mode = "ff_noma";
        cfg.users = 3;
        cfg.bits_per_user = 4;
        cfg.chain = "map";
        expect_zero("ff_noma uncoded", cfg);
        cfg.cc_kind = "toy_ldpc";
        cfg.cc_p = 3;
        cfg.cc_blocks = 4;
        cfg.cc_parity = 4;
        cfg.chain = "qspa+map";
        expect_zero("ff_noma coded", cfg);
    }

    // complex- vs finite-field correlation agreement, exhaustive over all
    // user blocks for every orthogonal code up to m = 16
    long long checked = 0;
    for (int kappa = 1; kappa <= 4 && pass; ++kappa) {
        EpCode code = EpCode::ai_cwep_from_matrix(ternary_orthogonal(kappa));
        const std::size_t m = code.m();
        int self_corr = dot(code.g_one().row(0), code.g_one().row(0));
        std::vector<RealSignal> walsh = walsh_rows(code.g_one());
        for (std::size_t idx = 0; idx < (std::size_t{1} << m) && pass; ++idx) {
            UserBlock b(m);
            for (std::size_t j = 0; j < m; ++j) b[j] = (idx >> j) & 1;
            FfVector w = ffsp_of_user_block(b, code);
            RealSignal cfsp(m, 0.0);
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < m; ++i) cfsp[i] += (b[j] ? walsh[j][i] : -walsh[j][i]);
            for (std::size_t j = 0; j < m; ++j) {
                int ff_bit = correlate_ff(w, code.g_one().row(j), self_corr);
                CorrDecision cx = correlate_complex(cfsp, walsh[j], 0.0);
                int cx_bit = cx == CorrDecision::Bit1 ? 1 : 0;
                if (ff_bit != static_cast<int>(b[j]) || cx_bit != static_cast<int>(b[j])) {
                    pass = false;
                    detail << " [correlation mismatch kappa=" << kappa << "]";
                    break;
                }
                ++checked;
            }
        }
    }
    std::ostringstream os;
    os << "all four modes round-trip with zero bit errors; " << checked
       << " exhaustive correlation decisions agree in both fields";
    report(5, "noiseless end-to-end", pass, os.str() + detail.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion6_bpsk_calibration() {
    ExperimentConfig cfg;
    cfg.mode = "ff_tdma";
    cfg.ep_construction = "identity_gf3";
    cfg.ep_m = 8;
    cfg.users = 1;
    cfg.bits_per_user = 8;
    cfg.chain = "map";
    cfg.pav_mode = "td";
    cfg.seed = 606;
    cfg.ebn0_db = {4.0, 6.0, 8.0};
    cfg.min_frames = 100000;
    cfg.max_frames = 100000;
    cfg.target_errors = 0;

    auto start = std::chrono::steady_clock::now();
    SweepResult res = run_sweep(cfg, 8);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool pass = std::abs(res.energy_per_bit - 1.0) < 1e-9;
    std::ostringstream os;
    os.precision(4);
    for (const auto& point : res.points) {
        double q = bpsk_reference_ber(point.ebn0_db);
        double n_bits = static_cast<double>(point.frames) * 8;
        double sigma = std::sqrt(q * (1 - q) / n_bits);
        double dev = std::abs(point.ber - q) / sigma;
        pass = pass && dev <= 3.0;
        os << point.ebn0_db << "dB: ber=" << point.ber << " vs Q=" << q << " (" << dev << " sigma) ";
    }
    os << "in " << secs << " s";
    report(6, "uncoded BPSK matches Q(sqrt(2 Eb/N0))", pass, os.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion7_decoder_oracle_equivalence() {
    std::mt19937_64 rng(707);
    int agree = 0, total = 0, logged = 0;
    std::ofstream log("qspa_ml_disagreements.log");
    for (int half = 0; half < 2; ++half) {
        const int p = half == 0 ? 2 : 3;
        SystematicCode code = toy_ldpc(p, 3, 4, 8, 7000 + p);
        const double es = p == 2 ? 1.0 : 2.0 / 3.0;
        const double eb = es * code.n() / (code.info_len() * std::log2(static_cast<double>(p)));
        const double n0 = eb / std::pow(10.0, 6.0 / 10.0); // 6 dB
        GaussianNoise noise(9090 + p);
        for (int trial = 0; trial < 500; ++trial) {
            FfVector info(p, code.info_len());
            for (std::size_t i = 0; i < info.size(); ++i) info.set(i, static_cast<int>(rng() % p));
            Codeword cw = encode(code, info);
            SymbolPosteriors post{p, std::vector<double>(cw.symbols.size() * p, 0.0)};
            for (std::size_t n = 0; n < cw.symbols.size(); ++n) {
                double x = p == 2 ? (cw.symbols[n] ? -1.0 : 1.0)
                                  : (cw.symbols[n] == 1 ? 1.0 : (cw.symbols[n] == 2 ? -1.0 : 0.0));
                double y = x + noise.sample(n0 / 2.0);
                double norm = 0.0;
                for (int s = 0; s < p; ++s) {
                    double xs = p == 2 ? (s ? -1.0 : 1.0) : (s == 1 ? 1.0 : (s == 2 ? -1.0 : 0.0));
                    double val = std::exp(-(y - xs) * (y - xs) / n0);
                    post.set(n, s, val);
                    norm += val;
                }
                for (int s = 0; s < p; ++s) post.set(n, s, post.at(n, s) / norm);
            }
            FfVector ml = ml_decode(code, post);
            QspaResult q = qspa_decode(code, post, 50);
            if (ml == q.info) {
                ++agree;
            } else if (logged < 50) {
                ++logged;
                log << "instance p=" << p << " trial=" << trial << " ml=" << ml.digits() << " qspa=" << q.info.digits()
                    << " converged=" << q.converged << "\nbeliefs:";
                for (std::size_t n = 0; n < code.info_len(); ++n) {
                    log << " [";
                    for (int s = 0; s < p; ++s) log << (s ? " " : "") << q.beliefs.at(n, s);
                    log << "]";
                }
                log << "\n";
            }
            ++total;
        }
    }
    std::ostringstream os;
    os << agree << "/" << total << " agreements at 6 dB (>= 990 required); disagreements in qspa_ml_disagreements.log";
    report(7, "qspa agrees with the ml oracle", agree * 1000 >= total * 990, os.str());
}

// ---------------------------------------------------------------- criterion 8

double ber_crossing_db(const SweepResult& res, double target) {
    // log-linear interpolation of the Eb/N0 where BER crosses `target`
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        double b0 = res.points[i - 1].ber, b1 = res.points[i].ber;
        if (b0 >= target && b1 <= target && b1 > 0.0) {
            double x0 = res.points[i - 1].ebn0_db, x1 = res.points[i].ebn0_db;
            double t = (std::log10(target) - std::log10(b0)) / (std::log10(b1) - std::log10(b0));
            return x0 + t * (x1 - x0);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void criterion8_trend_checks() {
    // (a) coded FF-NOMA vs uncoded FF-NOMA at matched energy accounting
    ExperimentConfig uncoded;
    uncoded.mode = "ff_noma";
    uncoded.users = 3;
    uncoded.bits_per_user = 8;
    uncoded.chain = "map";
    uncoded.seed = 808;
    uncoded.ebn0_db = {5, 6, 7, 8, 9, 10, 11, 12};
    uncoded.min_frames = 4000;
    uncoded.max_frames = 60000;
    uncoded.target_errors = 600;

    ExperimentConfig coded = uncoded;
    coded.bits_per_user = 50;
    coded.cc_kind = "toy_ldpc";
    coded.cc_p = 3;
    coded.cc_blocks = 50;
    coded.cc_parity = 34;
    coded.cc_seed = 2024;
    coded.chain = "qspa+map";
    coded.ebn0_db = {4, 5, 6, 7, 8, 9};

    SweepResult res_uncoded = run_sweep(uncoded, 8);
    SweepResult res_coded = run_sweep(coded, 8);
    double cross_uncoded = ber_crossing_db(res_uncoded, 1e-3);
    double cross_coded = ber_crossing_db(res_coded, 1e-3);
    double gain = cross_uncoded - cross_coded;
    bool pass_a = std::isfinite(cross_uncoded) && std::isfinite(cross_coded) && gain >= 1.0;
    std::ostringstream os;
    os.precision(3);
    os << "(a) BER 1e-3 at " << cross_uncoded << " dB uncoded vs " << cross_coded << " dB coded, gain " << gain
       << " dB (>= 1 required)";

    // (b) CDMA/TDMA per-realization decision equality at matched energy/bit
    long long disagreements = 0;
    for (int kappa : {2, 4}) disagreements += cdma_tdma_decision_disagreements(kappa, 20000, 0.5, 818 + kappa);
    bool pass_b = disagreements == 0;
    os << "; (b) 0 decision mismatches required, got " << disagreements << " over 2x20000 blocks (kappa 2 and 4)";
    report(8, "figure-substitute trend checks", pass_a && pass_b, os.str());
}

// ---------------------------------------------------------------- criterion 9

void criterion9_butterfly() {
    int correct = 0, singleton = 0;
    for (NetworkCodeKind kind : {NetworkCodeKind::NoCwepGf9, NetworkCodeKind::AiepGf7}) {
        OverloadNetworkCode code = butterfly_code(kind);
        for (const auto& trace : butterfly_trace_all(code))
            for (int d = 0; d < 3; ++d) {
                correct += trace.decodes[d] == trace.message;
                singleton += consistent_messages(d, trace.encoding.u[d], trace.encoding.w, code).size() == 1;
            }
    }
    std::ostringstream os;
    os << correct << "/48 decodes correct, " << singleton << "/48 candidate sets singleton";
    report(9, "butterfly exhaustiveness", correct == 48 && singleton == 48, os.str());
}

// --------------------------------------------------------------- criterion 10

void criterion10_determinism() {
    namespace fs = std::filesystem;
    ExperimentConfig cfg;
    cfg.mode = "ff_cdma";
    cfg.kappa = 2;
    cfg.users = 4;
    cfg.bits_per_user = 2;
    cfg.chain = "correlation";
    cfg.seed = 1010;
    cfg.ebn0_db = {3.0, 5.0};
    cfg.min_frames = 1;
    cfg.max_frames = 3000;
    cfg.target_errors = 500;

    SweepResult one = run_sweep(cfg, 1);
    fs::path dir = fs::temp_directory_path() / "ffma_acceptance_manifest";
    fs::remove_all(dir);
    emit(one, dir.string());
    ExperimentConfig manifest_cfg = ExperimentConfig::parse_file((dir / "manifest.cfg").string());
    SweepResult eight = run_sweep(manifest_cfg, 8);
    bool pass = one.points.size() == eight.points.size();
    for (std::size_t i = 0; pass && i < one.points.size(); ++i)
        pass = one.points[i].frames == eight.points[i].frames &&
               one.points[i].bit_errors == eight.points[i].bit_errors &&
               one.points[i].frame_errors == eight.points[i].frame_errors;
    std::ostringstream os;
    os << "manifest rerun with 8 threads matches the 1-thread run exactly (" << one.points.size() << " points)";
    report(10, "determinism across threads and manifest replay", pass, os.str());
}

} // namespace

int main() {
    criterion1_golden_replay();
    criterion2_construction_properties();
    criterion3_superposition();
    criterion4_receiver_statistics();
    criterion5_noiseless_end_to_end();
    criterion6_bpsk_calibration();
    criterion7_decoder_oracle_equivalence();
    criterion8_trend_checks();
    criterion9_butterfly();
    criterion10_determinism();
    return g_failures;
}
