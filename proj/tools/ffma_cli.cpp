// Command-line front end: Monte Carlo sweeps from config files, golden
// example replay, butterfly trace tables and EP codebook export.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ffma/harness.hpp"
#include "ffma/replay.hpp"

namespace {

int run_sweep_command(const std::string& config_path, const std::string& out_dir, long long seed_override,
                      bool has_seed, int threads) {
    FFMA::ExperimentConfig cfg = FFMA::ExperimentConfig::parse_file(config_path);
    if (has_seed) cfg.seed = static_cast<std::uint64_t>(seed_override);
    FFMA::SweepResult result = FFMA::run_sweep(cfg, threads);
    std::cout << "# " << FFMA::version_string() << ", Eb = " << result.energy_per_bit << " (P_avg = 1), seed = "
              << cfg.seed << ", threads = " << threads << "\n";
    if (result.pav_rescale != 1.0)
        std::cout << "# PAV conservation rescale factor: " << result.pav_rescale << "\n";
    std::cout << FFMA::sweep_csv(result);
    if (!out_dir.empty()) {
        FFMA::emit(result, out_dir);
        std::cout << "# wrote " << out_dir << "/sweep.csv and " << out_dir << "/manifest.cfg\n";
    }
    return 0;
}

int run_replay_command() {
    bool all_pass = true;
    for (const auto& check : FFMA::replay_examples()) {
        std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name << " — " << check.detail << "\n";
        all_pass = all_pass && check.pass;
    }
    return all_pass ? 0 : 1;
}

int run_butterfly_command(const std::string& which) {
    FFMA::NetworkCodeKind kind;
    if (which == "gf9") kind = FFMA::NetworkCodeKind::NoCwepGf9;
    else if (which == "gf7") kind = FFMA::NetworkCodeKind::AiepGf7;
    else throw FFMA::ConfigError("--code", "must be gf9 or gf7");
    std::cout << FFMA::butterfly_trace_table(FFMA::butterfly_code(kind));
    return 0;
}

int run_codegen_command(const std::string& construction, int kappa, int m, const std::string& out_path) {
    FFMA::EpCode code = [&]() {
        if (construction == "identity_gf3") return FFMA::EpCode::ai_cwep_from_matrix(FFMA::FfMatrix::identity(3, m));
        if (construction == "ternary_orthogonal")
            return FFMA::EpCode::ai_cwep_from_matrix(FFMA::ternary_orthogonal(kappa));
        if (construction == "ternary_nonorthogonal_3x2")
            return FFMA::EpCode::ai_cwep_from_matrix(FFMA::ternary_nonorthogonal_3x2());
        if (construction == "scwep_example_16_12")
            return FFMA::EpCode::scwep_from_generator(FFMA::example_code_16_12(2).generator());
        throw FFMA::ConfigError("--construction", "unknown construction '" + construction + "'");
    }();
    std::string text = FFMA::export_codebook(code);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
        out << text;
        std::cout << "wrote " << out_path << " (" << FFMA::to_string(code.family()) << ", M = " << code.pair_count()
                  << ", m = " << code.m() << ")\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-field multiple-access toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = 0;
    int threads = 1;
    auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo BER/FER sweep from a config file");
    sweep->add_option("config", config_path, "experiment config file")->required();
    sweep->add_option("--out", out_dir, "output directory for sweep.csv and manifest.cfg");
    auto* seed_opt = sweep->add_option("--seed", seed, "override the config seed");
    sweep->add_option("--threads", threads, "worker threads (results are thread-count independent)")
        ->check(CLI::PositiveNumber);

    auto* replay = app.add_subcommand("replay-examples", "Re-run the built-in reference walkthroughs bit-exactly");

    std::string butterfly_kind = "gf9";
    auto* butterfly = app.add_subcommand("butterfly", "Print the 8-message trace of a 3D butterfly network code");
    butterfly->add_option("--code", butterfly_kind, "gf9 (NO-CWEP over GF(3^2)) or gf7 (AI-EP over GF(7))");

    std::string construction = "ternary_orthogonal", codegen_out;
    int kappa = 2, ident_m = 4;
    auto* codegen = app.add_subcommand("codegen", "Export an EP codebook in the text format");
    codegen->add_option("--construction", construction,
                        "identity_gf3 | ternary_orthogonal | ternary_nonorthogonal_3x2 | scwep_example_16_12");
    codegen->add_option("--kappa", kappa, "Kronecker depth for ternary_orthogonal");
    codegen->add_option("--m", ident_m, "size for identity_gf3");
    codegen->add_option("--out", codegen_out, "output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return run_sweep_command(config_path, out_dir, seed, seed_opt->count() > 0, threads);
        if (replay->parsed()) return run_replay_command();
        if (butterfly->parsed()) return run_butterfly_command(butterfly_kind);
        if (codegen->parsed()) return run_codegen_command(construction, kappa, ident_m, codegen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
