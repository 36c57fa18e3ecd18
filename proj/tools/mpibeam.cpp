// mpibeam: behavioral simulator of a multiphase-interpolating SCPA
// transmitter and an N-element beamformer built from it. Subcommands run
// deterministic sweeps and scenarios and emit CSV/JSON artifacts.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "mpibeam/commands.hpp"
#include "mpibeam/textio.hpp"

namespace {

using mpibeam::RunOptions;

int run_command(const std::string& name, RunOptions& opts,
                const std::string& config_path) {
    try {
        if (!config_path.empty()) opts.config = mpibeam::ConfigFile::load(config_path);
        mpibeam::self_check();

        std::vector<std::string> files;
        if (name == "error-sweep") files = mpibeam::cmd_error_sweep(opts);
        else if (name == "contours") files = mpibeam::cmd_contours(opts);
        else if (name == "efficiency") files = mpibeam::cmd_efficiency(opts);
        else if (name == "beam") files = mpibeam::cmd_beam(opts);
        else if (name == "modulate") files = mpibeam::cmd_modulate(opts);
        else if (name == "vectors") files = mpibeam::cmd_vectors(opts);

        std::string out = "{\"ok\": true, \"files\": [";
        for (std::size_t i = 0; i < files.size(); ++i) {
            if (i > 0) out += ", ";
            out += "\"" + mpibeam::json_escape(files[i]) + "\"";
        }
        out += "]}\n";
        std::fputs(out.c_str(), stdout);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stdout, "{\"error\": \"%s\"}\n",
                     mpibeam::json_escape(e.what()).c_str());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiphase SCPA / beamforming TX behavioral simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after the subcommand name

    std::string config_path;
    RunOptions opts;
    std::string quant_mode;
    app.add_option("--config", config_path, "configuration file (key = value sections)")
        ->check(CLI::ExistingFile);
    app.add_option("--out", opts.out_dir, "output directory (created if missing)");
    app.add_option("--seed", opts.seed, "random seed for generators");
    app.add_option("--threads", opts.threads, "worker threads for sweeps")
        ->envname("MPIBEAM_THREADS");
    app.add_option("--quant-mode", quant_mode, "rounding|exhaustive")
        ->check(CLI::IsMember({"rounding", "exhaustive"}));

    app.add_subcommand("error-sweep", "RMS phase/amplitude error vs amplitude");
    app.add_subcommand("contours", "constant-amplitude state contours");
    app.add_subcommand("efficiency", "drain efficiency vs output backoff");
    app.add_subcommand("beam", "array patterns and beam error metrics");
    app.add_subcommand("modulate", "modulated-signal metrics (EVM/ACLR/PAPR/PSD)");
    app.add_subcommand("vectors", "decoder golden vectors");

    CLI11_PARSE(app, argc, argv);

    if (!quant_mode.empty()) {
        opts.quant_mode = quant_mode == "exhaustive" ? mpibeam::QuantMode::kExhaustive
                                                     : mpibeam::QuantMode::kRounding;
        opts.quant_mode_set = true;
    }
    if (opts.threads < 1) opts.threads = 1;

    return run_command(app.get_subcommands().front()->get_name(), opts, config_path);
}
