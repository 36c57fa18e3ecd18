#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpibeam/mp_core.hpp"
#include "mpibeam/textio.hpp"

namespace mpibeam {

/// Shared options resolved from flags, environment and config file.
struct RunOptions {
    ConfigFile config;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 1;
    QuantMode quant_mode = QuantMode::kRounding;
    bool quant_mode_set = false;  // flag overrides config when set
};

/// Each command validates its config section, computes, and returns the list
/// of files it wrote (paths relative to out_dir). Throws on any error.
std::vector<std::string> cmd_error_sweep(const RunOptions& opts);
std::vector<std::string> cmd_contours(const RunOptions& opts);
std::vector<std::string> cmd_efficiency(const RunOptions& opts);
std::vector<std::string> cmd_beam(const RunOptions& opts);
std::vector<std::string> cmd_modulate(const RunOptions& opts);
std::vector<std::string> cmd_vectors(const RunOptions& opts);

/// Fast internal consistency checks (round-trip identity, closed-form vs
/// compositional efficiency, weight codec) run before every command.
void self_check();

}  // namespace mpibeam
