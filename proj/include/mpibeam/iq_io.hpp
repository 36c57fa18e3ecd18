#pragma once

#include <complex>
#include <string>
#include <vector>

namespace mpibeam {

/// Interleaved 32-bit little-endian float (I, Q) pairs, with a text sidecar
/// `<path>.hdr` carrying `sample_rate=` and `count=` lines.
void write_iq(const std::string& path, const std::vector<std::complex<double>>& samples,
              double sample_rate);

struct IqFile {
    std::vector<std::complex<double>> samples;
    double sample_rate = 0.0;
};

IqFile read_iq(const std::string& path);

}  // namespace mpibeam
