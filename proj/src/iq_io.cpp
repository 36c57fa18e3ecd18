#include "mpibeam/iq_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mpibeam/textio.hpp"

namespace mpibeam {

static_assert(std::endian::native == std::endian::little,
              "iq files are little-endian; byte swapping not implemented");

void write_iq(const std::string& path, const std::vector<std::complex<double>>& samples,
              double sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    std::vector<float> buf(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        buf[2 * i] = static_cast<float>(samples[i].real());
        buf[2 * i + 1] = static_cast<float>(samples[i].imag());
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw std::runtime_error("short write: " + path);
    out.close();

    std::ofstream hdr(path + ".hdr", std::ios::binary);
    if (!hdr) throw std::runtime_error("cannot open for writing: " + path + ".hdr");
    hdr << "sample_rate=" << format_double(sample_rate) << "\n"
        << "count=" << samples.size() << "\n";
}

IqFile read_iq(const std::string& path) {
    IqFile out;
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("missing sidecar header: " + path + ".hdr");
    std::string line;
    std::size_t count = 0;
    bool have_rate = false, have_count = false;
    while (std::getline(hdr, line)) {
        if (line.rfind("sample_rate=", 0) == 0) {
            out.sample_rate = std::stod(line.substr(12));
            have_rate = true;
        } else if (line.rfind("count=", 0) == 0) {
            count = static_cast<std::size_t>(std::stoull(line.substr(6)));
            have_count = true;
        }
    }
    if (!have_rate || !have_count) {
        throw std::runtime_error("sidecar header missing fields: " + path + ".hdr");
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<float> buf(count * 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float))) {
        throw std::runtime_error("truncated iq file: " + path);
    }
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.samples[i] = {buf[2 * i], buf[2 * i + 1]};
    }
    return out;
}

}  // namespace mpibeam
