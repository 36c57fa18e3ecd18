#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mpibeam {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Minimal RFC-4180 writer. Fields are quoted only when they contain a
/// comma, quote or newline.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);
    void close();

  private:
    void* file_ = nullptr;
    std::string path_;
};

std::string csv_escape(const std::string& field);

/// Line-oriented `key = value` configuration with [section] headers and `#`
/// comments. Keys are unique per section.
class ConfigFile {
  public:
    ConfigFile() = default;
    static ConfigFile load(const std::string& path);
    static ConfigFile parse(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> raw(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

    /// Throws if the section holds a key outside `allowed`.
    void require_known_keys(const std::string& section,
                            const std::vector<std::string>& allowed) const;
    std::vector<std::string> sections() const;

  private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

std::string json_escape(const std::string& s);

}  // namespace mpibeam
