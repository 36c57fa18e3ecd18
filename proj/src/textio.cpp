#include "mpibeam/textio.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpibeam {

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw std::runtime_error("cannot open for writing: " + path);
    file_ = f;
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
    if (file_ != nullptr) {
        std::fclose(static_cast<FILE*>(file_));
        file_ = nullptr;
    }
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (file_ == nullptr) throw std::logic_error("write on closed CSV");
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        line += csv_escape(fields[i]);
    }
    line += "\r\n";
    if (std::fwrite(line.data(), 1, line.size(), static_cast<FILE*>(file_)) != line.size()) {
        throw std::runtime_error("short write: " + path_);
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            cfg.data_[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        auto& sec = cfg.data_[section];
        if (sec.count(key) != 0) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": duplicate key '" + key + "'");
        }
        sec[key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) != 0;
}

std::optional<std::string> ConfigFile::raw(const std::string& section,
                                           const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
    return raw(section, key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(v->c_str(), &end);
    if (errno != 0 || end == v->c_str() || *end != '\0') {
        throw std::runtime_error("config [" + section + "] " + key +
                                 ": not a number: " + *v);
    }
    return d;
}

std::int64_t ConfigFile::get_int(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::int64_t out = 0;
    const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
        throw std::runtime_error("config [" + section + "] " + key +
                                 ": not an integer: " + *v);
    }
    return out;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw std::runtime_error("config [" + section + "] " + key + ": not a boolean: " + *v);
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    std::istringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        char* end = nullptr;
        errno = 0;
        const double d = std::strtod(t.c_str(), &end);
        if (errno != 0 || end == t.c_str() || *end != '\0') {
            throw std::runtime_error("config [" + section + "] " + key +
                                     ": bad list item: " + t);
        }
        out.push_back(d);
    }
    if (out.empty()) {
        throw std::runtime_error("config [" + section + "] " + key + ": empty list");
    }
    return out;
}

void ConfigFile::require_known_keys(const std::string& section,
                                    const std::vector<std::string>& allowed) const {
    const auto s = data_.find(section);
    if (s == data_.end()) return;
    for (const auto& [key, value] : s->second) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::runtime_error("config [" + section + "]: unknown key '" + key + "'");
        }
    }
}

std::vector<std::string> ConfigFile::sections() const {
    std::vector<std::string> out;
    for (const auto& [name, keys] : data_) out.push_back(name);
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace mpibeam
