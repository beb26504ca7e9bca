#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "segeval/error.hpp"
#include "segeval/voxel_metrics.hpp"

namespace segeval::csv {

inline constexpr const char* kMissing = "NA";

// Metrics carry six significant digits.
inline std::string metric(const MetricValue& value) {
    if (!value) return kMissing;
    if (std::isinf(*value)) return *value > 0 ? "inf" : "-inf";
    if (std::isnan(*value)) return kMissing;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *value);
    return buf;
}

inline std::string count(std::size_t value) { return std::to_string(value); }

inline std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
    }
    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(fields[i]);
        }
        out_ << '\n';
    }
    ~Writer() = default;

private:
    std::string path_;
    std::ofstream out_;
};

/// Splits one CSV line, honouring double-quoted fields.
inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

}  // namespace segeval::csv
