#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace qlockin {

/// Minimal RFC-4180-style CSV emitter: header row then data rows, floats
/// printed with 12 significant digits. Field values never contain commas
/// or quotes here, so no quoting logic is needed.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    void header(const std::string& line) { out_ << line << '\n'; }

    CsvWriter& field(double v) {
        sep();
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        out_ << buf;
        return *this;
    }

    CsvWriter& field(long long v) {
        sep();
        out_ << v;
        return *this;
    }

    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }

    CsvWriter& field(std::uint64_t v) {
        sep();
        out_ << v;
        return *this;
    }

    CsvWriter& field(const std::string& v) {
        sep();
        out_ << v;
        return *this;
    }

    void end_row() {
        out_ << '\n';
        first_ = true;
    }

  private:
    void sep() {
        if (!first_) out_ << ',';
        first_ = false;
    }

    std::ofstream out_;
    bool first_ = true;
};

inline std::string format_sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace qlockin
