#pragma once

// RFC 4180 CSV reading/writing. Quoted fields may contain commas, CRLF
// and doubled quotes. All output numbers go through fmt_sig() so emitted
// tables are byte-stable across runs.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parksent::csvio {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
    int require_column(std::string_view name) const {
        int c = column(name);
        if (c < 0)
            throw CsvError("missing required column: " + std::string(name));
        return c;
    }
};

namespace detail {

// Parses one record starting at `pos`; advances past the trailing
// newline. Handles quoted fields spanning newlines.
inline bool parse_record(const std::string& data, std::size_t& pos,
                         std::vector<std::string>& out, std::size_t& line_no) {
    if (pos >= data.size()) return false;
    out.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (pos < data.size()) {
        char c = data[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < data.size() && data[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
                ++pos;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                any = true;
                ++pos;
                break;
            case ',':
                out.push_back(std::move(field));
                field.clear();
                any = true;
                ++pos;
                break;
            case '\r':
                ++pos;
                break;
            case '\n':
                ++pos;
                ++line_no;
                out.push_back(std::move(field));
                return true;
            default:
                field.push_back(c);
                any = true;
                ++pos;
        }
    }
    if (in_quotes) throw CsvError("unterminated quoted field");
    if (any || !field.empty()) {
        out.push_back(std::move(field));
        return true;
    }
    return false;
}

}  // namespace detail

inline Table parse(const std::string& data, bool has_header = true) {
    Table t;
    std::size_t pos = 0, line_no = 1;
    std::vector<std::string> rec;
    bool first = true;
    while (detail::parse_record(data, pos, rec, line_no)) {
        if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
        if (first && has_header) {
            t.header = rec;
            first = false;
            continue;
        }
        first = false;
        if (!t.header.empty() && rec.size() != t.header.size()) {
            throw CsvError("line " + std::to_string(line_no - 1) +
                           ": expected " + std::to_string(t.header.size()) +
                           " fields, got " + std::to_string(rec.size()));
        }
        t.rows.push_back(rec);
    }
    return t;
}

inline Table read_file(const std::string& path, bool has_header = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), has_header);
}

// 9 significant digits, shortest form (%.9g).
inline std::string fmt_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string quote_field(std::string_view s) {
    bool needs = s.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

class Writer {
  public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw CsvError("cannot open for writing: " + path);
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote_field(fields[i]);
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

inline std::optional<double> to_double(std::string_view s) {
    // std::from_chars for doubles is incomplete on some libstdc++ versions;
    // strtod on a copy is portable and locale headaches are avoided by the
    // callers never feeding localized strings.
    if (s.empty()) return std::nullopt;
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) return std::nullopt;
    return v;
}

inline std::optional<long> to_long(std::string_view s) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace parksent::csvio
