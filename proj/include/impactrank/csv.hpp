#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "impactrank/error.hpp"

namespace impactrank {

/// Quote a field per RFC 4180 when it contains a comma, quote, or newline.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

/// Fixed-format numeric field; %.12g keeps outputs byte-stable across runs.
inline std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_.good()) throw Error("cannot open for writing: " + path);
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(fields[i]);
        }
        out_ << "\r\n";
    }

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

/// RFC 4180 reader. Returns one vector of fields per record; handles quoted
/// fields with embedded commas, quotes, and newlines. Accepts both \r\n and \n.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) throw ParseError("unexpected quote inside unquoted field", line);
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                current.push_back(field);
                field.clear();
                field_started = false;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                if (!current.empty() || !field.empty() || field_started) {
                    current.push_back(field);
                    records.push_back(std::move(current));
                    current = {};
                    field.clear();
                    field_started = false;
                }
                break;
            default:
                field += c;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line);
    if (!current.empty() || !field.empty()) {
        current.push_back(field);
        records.push_back(std::move(current));
    }
    return records;
}

inline std::vector<std::vector<std::string>> read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error("cannot open for reading: " + path);
    return read_csv(in);
}

}  // namespace impactrank
