#include "circulaw/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "circulaw/errors.hpp"
#include "json.hpp"

namespace circulaw {

ExperimentReport::ExperimentReport(ReportMetadata metadata, std::vector<std::string> value_columns)
    : metadata_(std::move(metadata)) {
    columns_.reserve(value_columns.size() + 1);
    columns_.emplace_back("spec_hash");
    for (auto& c : value_columns) columns_.push_back(std::move(c));
}

void ExperimentReport::add_row(std::vector<Cell> values) {
    if (values.size() + 1 != columns_.size()) throw UsageError("report: row width does not match the columns");
    std::vector<Cell> row;
    row.reserve(columns_.size());
    row.emplace_back(metadata_.spec_hash);
    for (auto& v : values) row.push_back(std::move(v));
    rows_.push_back(std::move(row));
}

std::size_t ExperimentReport::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) return i;
    throw UsageError("report: no column '" + std::string(name) + "'");
}

const Cell& ExperimentReport::at(std::size_t row, std::string_view column) const {
    return rows_.at(row).at(column_index(column));
}

double ExperimentReport::number(std::size_t row, std::string_view column) const {
    const Cell& c = at(row, column);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw UsageError("report: column '" + std::string(column) + "' is not numeric");
}

namespace {

bool cells_equal(const Cell& a, const Cell& b) {
    if (a.index() != b.index()) return false;
    if (const auto* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        return (std::isnan(*x) && std::isnan(y)) || *x == y;
    }
    return a == b;
}

}  // namespace

bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
    if (a.metadata_.kind != b.metadata_.kind || a.metadata_.spec_hash != b.metadata_.spec_hash ||
        a.metadata_.seed != b.metadata_.seed || a.metadata_.library_version != b.metadata_.library_version ||
        a.columns_ != b.columns_ || a.rows_.size() != b.rows_.size()) {
        return false;
    }
    for (std::size_t r = 0; r < a.rows_.size(); ++r) {
        if (a.rows_[r].size() != b.rows_[r].size()) return false;
        for (std::size_t c = 0; c < a.rows_[r].size(); ++c)
            if (!cells_equal(a.rows_[r][c], b.rows_[r][c])) return false;
    }
    return true;
}

ReportFormat format_from_name(std::string_view name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw UsageError("unknown report format '" + std::string(name) + "'");
}

ReportFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? ReportFormat::Csv : ReportFormat::Json;
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace {

std::string json_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string csv_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\n\"") != std::string::npos) throw UsageError("report: string cell contains a CSV delimiter");
    return s;
}

std::string json_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_double(*d) : "null";
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return "\"" + json_escape(std::get<std::string>(c)) + "\"";
}

Cell parse_csv_cell(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s.empty()) return std::string{};
    const bool numeric_start = (s[0] >= '0' && s[0] <= '9') || s[0] == '-' || s[0] == '+';
    if (numeric_start) {
        try {
            std::size_t used = 0;
            if (s.find_first_of(".eE") != std::string::npos) {
                const double d = std::stod(s, &used);
                if (used == s.size()) return d;
            } else {
                const long long i = std::stoll(s, &used);
                if (used == s.size()) return static_cast<std::int64_t>(i);
            }
        } catch (const std::exception&) {
        }
    }
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

}  // namespace

void write_report(const ExperimentReport& report, std::ostream& out, ReportFormat format, bool include_timing) {
    const auto& cols = report.columns();
    if (format == ReportFormat::Csv) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << '\n';
        for (const auto& row : report.rows()) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
            out << '\n';
        }
        return;
    }
    const auto& m = report.metadata();
    out << "{\n  \"metadata\": {\n";
    out << "    \"kind\": \"" << json_escape(m.kind) << "\",\n";
    out << "    \"spec_hash\": \"" << json_escape(m.spec_hash) << "\",\n";
    out << "    \"seed\": " << m.seed << ",\n";
    out << "    \"library_version\": \"" << json_escape(m.library_version) << "\"";
    if (include_timing) out << ",\n    \"wall_time_seconds\": " << format_double(m.wall_time_seconds);
    out << "\n  },\n  \"columns\": [";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? ", " : "") << "\"" << json_escape(cols[i]) << "\"";
    out << "],\n  \"rows\": [";
    const auto& rows = report.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << (r ? ",\n    {" : "\n    {");
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out << (i ? ", " : "") << "\"" << json_escape(cols[i]) << "\": " << json_cell(rows[r][i]);
        }
        out << "}";
    }
    out << (rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format,
                  bool include_timing) {
    std::ostringstream buffer;
    write_report(report, buffer, format, include_timing);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << buffer.str();
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ExperimentReport read_report(std::istream& in, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string line;
        if (!std::getline(in, line)) throw IoError("report csv: missing header row");
        auto cols = split_csv(line);
        if (cols.empty() || cols.front() != "spec_hash") throw IoError("report csv: first column must be spec_hash");
        std::vector<std::string> value_cols(cols.begin() + 1, cols.end());
        std::vector<std::vector<std::string>> raw;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto cells = split_csv(line);
            if (cells.size() != cols.size()) throw IoError("report csv: wrong field count on line " + std::to_string(lineno));
            raw.push_back(std::move(cells));
        }
        ReportMetadata meta;
        if (!raw.empty()) meta.spec_hash = raw.front().front();
        ExperimentReport report(meta, value_cols);
        for (auto& cells : raw) {
            std::vector<Cell> values;
            for (std::size_t i = 1; i < cells.size(); ++i) values.push_back(parse_csv_cell(cells[i]));
            report.add_row(std::move(values));
        }
        return report;
    }
    nlohmann::ordered_json j;
    try {
        in >> j;
        ReportMetadata meta;
        const auto& m = j.at("metadata");
        meta.kind = m.at("kind").get<std::string>();
        meta.spec_hash = m.at("spec_hash").get<std::string>();
        meta.seed = m.at("seed").get<std::uint64_t>();
        meta.library_version = m.at("library_version").get<std::string>();
        if (m.contains("wall_time_seconds")) meta.wall_time_seconds = m.at("wall_time_seconds").get<double>();
        auto cols = j.at("columns").get<std::vector<std::string>>();
        if (cols.empty() || cols.front() != "spec_hash") throw IoError("report json: first column must be spec_hash");
        ExperimentReport report(meta, std::vector<std::string>(cols.begin() + 1, cols.end()));
        for (const auto& row : j.at("rows")) {
            std::vector<Cell> values;
            for (std::size_t i = 1; i < cols.size(); ++i) {
                const auto& v = row.at(cols[i]);
                if (v.is_null()) values.emplace_back(std::numeric_limits<double>::quiet_NaN());
                else if (v.is_number_float()) values.emplace_back(v.get<double>());
                else if (v.is_number_integer()) values.emplace_back(v.get<std::int64_t>());
                else values.emplace_back(v.get<std::string>());
            }
            report.add_row(std::move(values));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("report json: ") + e.what());
    }
}

ExperimentReport read_report(const std::filesystem::path& path, ReportFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_report(in, format);
}

}  // namespace circulaw
