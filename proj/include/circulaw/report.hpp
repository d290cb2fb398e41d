#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace circulaw {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

using Cell = std::variant<double, std::int64_t, std::string>;

struct ReportMetadata {
    std::string kind;
    std::string spec_hash;
    std::uint64_t seed = 0;
    std::string library_version{kLibraryVersion};
    /// Not serialized unless explicitly requested: it would break byte-level
    /// reproducibility of reports.
    double wall_time_seconds = 0.0;
};

/// Tabular experiment output. The first column is always `spec_hash`.
class ExperimentReport {
public:
    ExperimentReport() = default;
    ExperimentReport(ReportMetadata metadata, std::vector<std::string> value_columns);

    const ReportMetadata& metadata() const noexcept { return metadata_; }
    ReportMetadata& metadata() noexcept { return metadata_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

    /// Appends a row; `values` covers every column except spec_hash.
    void add_row(std::vector<Cell> values);

    std::size_t column_index(std::string_view name) const;
    const Cell& at(std::size_t row, std::string_view column) const;
    /// Numeric cell as double (integers converted). Throws UsageError for strings.
    double number(std::size_t row, std::string_view column) const;

    friend bool operator==(const ExperimentReport&, const ExperimentReport&);

private:
    ReportMetadata metadata_;
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

enum class ReportFormat { Csv, Json };

ReportFormat format_from_name(std::string_view name);
/// Format implied by a file extension (.csv / .json); Json otherwise.
ReportFormat format_for_path(const std::filesystem::path& path);

/// Doubles use 17 significant digits and always carry a '.' or exponent so
/// they read back as doubles.
std::string format_double(double value);

void write_report(const ExperimentReport& report, std::ostream& out, ReportFormat format,
                  bool include_timing = false);
/// Throws IoError with the path on failure.
void write_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format,
                  bool include_timing = false);

ExperimentReport read_report(std::istream& in, ReportFormat format);
ExperimentReport read_report(const std::filesystem::path& path, ReportFormat format);

}  // namespace circulaw
