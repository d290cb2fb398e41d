#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "circulaw/ensemble.hpp"
#include "circulaw/linalg.hpp"

namespace circulaw {

/// Entry point behind the `circulaw` executable. Returns the exit code:
/// 0 success, 2 usage or configuration error, 3 numeric failure, 4 I/O failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV `re,im`, one eigenvalue per line.
void write_spectrum_csv(const ComplexSpectrum& spectrum, std::ostream& out);
/// Reads a CSV with `re` and `im` columns. Throws IoError naming the line.
std::vector<Complex> read_spectrum_csv(std::istream& in);

/// CSV `row,col,re,im` of all entries.
void write_matrix_csv(const MatrixSample& sample, std::ostream& out);

/// Standalone SVG scatter of the points, optionally with the unit circle.
void plot_spectrum(const std::vector<Complex>& points, std::ostream& svg, bool overlay_unit_circle);
/// Reads `csv_in` and writes the plot to `svg_out`.
void plot_spectrum(const std::string& csv_in, const std::string& svg_out, bool overlay_unit_circle);

}  // namespace circulaw
