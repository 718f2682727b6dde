#pragma once

// Tabular series ingestion: CSV rows of "label,value" become coefficient
// grids on [0,1] with n = length - 1. The lattice of a length-m series has
// only m-1 cells, so by default the final datum is reported unused; the
// endpoint mode extends the lattice by one index so every datum lands on a
// node k/n.

#include <filesystem>
#include <string>
#include <vector>

#include "maxprod/operator.hpp"

namespace maxprod {

struct Series {
    std::vector<std::string> labels;
    std::vector<double> values;

    size_t size() const { return values.size(); }
};

// Two columns "label,value"; an optional header is detected by a non-numeric
// second field on the first line. Malformed rows report their line number.
Series load_series_csv(const std::filesystem::path& path);

struct SeriesCoefficients {
    CoefficientGrid grid;
    bool endpoint_included = false;
    int unused_trailing = 0;  // data that did not enter the grid (0 or 1)
};

SeriesCoefficients series_to_coefficients(const Series& series, bool include_endpoint);

}  // namespace maxprod
