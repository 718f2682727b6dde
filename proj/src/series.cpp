#include "maxprod/series.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace maxprod {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

bool parse_value(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

Series load_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open series file: " + path.string());

    Series series;
    std::string line;
    long line_number = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            std::ostringstream os;
            os << path.string() << ":" << line_number << ": expected 'label,value'";
            throw DataError(os.str());
        }
        const std::string label = trim(line.substr(0, comma));
        const std::string value_text = line.substr(comma + 1);
        double value = 0.0;
        if (!parse_value(value_text, value)) {
            if (first_content_line) {  // header row
                first_content_line = false;
                continue;
            }
            std::ostringstream os;
            os << path.string() << ":" << line_number << ": non-numeric value '"
               << trim(value_text) << "'";
            throw DataError(os.str());
        }
        first_content_line = false;
        series.labels.push_back(label);
        series.values.push_back(value);
    }
    if (series.size() < 2)
        throw DataError("series file " + path.string() +
                        " needs at least two data rows");
    return series;
}

SeriesCoefficients series_to_coefficients(const Series& series, bool include_endpoint) {
    if (series.size() < 2 || series.labels.size() != series.values.size())
        throw ContractError("series needs matching labels/values with length >= 2");
    const int n = static_cast<int>(series.size()) - 1;
    const BoxDomain domain = BoxDomain::interval(0.0, 1.0);

    std::vector<double> coeffs(series.values.begin(),
                               include_endpoint ? series.values.end()
                                                : series.values.end() - 1);
    CoefficientGrid grid =
        CoefficientGrid::from_values(std::move(coeffs), n, domain, include_endpoint);
    return SeriesCoefficients{std::move(grid), include_endpoint,
                              include_endpoint ? 0 : 1};
}

}  // namespace maxprod
