#include "maxprod/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace maxprod {

namespace {

// Reads header tokens, skipping whitespace and '#' comments.
bool next_header_token(std::istream& in, std::string& token) {
    token.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c != EOF) in.unget();  // leave the terminator (P5 needs exactly one)
    return !token.empty();
}

long parse_header_int(std::istream& in, const std::string& path, const char* what) {
    std::string token;
    if (!next_header_token(in, token))
        throw DataError(path + ": truncated header, missing " + std::string(what));
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size())
        throw DataError(path + ": bad " + std::string(what) + " '" + token + "'");
    return v;
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image file: " + path.string());

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        throw DataError(path.string() + ": unsupported format, expected PGM magic P2 or P5");
    const bool binary = magic[1] == '5';

    const long width = parse_header_int(in, path.string(), "width");
    const long height = parse_header_int(in, path.string(), "height");
    const long maxval = parse_header_int(in, path.string(), "maxval");
    if (width < 1 || height < 1)
        throw DataError(path.string() + ": non-positive image dimensions");
    if (maxval < 1 || maxval > 65535)
        throw DataError(path.string() + ": maxval must be in [1, 65535]");

    GrayImage image;
    image.width = static_cast<int>(width);
    image.height = static_cast<int>(height);
    image.maxval = static_cast<int>(maxval);
    const size_t count = static_cast<size_t>(width) * static_cast<size_t>(height);
    image.pixels.resize(count);

    if (binary) {
        const int c = in.get();  // single whitespace byte after maxval
        if (c == EOF || !std::isspace(c))
            throw DataError(path.string() + ": malformed P5 header terminator");
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(count * bytes);
        in.read(reinterpret_cast<char*>(raw.data()),
                static_cast<std::streamsize>(raw.size()));
        if (static_cast<size_t>(in.gcount()) != raw.size())
            throw DataError(path.string() + ": truncated P5 payload");
        for (size_t i = 0; i < count; ++i) {
            const int v = bytes == 1
                              ? raw[i]
                              : (static_cast<int>(raw[2 * i]) << 8) | raw[2 * i + 1];
            if (v > maxval)
                throw DataError(path.string() + ": pixel value exceeds maxval");
            image.pixels[i] = v;
        }
    } else {
        for (size_t i = 0; i < count; ++i) {
            const long v = parse_header_int(in, path.string(), "pixel");
            if (v < 0 || v > maxval)
                throw DataError(path.string() + ": pixel value out of range");
            image.pixels[i] = static_cast<int>(v);
        }
    }
    return image;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              PgmFormat format) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() !=
            static_cast<size_t>(image.width) * static_cast<size_t>(image.height))
        throw ContractError("save_pgm: inconsistent image dimensions");
    if (image.maxval < 1 || image.maxval > 65535)
        throw ContractError("save_pgm: maxval must be in [1, 65535]");
    for (int v : image.pixels) {
        if (v < 0 || v > image.maxval)
            throw ContractError("save_pgm: pixel value out of range");
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write image file: " + path.string());

    if (format == PgmFormat::Binary) {
        out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
        const int bytes = image.maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw;
        raw.reserve(image.pixels.size() * bytes);
        for (int v : image.pixels) {
            if (bytes == 2) raw.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
            raw.push_back(static_cast<unsigned char>(v & 0xff));
        }
        out.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    } else {
        out << "P2\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
        // plain-format lines are kept under 70 characters
        int line_len = 0;
        for (size_t i = 0; i < image.pixels.size(); ++i) {
            const std::string token = std::to_string(image.pixels[i]);
            if (line_len == 0) {
                out << token;
                line_len = static_cast<int>(token.size());
            } else if (line_len + 1 + static_cast<int>(token.size()) > 69) {
                out << '\n' << token;
                line_len = static_cast<int>(token.size());
            } else {
                out << ' ' << token;
                line_len += 1 + static_cast<int>(token.size());
            }
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing image file: " + path.string());
}

CoefficientGrid image_to_coefficients(const GrayImage& image, int n) {
    if (n < 1) throw ContractError("image coefficients: n must be positive");
    if (n > std::min(image.width, image.height)) {
        std::ostringstream os;
        os << "image coefficients: n=" << n << " exceeds min(width,height)="
           << std::min(image.width, image.height)
           << "; a lattice cell would receive no pixel";
        throw ContractError(os.str());
    }

    std::vector<double> sums(static_cast<size_t>(n) * n, 0.0);
    std::vector<long long> counts(static_cast<size_t>(n) * n, 0);
    for (int row = 0; row < image.height; ++row) {
        const double cy = (static_cast<double>(row) + 0.5) / image.height;
        int ky = static_cast<int>(cy * n);
        ky = std::min(ky, n - 1);  // last cell closed
        for (int col = 0; col < image.width; ++col) {
            const double cx = (static_cast<double>(col) + 0.5) / image.width;
            int kx = static_cast<int>(cx * n);
            kx = std::min(kx, n - 1);
            const size_t cell = static_cast<size_t>(ky) * n + kx;
            sums[cell] += image.at(col, row);
            counts[cell] += 1;
        }
    }

    std::vector<double> coefficients(sums.size());
    for (size_t i = 0; i < sums.size(); ++i) {
        if (counts[i] == 0) {
            std::ostringstream os;
            os << "image coefficients: cell " << i
               << " received no pixel centers; choose a smaller n";
            throw DataError(os.str());
        }
        coefficients[i] =
            sums[i] / static_cast<double>(counts[i]) / static_cast<double>(image.maxval);
    }
    return CoefficientGrid::from_values(std::move(coefficients), n,
                                        BoxDomain::unit_square());
}

QuantizedField field_to_image(const ScalarField& field, int maxval) {
    if (field.domain.dimension() != 2)
        throw ContractError("field_to_image: field must be two-dimensional");
    if (maxval < 1 || maxval > 65535)
        throw ContractError("field_to_image: maxval must be in [1, 65535]");

    QuantizedField out;
    out.image.width = field.resolution[0];
    out.image.height = field.resolution[1];
    out.image.maxval = maxval;
    out.image.pixels.resize(field.values.size());
    for (size_t i = 0; i < field.values.size(); ++i) {
        const double v = field.values[i];
        if (v < 0.0 || v > 1.0) ++out.clamped_count;
        const double clamped = std::min(1.0, std::max(0.0, v));
        out.image.pixels[i] =
            static_cast<int>(std::floor(clamped * static_cast<double>(maxval) + 0.5));
    }
    return out;
}

}  // namespace maxprod
