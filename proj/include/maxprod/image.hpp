#pragma once

// Grayscale image ingestion and rendering. Images live on the fixed domain
// [0,1]^2 regardless of aspect ratio; block means over the lattice cells
// (pixel centers, half-open cells, last cell closed) become coefficients
// normalized to [0,1], and fields are re-quantized on the way out.
//
// PGM (P2 ASCII / P5 binary) is the interchange format; '#' comments are
// tolerated on read and never written.

#include <filesystem>
#include <vector>

#include "maxprod/operator.hpp"

namespace maxprod {

struct GrayImage {
    int width = 0;
    int height = 0;
    int maxval = 255;                      // 1..65535
    std::vector<int> pixels;               // row-major, row*width+col

    int at(int col, int row) const { return pixels[static_cast<size_t>(row) * width + col]; }
};

enum class PgmFormat { Binary, Ascii };

GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              PgmFormat format = PgmFormat::Binary);

// Block means over the n x n lattice on [0,1]^2, normalized by maxval.
// Requires n <= min(width, height); every pixel lands in exactly one cell.
CoefficientGrid image_to_coefficients(const GrayImage& image, int n);

struct QuantizedField {
    GrayImage image;
    long long clamped_count = 0;  // field values outside [0,1] before rounding
};

// pixel = round(clamp(value, 0, 1) * maxval), halves rounding up. The field
// must be 2D; image dimensions equal the field resolution.
QuantizedField field_to_image(const ScalarField& field, int maxval = 255);

}  // namespace maxprod
