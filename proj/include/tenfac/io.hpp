#ifndef TENFAC_IO_HPP
#define TENFAC_IO_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "tenfac/tensor.hpp"

/**
 * @file io.hpp
 * @brief Tensor-series and matrix files.
 *
 * TSR1: an ASCII header line "TSR1 K p_1 ... p_K T\n" followed by
 * T * prod(p_k) little-endian float64 values, column-major within each slice,
 * slices in time order.
 *
 * Series CSV: one row per time slice holding the slice in column-major order,
 * no header; the shape has to be supplied when reading.
 *
 * Matrix CSV: one line per matrix row, comma-separated, no header.
 *
 * Doubles are written in shortest round-trip form, so text files re-parse
 * bit-exactly.
 */

namespace tenfac {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

void write_tsr(const TensorSeries& x, const std::filesystem::path& path);
TensorSeries read_tsr(const std::filesystem::path& path);

void write_series_csv(const TensorSeries& x, const std::filesystem::path& path);
TensorSeries read_series_csv(const std::filesystem::path& path, const Shape& shape);

/// Reads CSV when the extension is .csv (shape required), TSR1 otherwise.
TensorSeries read_series(const std::filesystem::path& path, const std::optional<Shape>& shape = std::nullopt);

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

} // namespace tenfac

#endif
