#include "tenfac/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace tenfac {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

double parse_double(std::string_view field, const std::filesystem::path& path) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw IoError("bad number '" + std::string(field) + "' in '" + path.string() + "'");
    }
    return v;
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path) {
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
        auto comma = rest.find(',');
        row.push_back(parse_double(rest.substr(0, comma), path));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    return row;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

} // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void write_tsr(const TensorSeries& x, const std::filesystem::path& path) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    std::string header = "TSR1 " + std::to_string(x.order());
    for (auto p : x.shape()) {
        header += ' ' + std::to_string(p);
    }
    header += ' ' + std::to_string(x.length()) + '\n';
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const auto& slice : x.slices()) {
        for (double v : slice.data()) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            if constexpr (std::endian::native == std::endian::big) {
                bits = __builtin_bswap64(bits);
            }
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
    finish(out, path);
}

TensorSeries read_tsr(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    std::string header;
    if (!std::getline(in, header)) {
        throw IoError("'" + path.string() + "' is empty");
    }
    std::istringstream hs(header);
    std::string magic;
    long long order = 0;
    hs >> magic >> order;
    if (magic != "TSR1" || !hs || order < 1) {
        throw IoError("'" + path.string() + "' is not a TSR1 file");
    }
    Shape shape(static_cast<std::size_t>(order));
    for (auto& p : shape) {
        long long v = 0;
        hs >> v;
        p = v;
    }
    long long T = 0;
    hs >> T;
    if (!hs || T < 1) {
        throw IoError("malformed TSR1 header in '" + path.string() + "'");
    }
    for (auto p : shape) {
        if (p < 1) {
            throw IoError("malformed TSR1 header in '" + path.string() + "'");
        }
    }
    const auto n = static_cast<std::size_t>(shape_size(shape));
    std::vector<DenseTensor> slices;
    slices.reserve(static_cast<std::size_t>(T));
    std::vector<std::uint64_t> raw(n);
    for (long long t = 0; t < T; ++t) {
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * sizeof(std::uint64_t)));
        if (in.gcount() != static_cast<std::streamsize>(n * sizeof(std::uint64_t))) {
            throw IoError("'" + path.string() + "' is truncated");
        }
        std::vector<double> data(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto bits = raw[i];
            if constexpr (std::endian::native == std::endian::big) {
                bits = __builtin_bswap64(bits);
            }
            data[i] = std::bit_cast<double>(bits);
        }
        slices.emplace_back(shape, std::move(data));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw IoError("'" + path.string() + "' has trailing data");
    }
    return TensorSeries(std::move(slices));
}

void write_series_csv(const TensorSeries& x, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& slice : x.slices()) {
        bool first = true;
        for (double v : slice.data()) {
            if (!first) {
                out << ',';
            }
            out << format_double(v);
            first = false;
        }
        out << '\n';
    }
    finish(out, path);
}

TensorSeries read_series_csv(const std::filesystem::path& path, const Shape& shape) {
    auto in = open_in(path);
    const Index n = shape_size(shape);
    std::vector<DenseTensor> slices;
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line)) {
            continue;
        }
        auto row = parse_row(line, path);
        if (static_cast<Index>(row.size()) != n) {
            throw IoError("row " + std::to_string(slices.size() + 1) + " of '" + path.string() + "' has " +
                          std::to_string(row.size()) + " values, expected " + std::to_string(n));
        }
        slices.emplace_back(shape, std::move(row));
    }
    if (slices.empty()) {
        throw IoError("'" + path.string() + "' holds no rows");
    }
    return TensorSeries(std::move(slices));
}

TensorSeries read_series(const std::filesystem::path& path, const std::optional<Shape>& shape) {
    if (path.extension() == ".csv") {
        if (!shape) {
            throw IoError("reading a CSV series needs an explicit shape");
        }
        return read_series_csv(path, *shape);
    }
    return read_tsr(path);
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    finish(out, path);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line)) {
            continue;
        }
        rows.push_back(parse_row(line, path));
        if (rows.back().size() != rows.front().size()) {
            throw IoError("ragged matrix in '" + path.string() + "'");
        }
    }
    if (rows.empty()) {
        throw IoError("'" + path.string() + "' holds no rows");
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return m;
}

} // namespace tenfac
