#include "exsis/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace exsis {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    const char* ptr = line.data();
    const char* end = ptr + line.size();
    while (ptr < end) {
        while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == ',' || *ptr == '\r')) ++ptr;
        if (ptr >= end) break;
        double value = 0.0;
        auto [next, ec] = std::from_chars(ptr, end, value);
        if (ec != std::errc()) return false;
        out.push_back(value);
        ptr = next;
    }
    return true;
}

Matrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        if (!parse_row(line, row) || row.empty()) {
            if (first) {  // header line
                first = false;
                continue;
            }
            throw io_error("unparseable row in " + path.string());
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw io_error("ragged rows in " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw io_error("no data rows in " + path.string());
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void save_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out.precision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

Matrix load_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::uint32_t n = 0, p = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&p), 4);
    if (!in || n == 0 || p == 0) throw io_error("bad binary header in " + path.string());
    Matrix m(static_cast<Index>(n), static_cast<Index>(p));
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * n * p));
    if (!in) throw io_error("truncated binary matrix " + path.string());
    return m;
}

void save_bin(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t p = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&p), 4);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
}

bool is_binary(const std::filesystem::path& path) {
    return path.extension() == ".bin";
}

}  // namespace

Matrix load_matrix(const std::filesystem::path& path) {
    return is_binary(path) ? load_bin(path) : load_csv(path);
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
    if (is_binary(path))
        save_bin(path, m);
    else
        save_csv(path, m);
}

Vector load_vector(const std::filesystem::path& path) {
    Matrix m = load_matrix(path);
    if (m.cols() != 1) throw io_error("expected a single column in " + path.string());
    return m.col(0);
}

void save_vector(const std::filesystem::path& path, const Vector& v) {
    Matrix m(v.size(), 1);
    m.col(0) = v;
    save_matrix(path, m);
}

}  // namespace exsis
