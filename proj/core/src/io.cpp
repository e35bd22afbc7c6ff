#include "gcm/io.hpp"

#include "gcm/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace gcm::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(std::string_view source, std::size_t line, const std::string& what) {
    throw Error(ErrorKind::Parse, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double parse_field(std::string_view field, std::string_view source, std::size_t line) {
    const std::string text(trim(field));
    if (text.empty()) {
        parse_error(source, line, "empty field");
    }
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    // underflow to a subnormal is a valid read-back, overflow is not
    if (end != text.c_str() + text.size() || !std::isfinite(value)) {
        parse_error(source, line, "not a finite number: '" + text + "'");
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string format_matrix_csv(const Matrix& a) {
    std::string out;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j > 0) {
                out += ',';
            }
            out += format_double(a(i, j));
        }
        out += '\n';
    }
    return out;
}

Matrix parse_matrix_csv(std::string_view text, bool header, std::string_view source) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool skipped_header = !header;
    while (pos < text.size()) {
        auto next = text.find('\n', pos);
        if (next == std::string_view::npos) {
            next = text.size();
        }
        const std::string_view line = text.substr(pos, next - pos);
        pos = next + 1;
        ++line_no;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        if (trim(line).empty()) {
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto field = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                   : comma - start);
            row.push_back(parse_field(field, source, line_no));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            parse_error(source, line_no,
                        "expected " + std::to_string(rows.front().size()) + " fields, found " +
                            std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw Error(ErrorKind::Parse, std::string(source) + ": no data rows");
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::Io, "failed reading " + path.string());
    }
    return buf.str();
}

Matrix read_matrix_csv(const std::filesystem::path& path, bool header) {
    return parse_matrix_csv(read_file(path), header, path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw Error(ErrorKind::Io, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot move " + tmp.string() + " into place");
    }
}

}  // namespace gcm::io
