#include "mse/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace mse {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& field, int line, const std::string& column) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw CsvError(line, "malformed numeric value '" + field + "' in column " + column);
    return v;
}

// Expected column block: name prefix followed by 1-based indices.
Eigen::Index count_block(const std::vector<std::string>& header,
                         std::size_t& pos, const std::string& prefix) {
    Eigen::Index count = 0;
    while (pos < header.size() &&
           header[pos] == prefix + std::to_string(count + 1)) {
        ++count;
        ++pos;
    }
    if (count == 0)
        throw CsvError(1, "expected column '" + prefix + "1' in header");
    return count;
}

} // namespace

std::string fmt_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_dataset_csv(const Dataset& data, std::ostream& os) {
    os << "d";
    for (Eigen::Index c = 0; c < data.p(); ++c) os << ",y" << (c + 1);
    for (Eigen::Index c = 0; c < data.k(); ++c) os << ",z" << (c + 1);
    for (Eigen::Index c = 0; c < data.q(); ++c) os << ",x" << (c + 1);
    os << "\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        os << data.d(i);
        for (Eigen::Index c = 0; c < data.p(); ++c) os << ',' << fmt_double(data.y(i, c));
        for (Eigen::Index c = 0; c < data.k(); ++c) os << ',' << fmt_double(data.z(i, c));
        for (Eigen::Index c = 0; c < data.q(); ++c) os << ',' << fmt_double(data.x(i, c));
        os << "\n";
    }
}

Dataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvError(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_fields(line);
    if (header.empty() || header[0] != "d")
        throw CsvError(1, "first header column must be 'd'");
    std::size_t pos = 1;
    const Eigen::Index p = count_block(header, pos, "y");
    const Eigen::Index k = count_block(header, pos, "z");
    const Eigen::Index q = count_block(header, pos, "x");
    if (pos != header.size())
        throw CsvError(1, "unexpected trailing header column '" + header[pos] + "'");
    const std::size_t width = header.size();

    std::vector<int> ds;
    std::vector<double> vals; // row-major y|z|x blocks
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != width)
            throw CsvError(line_no, "expected " + std::to_string(width) + " fields, got " +
                                        std::to_string(fields.size()));
        if (fields[0] != "0" && fields[0] != "1")
            throw CsvError(line_no, "choice column d must be 0 or 1, got '" + fields[0] + "'");
        ds.push_back(fields[0] == "1" ? 1 : 0);
        for (std::size_t f = 1; f < width; ++f)
            vals.push_back(parse_double(fields[f], line_no, header[f]));
    }
    if (ds.empty()) throw CsvError(line_no, "dataset has no observations");

    const auto n = static_cast<Eigen::Index>(ds.size());
    Dataset data;
    data.d.resize(n);
    data.y.resize(n, p);
    data.z.resize(n, k);
    data.x.resize(n, q);
    const std::size_t row_width = static_cast<std::size_t>(p + k + q);
    for (Eigen::Index i = 0; i < n; ++i) {
        data.d(i) = ds[static_cast<std::size_t>(i)];
        const double* row = vals.data() + static_cast<std::size_t>(i) * row_width;
        for (Eigen::Index c = 0; c < p; ++c) data.y(i, c) = row[c];
        for (Eigen::Index c = 0; c < k; ++c) data.z(i, c) = row[p + c];
        for (Eigen::Index c = 0; c < q; ++c) data.x(i, c) = row[p + k + c];
    }
    return data;
}

void write_dataset_csv_file(const Dataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    write_dataset_csv(data, os);
    if (!os) throw std::ios_base::failure("write failed for '" + path + "'");
}

Dataset read_dataset_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::ios_base::failure("cannot open '" + path + "' for reading");
    return read_dataset_csv(is);
}

} // namespace mse
