#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mse/dataset.hpp"

namespace mse {

/// Parse failure with the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
public:
    CsvError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Shortest round-trip decimal representation of a double.
std::string fmt_double(double v);

/// Header `d,y1..yp,z1..zk,x1..xq`; comma separators, period decimals,
/// values written with fmt_double so a round trip is lossless.
void write_dataset_csv(const Dataset& data, std::ostream& os);
Dataset read_dataset_csv(std::istream& is);

void write_dataset_csv_file(const Dataset& data, const std::string& path);
Dataset read_dataset_csv_file(const std::string& path);

} // namespace mse
