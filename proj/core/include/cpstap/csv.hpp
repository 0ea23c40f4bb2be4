#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cpstap {

// RFC-4180 field quoting: wrap in quotes when the field holds a comma,
// quote, CR or LF; double embedded quotes.
std::string csv_escape(const std::string& field);

// Nine significant digits, "%.9g". Non-finite values print as inf/-inf/nan.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& os_;
};

}  // namespace cpstap
