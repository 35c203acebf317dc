#include "amortize/app/csv.hpp"

#include "amortize/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace amortize::app {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string where(const std::string& source, std::size_t line) {
    return source + ", line " + std::to_string(line);
}

double parse_number(const std::string& text, const std::string& column, const std::string& at) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw DataError(at + ": " + column + " '" + text + "' is not a number");
    }
    if (!std::isfinite(value)) throw DataError(at + ": " + column + " '" + text + "' is not finite");
    return value;
}

int parse_int(const std::string& text, const std::string& column, const std::string& at) {
    int value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw DataError(at + ": " + column + " '" + text + "' is not an integer");
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");
    return in;
}

}  // namespace

sim::TrialTable parse_rt_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError(source + ": empty file, expected header 'rt,choice,condition'");
    ++line_no;
    {
        auto fields = split_fields(line);
        for (auto& f : fields) f = trim(f);
        if (fields != std::vector<std::string>{"rt", "choice", "condition"}) {
            throw DataError(where(source, 1) + ": bad header '" + trim(line) + "', expected 'rt,choice,condition'");
        }
    }
    sim::TrialTable table;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string at = where(source, line_no);
        auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw DataError(at + ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        for (auto& f : fields) f = trim(f);
        sim::Trial t;
        t.rt = parse_number(fields[0], "rt", at);
        if (t.rt <= 0.0) throw DataError(at + ": rt must be positive, got " + fields[0]);
        t.choice = parse_int(fields[1], "choice", at);
        if (t.choice != 0 && t.choice != 1) throw DataError(at + ": choice must be 0 or 1, got " + fields[1]);
        t.condition = parse_int(fields[2], "condition", at);
        if (t.condition < 1 || t.condition > static_cast<int>(sim::kConditions)) {
            throw DataError(at + ": condition must be in 1..4, got " + fields[2]);
        }
        table.trials.push_back(t);
    }
    return table;
}

sim::TrialTable ingest_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_rt_csv(in, path.string());
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw ContractError("cannot format number");
    return std::string(buf, ptr);
}

std::string format_rt_csv(const sim::TrialTable& table) {
    std::string out = "rt,choice,condition\n";
    for (const auto& t : table.trials) {
        out += format_double(t.rt);
        out += ',';
        out += std::to_string(t.choice);
        out += ',';
        out += std::to_string(t.condition);
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void write_rt_csv(const sim::TrialTable& table, const std::filesystem::path& path) {
    write_text(path, format_rt_csv(table));
}

diff::Tensor ingest_numeric_csv(const std::filesystem::path& path, std::size_t columns) {
    auto in = open_input(path);
    const std::string source = path.string();
    std::string line;
    if (!std::getline(in, line)) throw DataError(source + ": empty file");
    const auto header = split_fields(line);
    if (header.size() != columns) {
        throw DataError(where(source, 1) + ": expected " + std::to_string(columns) + " header columns, got " +
                        std::to_string(header.size()));
    }
    std::vector<double> values;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        const std::string at = where(source, line_no);
        if (fields.size() != columns) {
            throw DataError(at + ": expected " + std::to_string(columns) + " fields, got " +
                            std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < columns; ++c) values.push_back(parse_number(trim(fields[c]), trim(header[c]), at));
        ++rows;
    }
    if (rows == 0) throw DataError(source + ": no data rows");
    return diff::Tensor({rows, columns}, std::move(values));
}

std::string format_numeric_csv(const std::vector<std::string>& header, const diff::Tensor& values) {
    if (header.size() != values.cols()) throw DimensionError("CSV header width does not match the table");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(values(r, c));
        }
        out += '\n';
    }
    return out;
}

}  // namespace amortize::app
