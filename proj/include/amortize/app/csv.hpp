#pragma once

#include "amortize/diff/tensor.hpp"
#include "amortize/sim/lfm.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace amortize::app {

/// Reads an `rt,choice,condition` table. Errors are DataErrors naming the line.
sim::TrialTable ingest_csv(const std::filesystem::path& path);
sim::TrialTable parse_rt_csv(std::istream& in, const std::string& source = "<stream>");

/// Canonical form: fixed header, shortest round-trip decimal rt, "\n" line ends.
std::string format_rt_csv(const sim::TrialTable& table);
void write_rt_csv(const sim::TrialTable& table, const std::filesystem::path& path);

/// Plain numeric table with a header row whose column count must equal `columns`.
diff::Tensor ingest_numeric_csv(const std::filesystem::path& path, std::size_t columns);

/// Header plus one line per row of `values`.
std::string format_numeric_csv(const std::vector<std::string>& header, const diff::Tensor& values);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace amortize::app
