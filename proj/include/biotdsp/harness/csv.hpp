#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace biotdsp
{

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(const std::string &s);
/// Joins fields with commas, quoting as needed; no trailing newline.
std::string csv_line(const std::vector<std::string> &fields);
/// Splits one CSV record with double-quote escaping.
std::vector<std::string> csv_split(const std::string &line);

struct CsvTable
{
   std::vector<std::string> header;
   std::vector<std::vector<std::string>> rows;

   /// Column index by header name.
   std::optional<std::size_t> column(const std::string &name) const;
   /// Field of a row by column name; empty when absent.
   std::string get(std::size_t row, const std::string &name) const;
};

/// Reads a CSV file whose first record is the header. Throws ParseError
/// on a record whose field count differs from the header.
CsvTable read_csv(const std::filesystem::path &file);

} // namespace biotdsp
