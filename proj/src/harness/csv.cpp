#include "biotdsp/harness/csv.hpp"

#include "biotdsp/errors.hpp"

#include <fstream>

namespace biotdsp
{

namespace
{
const char *kModule = "cli-harness";
}

std::string csv_field(const std::string &s)
{
   if (s.find_first_of(",\"\n") == std::string::npos) { return s; }
   std::string out = "\"";
   for (char c : s)
   {
      if (c == '"') { out += '"'; }
      out += c;
   }
   return out + "\"";
}

std::string csv_line(const std::vector<std::string> &fields)
{
   std::string out;
   for (std::size_t i = 0; i < fields.size(); ++i)
   {
      if (i > 0) { out += ','; }
      out += csv_field(fields[i]);
   }
   return out;
}

std::vector<std::string> csv_split(const std::string &line)
{
   std::vector<std::string> out(1);
   bool quoted = false;
   for (std::size_t i = 0; i < line.size(); ++i)
   {
      const char c = line[i];
      if (quoted)
      {
         if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
         {
            out.back() += '"';
            ++i;
         }
         else if (c == '"') { quoted = false; }
         else { out.back() += c; }
      }
      else if (c == '"') { quoted = true; }
      else if (c == ',') { out.emplace_back(); }
      else { out.back() += c; }
   }
   return out;
}

std::optional<std::size_t> CsvTable::column(const std::string &name) const
{
   for (std::size_t i = 0; i < header.size(); ++i)
   {
      if (header[i] == name) { return i; }
   }
   return std::nullopt;
}

std::string CsvTable::get(std::size_t row, const std::string &name) const
{
   const auto c = column(name);
   if (!c || row >= rows.size()) { return {}; }
   return rows[row][*c];
}

CsvTable read_csv(const std::filesystem::path &file)
{
   std::ifstream in(file);
   if (!in) { throw ConfigError(kModule, "cannot open '" + file.string() + "'"); }
   CsvTable t;
   std::string line;
   std::size_t lineno = 0;
   while (std::getline(in, line))
   {
      ++lineno;
      if (!line.empty() && line.back() == '\r') { line.pop_back(); }
      if (line.empty()) { continue; }
      auto fields = csv_split(line);
      if (t.header.empty())
      {
         t.header = std::move(fields);
         continue;
      }
      if (fields.size() != t.header.size())
      {
         throw ParseError(kModule, lineno,
                          file.filename().string() + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
      }
      t.rows.push_back(std::move(fields));
   }
   return t;
}

} // namespace biotdsp
