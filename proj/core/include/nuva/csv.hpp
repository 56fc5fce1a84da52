// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_CSV_HPP
#define NUVA_CSV_HPP

#include <string>
#include <vector>

namespace nuva {

// Minimal RFC-4180 style CSV. Fields may be quoted with '"'; quotes inside a
// quoted field are doubled. Rows are LF or CRLF terminated.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv_line(const std::vector<std::string>& fields);

// Reads the whole file. Throws SchemaMismatch on unreadable file, ragged rows
// or a missing header line.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

} // namespace nuva

#endif
