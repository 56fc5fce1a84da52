// SPDX-License-Identifier: Apache-2.0
#include "nuva/manifest.hpp"

#include <set>
#include <sstream>

#include "nuva/csv.hpp"
#include "nuva/errors.hpp"

namespace nuva {

namespace {

const std::vector<std::string> kAttemptHeader = {
    "patient_id", "target_word", "audio_path",
    "slt1_category", "slt1_binary", "slt2_binary"};
const std::vector<std::string> kTemplateHeader = {
    "target_word", "speaker_id", "audio_path"};
const std::vector<std::string> kPredictionPrefix = {
    "patient_id", "target_word", "ground_truth"};

void check_header(const std::vector<std::string>& got,
                  const std::vector<std::string>& want,
                  const std::string& path) {
  if (got != want) {
    std::string msg = path + ": unexpected header, want";
    for (const auto& c : want) msg += " " + c;
    throw SchemaMismatch(msg);
  }
}

[[noreturn]] void bad_row(const std::string& path, size_t row, const std::string& what) {
  std::ostringstream msg;
  msg << path << ": row " << row + 1 << ": " << what;
  throw SchemaMismatch(msg.str());
}

} // namespace

Binary relabel_binary(Category c) {
  return c == Category::Correct ? Binary::Correct : Binary::Incorrect;
}

const char* to_string(Category c) {
  switch (c) {
    case Category::Correct: return "Correct";
    case Category::NoResponse: return "NoResponse";
    case Category::Filler: return "Filler";
    case Category::PhonologicalError: return "PhonologicalError";
    case Category::Circumlocution: return "Circumlocution";
    case Category::Other: return "Other";
  }
  return "Other";
}

const char* to_string(Binary b) {
  return b == Binary::Correct ? "correct" : "incorrect";
}

Category parse_category(const std::string& s) {
  if (s == "Correct") return Category::Correct;
  if (s == "NoResponse") return Category::NoResponse;
  if (s == "Filler") return Category::Filler;
  if (s == "PhonologicalError") return Category::PhonologicalError;
  if (s == "Circumlocution") return Category::Circumlocution;
  if (s == "Other") return Category::Other;
  throw UnknownCategory("unknown category: '" + s + "'");
}

Binary parse_binary(const std::string& s) {
  if (s == "correct") return Binary::Correct;
  if (s == "incorrect") return Binary::Incorrect;
  throw SchemaMismatch("unknown binary label: '" + s + "'");
}

std::vector<Binary> PredictionTable::truth_column() const {
  std::vector<Binary> col;
  col.reserve(rows.size());
  for (const auto& r : rows) col.push_back(r.ground_truth);
  return col;
}

std::vector<Binary> PredictionTable::system_column(size_t system_index) const {
  if (system_index >= systems.size()) {
    throw IndexOutOfRange("system column " + std::to_string(system_index) +
                          " out of range, table has " + std::to_string(systems.size()));
  }
  std::vector<Binary> col;
  col.reserve(rows.size());
  for (const auto& r : rows) col.push_back(r.predictions.at(system_index));
  return col;
}

std::vector<AttemptRecord> load_attempts(const std::string& path) {
  CsvTable csv = read_csv(path);
  check_header(csv.header, kAttemptHeader, path);
  std::vector<AttemptRecord> out;
  out.reserve(csv.rows.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    AttemptRecord rec;
    rec.patient_id = row[0];
    rec.target_word = row[1];
    rec.audio_path = row[2];
    if (rec.patient_id.empty() || rec.target_word.empty() || rec.audio_path.empty()) {
      bad_row(path, i + 1, "empty key field");
    }
    try {
      rec.slt1_category = parse_category(row[3]);
      rec.slt1_binary = parse_binary(row[4]);
      if (!row[5].empty()) rec.slt2_binary = parse_binary(row[5]);
    } catch (const UnknownCategory& e) {
      std::ostringstream msg;
      msg << path << ": row " << i + 2 << ": " << e.what();
      throw UnknownCategory(msg.str());
    } catch (const SchemaMismatch& e) {
      std::ostringstream msg;
      msg << path << ": row " << i + 2 << ": " << e.what();
      throw SchemaMismatch(msg.str());
    }
    if (relabel_binary(rec.slt1_category) != rec.slt1_binary) {
      bad_row(path, i + 1, "slt1_binary inconsistent with slt1_category");
    }
    auto key = std::make_pair(rec.patient_id, rec.target_word);
    if (!seen.insert(key).second) {
      std::ostringstream msg;
      msg << path << ": row " << i + 2 << ": duplicate attempt key ("
          << rec.patient_id << ", " << rec.target_word << ")";
      throw DuplicateKey(msg.str());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TemplateRecord> load_templates(const std::string& path) {
  CsvTable csv = read_csv(path);
  check_header(csv.header, kTemplateHeader, path);
  std::vector<TemplateRecord> out;
  out.reserve(csv.rows.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    TemplateRecord rec{row[0], row[1], row[2]};
    if (rec.target_word.empty() || rec.speaker_id.empty() || rec.audio_path.empty()) {
      bad_row(path, i + 1, "empty field");
    }
    auto key = std::make_pair(rec.target_word, rec.speaker_id);
    if (!seen.insert(key).second) {
      std::ostringstream msg;
      msg << path << ": row " << i + 2 << ": duplicate template key ("
          << rec.target_word << ", " << rec.speaker_id << ")";
      throw DuplicateKey(msg.str());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

PredictionTable load_predictions(const std::string& path) {
  CsvTable csv = read_csv(path);
  if (csv.header.size() < 4 ||
      !std::equal(kPredictionPrefix.begin(), kPredictionPrefix.end(), csv.header.begin())) {
    throw SchemaMismatch(path +
        ": header must start with patient_id,target_word,ground_truth and "
        "list at least one system column");
  }
  PredictionTable table;
  table.systems.assign(csv.header.begin() + 3, csv.header.end());
  for (size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    PredictionTable::Row r;
    r.patient_id = row[0];
    r.target_word = row[1];
    try {
      r.ground_truth = parse_binary(row[2]);
      for (size_t s = 3; s < row.size(); ++s) {
        if (row[s].empty()) {
          throw SchemaMismatch("missing prediction for " + csv.header[s]);
        }
        r.predictions.push_back(parse_binary(row[s]));
      }
    } catch (const SchemaMismatch& e) {
      std::ostringstream msg;
      msg << path << ": row " << i + 2 << ": " << e.what();
      throw SchemaMismatch(msg.str());
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

void write_attempts(const std::string& path, const std::vector<AttemptRecord>& records) {
  CsvTable csv;
  csv.header = kAttemptHeader;
  for (const auto& r : records) {
    csv.rows.push_back({r.patient_id, r.target_word, r.audio_path,
                        to_string(r.slt1_category), to_string(r.slt1_binary),
                        r.slt2_binary ? to_string(*r.slt2_binary) : ""});
  }
  write_csv(path, csv);
}

void write_templates(const std::string& path, const std::vector<TemplateRecord>& records) {
  CsvTable csv;
  csv.header = kTemplateHeader;
  for (const auto& r : records) {
    csv.rows.push_back({r.target_word, r.speaker_id, r.audio_path});
  }
  write_csv(path, csv);
}

void write_predictions(const std::string& path, const PredictionTable& table) {
  CsvTable csv;
  csv.header = kPredictionPrefix;
  csv.header.insert(csv.header.end(), table.systems.begin(), table.systems.end());
  for (const auto& r : table.rows) {
    std::vector<std::string> row{r.patient_id, r.target_word, to_string(r.ground_truth)};
    for (Binary b : r.predictions) row.push_back(to_string(b));
    csv.rows.push_back(std::move(row));
  }
  write_csv(path, csv);
}

} // namespace nuva
