// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_MANIFEST_HPP
#define NUVA_MANIFEST_HPP

#include <optional>
#include <string>
#include <vector>

namespace nuva {

// Six way response taxonomy assigned by a speech and language therapist.
enum class Category {
  Correct,
  NoResponse,
  Filler,
  PhonologicalError,
  Circumlocution,
  Other,
};

enum class Binary { Correct, Incorrect };

// Correct maps to correct, every other category to incorrect.
Binary relabel_binary(Category c);

const char* to_string(Category c);
const char* to_string(Binary b);
Category parse_category(const std::string& s);
Binary parse_binary(const std::string& s);

struct AttemptRecord {
  std::string patient_id;
  std::string target_word;
  std::string audio_path;
  Category slt1_category = Category::Other;
  Binary slt1_binary = Binary::Incorrect;
  std::optional<Binary> slt2_binary;
};

struct TemplateRecord {
  std::string target_word;
  std::string speaker_id;
  std::string audio_path;
};

// Ground truth plus one prediction column per system, aligned by row.
struct PredictionTable {
  std::vector<std::string> systems;
  struct Row {
    std::string patient_id;
    std::string target_word;
    Binary ground_truth = Binary::Incorrect;
    std::vector<Binary> predictions;
  };
  std::vector<Row> rows;

  std::vector<Binary> truth_column() const;
  std::vector<Binary> system_column(size_t system_index) const;
};

// Loaders preserve file order. Headers must match the documented schemas
// exactly; malformed rows raise SchemaMismatch / UnknownCategory /
// DuplicateKey with the offending row number in the message.
std::vector<AttemptRecord> load_attempts(const std::string& path);
std::vector<TemplateRecord> load_templates(const std::string& path);
PredictionTable load_predictions(const std::string& path);

void write_attempts(const std::string& path, const std::vector<AttemptRecord>& records);
void write_templates(const std::string& path, const std::vector<TemplateRecord>& records);
void write_predictions(const std::string& path, const PredictionTable& table);

} // namespace nuva

#endif
