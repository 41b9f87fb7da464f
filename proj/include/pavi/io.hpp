#pragma once

#include <string>
#include <vector>

#include "pavi/dataset.hpp"
#include "pavi/variable_set.hpp"

namespace pavi {

/// CSV ingestion: comma-separated, mandatory header row, numeric cells only.
/// The response column is extracted by name; binomial responses must be 0/1.
/// Parse failures, missing values and missing columns raise structured
/// errors carrying the file location.
Dataset load_dataset(const std::string& path, const std::string& response, Family family);

struct NamedModel {
    std::string name;
    VariableSet set;
};

/// One model per line, either "name: i,j,k" or CSV "name,i,j,k" (the index
/// field may be quoted). Blank lines and lines starting with '#' are
/// skipped. Duplicate indices and indices above `max_index` (when positive)
/// are rejected with the model named in the error.
std::vector<NamedModel> parse_model_list(const std::string& text, int max_index = 0);
std::vector<NamedModel> load_model_list(const std::string& path, int max_index = 0);

/// Rectangular text table; all values pre-rendered.
struct TextTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// 6 significant digits, '.' decimal.
std::string format_number(double value);

/// Tab-separated with a header row, written to a temp file and renamed.
void write_tsv(const std::string& path, const TextTable& table);
TextTable read_tsv(const std::string& path);

}  // namespace pavi
