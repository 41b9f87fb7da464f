#include "pavi/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pavi/errors.hpp"

namespace pavi {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
        size_t next = line.find(sep, pos);
        if (next == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return fields;
}

double parse_cell(const std::string& raw, int line_no, const std::string& column) {
    std::string cell = trim(raw);
    std::string where = "line " + std::to_string(line_no) + ", column " + column;
    if (cell.empty()) throw Error("missing-value", "empty cell", where);
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
        throw Error("csv-parse", "non-numeric cell '" + cell + "'", where);
    }
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("file-open", "cannot open file", path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

Dataset load_dataset(const std::string& path, const std::string& response, Family family) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw Error("csv-parse", "empty file", path);
    std::vector<std::string> header = split(trim(line), ',');
    for (auto& h : header) h = trim(h);

    int response_col = -1;
    for (size_t j = 0; j < header.size(); ++j) {
        if (header[j] == response) {
            response_col = static_cast<int>(j);
            break;
        }
    }
    if (response_col < 0) {
        throw Error("missing-column", "response column not found", response);
    }

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        std::vector<std::string> cells = split(t, ',');
        if (cells.size() != header.size()) {
            throw Error("csv-parse", "row has " + std::to_string(cells.size()) +
                                         " cells, header has " + std::to_string(header.size()),
                        "line " + std::to_string(line_no));
        }
        std::vector<double> values(cells.size());
        for (size_t j = 0; j < cells.size(); ++j) {
            values[j] = parse_cell(cells[j], line_no, header[j]);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw Error("csv-parse", "no data rows", path);

    const int n = static_cast<int>(rows.size());
    const int p = static_cast<int>(header.size()) - 1;
    Dataset data;
    data.family = family;
    data.x.resize(n, p);
    data.y.resize(n);
    data.column_names.reserve(p);
    for (size_t j = 0; j < header.size(); ++j) {
        if (static_cast<int>(j) != response_col) data.column_names.push_back(header[j]);
    }
    for (int i = 0; i < n; ++i) {
        int col = 0;
        for (size_t j = 0; j < rows[i].size(); ++j) {
            if (static_cast<int>(j) == response_col) {
                data.y[i] = rows[i][j];
            } else {
                data.x(i, col++) = rows[i][j];
            }
        }
        if (family == Family::binomial && data.y[i] != 0.0 && data.y[i] != 1.0) {
            throw Error("non-binary-response", "binomial response must be 0 or 1",
                        "line " + std::to_string(i + 2) + ", column " + response);
        }
    }
    data.validate();
    return data;
}

std::vector<NamedModel> parse_model_list(const std::string& text, int max_index) {
    std::vector<NamedModel> models;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;

        std::string name, index_part;
        size_t colon = t.find(':');
        size_t comma = t.find(',');
        if (colon != std::string::npos && (comma == std::string::npos || colon < comma)) {
            name = trim(t.substr(0, colon));
            index_part = trim(t.substr(colon + 1));
        } else if (comma != std::string::npos) {
            name = trim(t.substr(0, comma));
            index_part = trim(t.substr(comma + 1));
        } else {
            throw Error("model-parse", "expected 'name: i,j,k' or 'name,i,j,k'",
                        "line " + std::to_string(line_no));
        }
        if (name.empty()) {
            throw Error("model-parse", "missing model name", "line " + std::to_string(line_no));
        }
        if (index_part.size() >= 2 && index_part.front() == '"' && index_part.back() == '"') {
            index_part = index_part.substr(1, index_part.size() - 2);
        }

        std::vector<int> indices;
        for (const std::string& tok : split(index_part, ',')) {
            std::string cell = trim(tok);
            if (cell.empty()) continue;
            char* end = nullptr;
            long v = std::strtol(cell.c_str(), &end, 10);
            if (end == cell.c_str() || *end != '\0' || v < 1) {
                throw Error("model-parse", "bad variable index '" + cell + "'", name);
            }
            indices.push_back(static_cast<int>(v));
        }
        std::vector<int> sorted = indices;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw Error("model-duplicate-index", "model lists an index twice", name);
        }
        if (max_index > 0 && !sorted.empty() && sorted.back() > max_index) {
            throw Error("model-index-range",
                        "index " + std::to_string(sorted.back()) + " exceeds p=" +
                            std::to_string(max_index),
                        name);
        }
        models.push_back({name, VariableSet(std::move(indices))});
    }
    return models;
}

std::vector<NamedModel> load_model_list(const std::string& path, int max_index) {
    return parse_model_list(read_file(path), max_index);
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

void write_tsv(const std::string& path, const TextTable& table) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("file-write", "cannot open file for writing", tmp.string());
        for (size_t j = 0; j < table.columns.size(); ++j) {
            if (j > 0) out << '\t';
            out << table.columns[j];
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (size_t j = 0; j < row.size(); ++j) {
                if (j > 0) out << '\t';
                out << row[j];
            }
            out << '\n';
        }
        if (!out) throw Error("file-write", "write failed", tmp.string());
    }
    fs::rename(tmp, target);
}

TextTable read_tsv(const std::string& path) {
    std::istringstream in(read_file(path));
    TextTable table;
    std::string line;
    if (!std::getline(in, line)) throw Error("csv-parse", "empty file", path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.columns = split(line, '\t');
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        table.rows.push_back(split(line, '\t'));
    }
    return table;
}

}  // namespace pavi
