#include "pavi/variable_set.hpp"

#include <algorithm>
#include <cstdlib>

#include "pavi/errors.hpp"

namespace pavi {

VariableSet::VariableSet(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && indices_.front() < 1) {
        throw Error("bad-index", "variable indices are 1-based and must be positive",
                    std::to_string(indices_.front()));
    }
}

VariableSet VariableSet::parse(const std::string& text) {
    std::vector<int> indices;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string token = text.substr(pos, comma - pos);
        // trim surrounding whitespace
        size_t b = token.find_first_not_of(" \t");
        size_t e = token.find_last_not_of(" \t");
        if (b != std::string::npos) {
            token = token.substr(b, e - b + 1);
            char* end = nullptr;
            long v = std::strtol(token.c_str(), &end, 10);
            if (end == token.c_str() || *end != '\0') {
                throw Error("bad-index", "cannot parse variable index", token);
            }
            indices.push_back(static_cast<int>(v));
        }
        pos = comma + 1;
    }
    return VariableSet(std::move(indices));
}

bool VariableSet::contains(int index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

std::string VariableSet::to_string() const {
    std::string out;
    for (size_t i = 0; i < indices_.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(indices_[i]);
    }
    return out;
}

int intersection_size(const VariableSet& a, const VariableSet& b) {
    const auto& x = a.indices();
    const auto& y = b.indices();
    size_t i = 0, j = 0;
    int count = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i] < y[j]) {
            ++i;
        } else if (y[j] < x[i]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

int sym_diff_size(const VariableSet& a, const VariableSet& b) {
    return a.size() + b.size() - 2 * intersection_size(a, b);
}

}  // namespace pavi
