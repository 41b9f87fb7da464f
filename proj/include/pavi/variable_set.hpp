#pragma once

#include <compare>
#include <string>
#include <vector>

namespace pavi {

/// A finite set of 1-based predictor indices, kept strictly increasing.
/// The universal currency for selected models, candidate supports and truths.
class VariableSet {
public:
    VariableSet() = default;

    /// Sorts and deduplicates; throws Error("bad-index") on indices < 1.
    explicit VariableSet(std::vector<int> indices);

    /// Parses the text form "1,2,7"; the empty string is the empty set.
    static VariableSet parse(const std::string& text);

    const std::vector<int>& indices() const { return indices_; }
    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }
    bool contains(int index) const;
    int max_index() const { return indices_.empty() ? 0 : indices_.back(); }

    /// Comma-separated text form; empty set renders as "".
    std::string to_string() const;

    bool operator==(const VariableSet&) const = default;
    auto operator<=>(const VariableSet&) const = default;

private:
    std::vector<int> indices_;
};

int intersection_size(const VariableSet& a, const VariableSet& b);
int sym_diff_size(const VariableSet& a, const VariableSet& b);

}  // namespace pavi
