#include "pavi/dataset.hpp"

#include <cmath>

#include "pavi/errors.hpp"

namespace pavi {

std::string family_name(Family family) {
    return family == Family::gaussian ? "gaussian" : "binomial";
}

Family parse_family(const std::string& name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "binomial") return Family::binomial;
    throw Error("bad-family", "unknown family (expected gaussian or binomial)", name);
}

void Dataset::validate() const {
    if (x.rows() != y.size()) {
        throw Error("dimension-mismatch", "design and response lengths differ",
                    std::to_string(x.rows()) + " vs " + std::to_string(y.size()));
    }
    if (!column_names.empty() && static_cast<int>(column_names.size()) != p()) {
        throw Error("dimension-mismatch", "column name count differs from p");
    }
    if (!x.allFinite()) throw Error("non-finite", "design matrix has a non-finite entry");
    for (int i = 0; i < n(); ++i) {
        if (!std::isfinite(y[i])) {
            throw Error("non-finite", "response has a non-finite entry",
                        "row " + std::to_string(i + 1));
        }
        if (family == Family::binomial && y[i] != 0.0 && y[i] != 1.0) {
            throw Error("non-binary-response", "binomial response must be 0 or 1",
                        "row " + std::to_string(i + 1));
        }
    }
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
    Dataset out;
    out.family = family;
    out.column_names = column_names;
    out.x.resize(rows.size(), p());
    out.y.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        out.x.row(i) = x.row(rows[i]);
        out.y[i] = y[rows[i]];
    }
    return out;
}

}  // namespace pavi
