#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace pavi {

enum class Family { gaussian, binomial };

std::string family_name(Family family);
Family parse_family(const std::string& name);

/// Design matrix plus response. Binomial responses are 0/1.
struct Dataset {
    Eigen::MatrixXd x;  // n x p
    Eigen::VectorXd y;  // n
    Family family = Family::gaussian;
    std::vector<std::string> column_names;  // optional; empty or size p

    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }

    /// Throws Error on non-finite entries, shape mismatch, or a binomial
    /// response outside {0,1}.
    void validate() const;

    /// Rows given by `rows`, same columns and family.
    Dataset subset(const std::vector<int>& rows) const;
};

}  // namespace pavi
