#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mblur {

struct RegressionFit {
    double intercept_a{};
    double slope_b{};
    double r_squared{};
    int n_points{};
};

// Ordinary least squares of y on x; exact on collinear input. r^2 is defined
// as 1 when the data is constant (SS_tot = SS_res = 0).
RegressionFit linear_fit(const std::vector<std::pair<double, double>>& points);

// Standardization with the population (divide-by-n) standard deviation.
std::vector<double> zscores(const std::vector<double>& values);

enum class Orientation { HigherIsBetter, LowerIsBetter };

struct MethodScores {
    std::string method;
    Orientation orientation{Orientation::HigherIsBetter};
    std::vector<std::pair<std::string, double>> values; // (device, raw value)
};

// Negates lower-is-better values so that higher always means less blur.
MethodScores orient(const MethodScores& scores);

struct MethodColumn {
    std::string method;
    std::vector<double> z;    // aligned with ComparisonTable::devices
    std::vector<int> rank;    // 1 = least blur
    bool has_ties{};
};

struct ComparisonTable {
    std::vector<std::string> devices; // sorted
    std::vector<MethodColumn> methods; // sorted by method name
    // Pairwise Spearman rank correlation between methods.
    std::vector<std::pair<std::pair<std::string, std::string>, double>> spearman;
};

// Orients and standardizes every method over the common device set and ranks
// devices per method; ties broken by device identifier order and flagged.
ComparisonTable compare(const std::vector<MethodScores>& methods);

} // namespace mblur
