#include "mblur/analysis.hpp"

#include "mblur/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace mblur {

RegressionFit linear_fit(const std::vector<std::pair<double, double>>& points) {
    const std::size_t n = points.size();
    if (n < 2)
        throw UsageError("linear_fit: needs at least 2 points");
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if (sxx == 0.0)
        throw NumericError("linear_fit: degenerate regression (all x identical)");

    RegressionFit fit;
    fit.n_points = static_cast<int>(n);
    fit.slope_b = sxy / sxx;
    fit.intercept_a = mean_y - fit.slope_b * mean_x;

    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - (fit.intercept_a + fit.slope_b * x);
        ss_res += r * r;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
    return fit;
}

std::vector<double> zscores(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2)
        throw UsageError("zscores: needs at least 2 values");
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) /
        static_cast<double>(n);
    double var = 0.0;
    for (double x : values)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    if (var == 0.0)
        throw NumericError("zscores: zero variance");
    const double inv_sd = 1.0 / std::sqrt(var);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (values[i] - mean) * inv_sd;
    return out;
}

MethodScores orient(const MethodScores& scores) {
    MethodScores out = scores;
    if (scores.orientation == Orientation::LowerIsBetter) {
        for (auto& [device, value] : out.values)
            value = -value;
        out.orientation = Orientation::HigherIsBetter;
    }
    return out;
}

namespace {

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty())
            out += ",";
        out += s;
    }
    return out;
}

} // namespace

ComparisonTable compare(const std::vector<MethodScores>& methods) {
    if (methods.empty())
        throw UsageError("compare: needs at least one method");
    for (const auto& m : methods) {
        if (m.values.size() < 2)
            throw UsageError("compare: method " + m.method +
                             " has fewer than 2 devices");
        std::set<std::string> seen;
        for (const auto& [device, value] : m.values) {
            if (!seen.insert(device).second)
                throw DataError("compare: method " + m.method +
                                " lists device " + device + " twice");
        }
    }

    std::set<std::string> reference;
    for (const auto& [device, value] : methods.front().values)
        reference.insert(device);
    for (const auto& m : methods) {
        std::set<std::string> own;
        for (const auto& [device, value] : m.values)
            own.insert(device);
        if (own != reference) {
            std::set<std::string> only_ref;
            std::set<std::string> only_own;
            std::set_difference(reference.begin(), reference.end(), own.begin(),
                                own.end(),
                                std::inserter(only_ref, only_ref.end()));
            std::set_difference(own.begin(), own.end(), reference.begin(),
                                reference.end(),
                                std::inserter(only_own, only_own.end()));
            throw DataError("compare: device sets differ between " +
                            methods.front().method + " and " + m.method +
                            " (missing: " + join(only_ref) +
                            "; extra: " + join(only_own) + ")");
        }
    }

    ComparisonTable table;
    table.devices.assign(reference.begin(), reference.end());

    std::vector<MethodScores> sorted = methods;
    std::sort(sorted.begin(), sorted.end(),
              [](const MethodScores& a, const MethodScores& b) {
                  return a.method < b.method;
              });

    for (const auto& m : sorted) {
        const MethodScores oriented = orient(m);
        std::map<std::string, double> by_device(oriented.values.begin(),
                                                oriented.values.end());
        std::vector<double> raw(table.devices.size());
        for (std::size_t i = 0; i < table.devices.size(); ++i)
            raw[i] = by_device.at(table.devices[i]);

        MethodColumn col;
        col.method = m.method;
        try {
            col.z = zscores(raw);
        } catch (const NumericError& e) {
            throw NumericError("compare: method " + m.method + ": " + e.what());
        }

        // Rank 1 = highest z; ties broken by device identifier order.
        std::vector<std::size_t> order(table.devices.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return col.z[a] > col.z[b];
                         });
        col.rank.assign(table.devices.size(), 0);
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            col.rank[order[pos]] = static_cast<int>(pos) + 1;
        for (std::size_t pos = 1; pos < order.size(); ++pos) {
            if (col.z[order[pos]] == col.z[order[pos - 1]])
                col.has_ties = true;
        }
        table.methods.push_back(std::move(col));
    }

    const std::size_t n = table.devices.size();
    const double denom = static_cast<double>(n) *
                         (static_cast<double>(n) * static_cast<double>(n) - 1.0);
    for (std::size_t i = 0; i < table.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < table.methods.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = table.methods[i].rank[k] - table.methods[j].rank[k];
                d2 += d * d;
            }
            const double rho = 1.0 - 6.0 * d2 / denom;
            table.spearman.push_back(
                {{table.methods[i].method, table.methods[j].method}, rho});
        }
    }
    return table;
}

} // namespace mblur
