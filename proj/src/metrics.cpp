#include "prmrl/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "prmrl/common.hpp"

namespace prmrl {

double percentile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<AggregateRow> aggregate_percentiles(const std::vector<TrialSeries>& trials) {
    // Collect values per checkpoint step across completed trials.
    std::map<long, std::vector<double>> by_step;
    std::size_t completed = 0;
    for (const auto& t : trials) {
        if (t.failed) continue;
        ++completed;
        for (const auto& p : t.points) by_step[p.step].push_back(p.value);
    }
    std::vector<AggregateRow> rows;
    for (auto& [step, values] : by_step) {
        if (values.size() != completed) continue;  // only steps shared by all trials
        AggregateRow row;
        row.step = step;
        row.p25 = percentile_linear(values, 25.0);
        row.median = percentile_linear(values, 50.0);
        row.p75 = percentile_linear(values, 75.0);
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace prmrl
