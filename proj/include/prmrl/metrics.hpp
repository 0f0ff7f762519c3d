#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace prmrl {

struct MetricPoint {
    long step = 0;
    double value = 0.0;
};

using MetricSeries = std::vector<MetricPoint>;

struct TrialSeries {
    int trial = 0;
    MetricSeries points;
    double runtime_seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct AggregateRow {
    long step = 0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
};

// Percentile with linear interpolation between order statistics; `values`
// need not be sorted on entry.
double percentile_linear(std::vector<double> values, double p);

// Percentile rows at every step shared by the completed trials.
std::vector<AggregateRow> aggregate_percentiles(const std::vector<TrialSeries>& trials);

// Average reward per step over a sliding window of fixed length.
class RewardWindow {
public:
    explicit RewardWindow(std::size_t capacity) : capacity_(capacity), buffer_(capacity, 0.0) {}

    void push(double reward) {
        sum_ += reward - buffer_[next_];
        buffer_[next_] = reward;
        next_ = (next_ + 1) % capacity_;
        if (filled_ < capacity_) ++filled_;
    }
    double average() const { return filled_ ? sum_ / static_cast<double>(filled_) : 0.0; }

private:
    std::size_t capacity_;
    std::vector<double> buffer_;
    std::size_t next_ = 0;
    std::size_t filled_ = 0;
    double sum_ = 0.0;
};

std::string format_double(double v);

}  // namespace prmrl
