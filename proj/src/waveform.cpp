#include "mblur/waveform.hpp"

#include "mblur/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mblur {

Waveform::Waveform(std::vector<double> samples, double sample_rate_hz,
                   double start_time_s)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate_hz),
      start_time_(start_time_s) {
    if (!(sample_rate_ > 0.0))
        throw UsageError("waveform: sample rate must be positive");
    if (samples_.size() < 2)
        throw UsageError("waveform: needs at least 2 samples");
    for (double y : samples_) {
        if (!std::isfinite(y))
            throw DataError("waveform: non-finite sample value");
    }
    if (!std::isfinite(start_time_))
        throw DataError("waveform: non-finite start time");
}

double Waveform::value_at(double t) const {
    const double pos = (t - start_time_) * sample_rate_;
    if (pos <= 0.0)
        return samples_.front();
    const double last = static_cast<double>(samples_.size() - 1);
    if (pos >= last)
        return samples_.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
}

Waveform normalize(const Waveform& w, double low_ref, double high_ref) {
    if (!(high_ref > low_ref))
        throw NumericError("normalize: invalid reference levels (high_ref <= low_ref)");
    const double inv = 1.0 / (high_ref - low_ref);
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = (w[i] - low_ref) * inv;
    return Waveform(std::move(out), w.sample_rate(), w.start_time());
}

Waveform moving_average_filter(const Waveform& w, double window_s) {
    if (!(window_s > 0.0))
        throw UsageError("moving_average_filter: window must be positive");
    long taps = std::lround(window_s * w.sample_rate());
    if (taps < 1)
        taps = 1;
    if (static_cast<std::size_t>(taps) + 1 > w.size())
        throw DataError("moving_average_filter: window longer than the trace (" +
                        std::to_string(taps) + " taps, " +
                        std::to_string(w.size()) + " samples)");
    const std::size_t k = static_cast<std::size_t>(taps);
    const std::size_t n_out = w.size() - k + 1;
    const auto& x = w.samples();
    std::vector<double> out(n_out);
    // Sum deviations from a pivot instead of raw samples, so a constant
    // trace stays bit-exact under the rolling update (DC gain 1).
    const double pivot = x[0];
    const double inv_k = 1.0 / static_cast<double>(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        acc += x[i] - pivot;
    out[0] = pivot + acc * inv_k;
    for (std::size_t i = 1; i < n_out; ++i) {
        acc += (x[i + k - 1] - pivot) - (x[i - 1] - pivot);
        out[i] = pivot + acc * inv_k;
    }
    const double start =
        w.start_time() + 0.5 * static_cast<double>(k - 1) / w.sample_rate();
    return Waveform(std::move(out), w.sample_rate(), start);
}

std::vector<CrossingEvent> threshold_crossings(const Waveform& w, double level) {
    std::vector<CrossingEvent> events;
    const auto& y = w.samples();
    const std::size_t n = y.size();
    std::size_t i = 0;
    while (i + 1 < n) {
        const double a = y[i];
        const double b = y[i + 1];
        if (a == level) {
            // Locate the run of samples equal to the level.
            std::size_t j = i;
            while (j + 1 < n && y[j + 1] == level)
                ++j;
            if (i > 0 && j + 1 < n) {
                const double before = y[i - 1];
                const double after = y[j + 1];
                if ((before < level && after > level) ||
                    (before > level && after < level)) {
                    const double t = 0.5 * (w.time_at(i) + w.time_at(j));
                    events.push_back({t,
                                      after > level ? Direction::Rising
                                                    : Direction::Falling,
                                      level});
                }
            }
            i = j + 1;
            continue;
        }
        if ((a < level && b > level) || (a > level && b < level)) {
            const double frac = (level - a) / (b - a);
            const double t = w.time_at(i) + frac / w.sample_rate();
            events.push_back(
                {t, b > a ? Direction::Rising : Direction::Falling, level});
        }
        ++i;
    }
    return events;
}

namespace {

std::string level_str(double level) {
    return std::to_string(level);
}

} // namespace

double width_between(const Waveform& w, double low_level, double high_level,
                     WidthMode mode) {
    if (mode == WidthMode::Edge) {
        const auto lows = threshold_crossings(w, low_level);
        const auto highs = threshold_crossings(w, high_level);
        if (lows.empty())
            throw NumericError("width_between: level " + level_str(low_level) +
                               " never crossed");
        if (highs.empty())
            throw NumericError("width_between: level " + level_str(high_level) +
                               " never crossed");
        // First crossing of either level starts the edge; the next crossing
        // of the other level ends it.
        const CrossingEvent* first = &lows.front();
        bool first_is_low = true;
        if (highs.front().time_s < first->time_s) {
            first = &highs.front();
            first_is_low = false;
        }
        const auto& other = first_is_low ? highs : lows;
        for (const auto& e : other) {
            if (e.time_s >= first->time_s)
                return e.time_s - first->time_s;
        }
        throw NumericError("width_between: no crossing of level " +
                           level_str(first_is_low ? high_level : low_level) +
                           " after the first edge point");
    }

    // Envelope: first rising crossing of low_level, last falling crossing of
    // high_level.
    const auto lows = threshold_crossings(w, low_level);
    const CrossingEvent* first_rise = nullptr;
    for (const auto& e : lows) {
        if (e.direction == Direction::Rising) {
            first_rise = &e;
            break;
        }
    }
    if (first_rise == nullptr)
        throw NumericError("width_between: level " + level_str(low_level) +
                           " never crossed rising");
    const auto highs = threshold_crossings(w, high_level);
    const CrossingEvent* last_fall = nullptr;
    for (const auto& e : highs) {
        if (e.direction == Direction::Falling && e.time_s >= first_rise->time_s)
            last_fall = &e;
    }
    if (last_fall == nullptr)
        throw NumericError("width_between: level " + level_str(high_level) +
                           " never crossed falling after the first rise");
    return last_fall->time_s - first_rise->time_s;
}

Waveform resample(const Waveform& w, double new_rate_hz) {
    if (!(new_rate_hz > 0.0))
        throw UsageError("resample: rate must be positive");
    // Grid spans the same interval; a tiny epsilon keeps an exact-multiple
    // endpoint from being dropped to float noise.
    const double span = w.duration();
    const auto n_intervals =
        static_cast<std::size_t>(std::floor(span * new_rate_hz * (1.0 + 1e-12) + 1e-12));
    const std::size_t n = n_intervals + 1;
    std::vector<double> out(std::max<std::size_t>(n, 2));
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = w.value_at(w.start_time() + static_cast<double>(k) / new_rate_hz);
    return Waveform(std::move(out), new_rate_hz, w.start_time());
}

} // namespace mblur
