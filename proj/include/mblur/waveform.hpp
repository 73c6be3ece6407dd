#pragma once

#include <cstddef>
#include <vector>

namespace mblur {

// Uniformly sampled relative-luminance trace. Sample i sits at
// start_time + i / sample_rate; the grid has no gaps.
class Waveform {
public:
    Waveform(std::vector<double> samples, double sample_rate_hz,
             double start_time_s = 0.0);

    double sample_rate() const { return sample_rate_; }
    double start_time() const { return start_time_; }
    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }

    double time_at(std::size_t i) const {
        return start_time_ + static_cast<double>(i) / sample_rate_;
    }
    double end_time() const { return time_at(samples_.size() - 1); }
    double duration() const {
        return static_cast<double>(samples_.size() - 1) / sample_rate_;
    }

    // Linear interpolation; clamps outside the time span.
    double value_at(double t) const;

private:
    std::vector<double> samples_;
    double sample_rate_;
    double start_time_;
};

enum class Direction { Rising, Falling };

struct CrossingEvent {
    double time_s;
    Direction direction;
    double level;
};

enum class WidthMode {
    // Time from a crossing of low_level to the next crossing of high_level
    // on a single transition (either polarity).
    Edge,
    // Time from the FIRST rising crossing of low_level to the LAST falling
    // crossing of high_level; tolerant of ripple between them.
    Envelope,
};

// Affine map (y - low_ref) / (high_ref - low_ref). high_ref must exceed low_ref.
Waveform normalize(const Waveform& w, double low_ref, double high_ref);

// Centered box filter. The tap count is window_s * sample_rate rounded to the
// nearest integer (at least 1); output keeps only fully supported samples, so
// it is shorter by taps - 1 and its start_time advances accordingly.
Waveform moving_average_filter(const Waveform& w, double window_s);

// Every crossing of `level`, located by linear interpolation, sorted by time.
// A run of samples exactly equal to `level` counts as one crossing at the
// run midpoint, and only when the neighbors straddle the level.
std::vector<CrossingEvent> threshold_crossings(const Waveform& w, double level);

double width_between(const Waveform& w, double low_level, double high_level,
                     WidthMode mode = WidthMode::Edge);

// Linear interpolation onto a uniform grid at new_rate over the same span.
Waveform resample(const Waveform& w, double new_rate_hz);

} // namespace mblur
