#pragma once

// Shared evaluation kernels for the display response engine. Both the
// per-pixel sampler (pixel_response_window) and the aperture aggregator in the
// virtual rig must agree bit-for-bit, so every time-to-index rule and
// closed-form update lives here.

#include "mblur/display_models.hpp"

#include <cmath>
#include <cstdint>

namespace mblur::detail {

// Residual emission below this is folded into the settled level.
inline constexpr double kEmitEps = 1.0e-14;

// First sample index at or after time t. The epsilon keeps exact boundary
// hits (t * rate integral) from drifting up due to float noise; samples on a
// boundary belong to the new frame.
inline std::int64_t sample_at_or_after(double t, double rate) {
    return static_cast<std::int64_t>(std::ceil(t * rate - 1.0e-9));
}

inline double lc_tau(const ExponentialLc& p, double y0, double target) {
    return target > y0 ? p.tau_rise_s : p.tau_fall_s;
}

// y(t0 + dt) for first-order approach from y0 toward target.
inline double lc_step(const ExponentialLc& p, double y0, double target,
                      double dt) {
    if (y0 == target)
        return y0;
    return target + (y0 - target) * std::exp(-dt / lc_tau(p, y0, target));
}

// Unit pulse shape at offset s >= 0 from the pulse start.
inline double impulse_pulse(const Impulse& p, double s) {
    if (s < p.pulse_width_s)
        return 1.0;
    return std::exp(-(s - p.pulse_width_s) / p.decay_tau_s);
}

inline bool blink_on(const BacklightBlink& p, double t) {
    const double cycles = t * p.blink_freq_hz - p.phase;
    const double frac = cycles - std::floor(cycles);
    return frac < p.duty;
}

// Periodic steady state of a black-frame-insertion pixel held at `level`:
// y_bright_start at the start of the bright segment, y_black_start at the
// start of the black segment.
struct BfiOrbit {
    double y_bright_start{};
    double y_black_start{};
};

inline BfiOrbit bfi_orbit(const BlackFrameInsertion& p, double level,
                          double frame_period_s) {
    const double bright_len = (1.0 - p.black_fraction) * frame_period_s;
    const double black_len = p.black_fraction * frame_period_s;
    if (level <= 0.0)
        return {0.0, 0.0};
    // Rising during bright (orbit sits below the driven level), falling to 0
    // during black.
    const double a = std::exp(-bright_len / p.base.tau_rise_s);
    const double b = std::exp(-black_len / p.base.tau_fall_s);
    const double y0 = level * (1.0 - a) * b / (1.0 - a * b);
    const double y1 = level + (y0 - level) * a;
    return {y0, y1};
}

// Value s seconds into a BFI frame driven at `level`, starting from y_start.
// Also used to advance the exact state via s = frame_period.
inline double bfi_frame_value(const BlackFrameInsertion& p, double level,
                              double y_start, double s, double frame_period_s) {
    const double bright_len = (1.0 - p.black_fraction) * frame_period_s;
    if (s < bright_len || p.black_fraction == 0.0)
        return lc_step(p.base, y_start, level, s);
    const double y_black = lc_step(p.base, y_start, level, bright_len);
    return lc_step(p.base, y_black, 0.0, s - bright_len);
}

} // namespace mblur::detail
