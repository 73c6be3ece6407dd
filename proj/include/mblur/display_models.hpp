#pragma once

#include "mblur/waveform.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace mblur {

// Instantaneous transition, full-frame hold.
struct IdealHold {};

// First-order response toward the driven level, separate rise/fall constants.
struct ExponentialLc {
    double tau_rise_s{};
    double tau_fall_s{};
};

// Per-frame flash: rectangular excitation followed by exponential decay.
struct Impulse {
    double pulse_width_s{1.0e-4};
    double decay_tau_s{1.0e-3};
};

// LC panel multiplied by a square-wave backlight. phase is a fraction of the
// blink period; the backlight is global, so scan delay never shifts it.
struct BacklightBlink {
    ExponentialLc base{};
    double blink_freq_hz{};
    double duty{1.0};
    double phase{0.0};
};

// LC panel driven to level 0 for the trailing black_fraction of each frame.
struct BlackFrameInsertion {
    ExponentialLc base{};
    double black_fraction{};
};

using ModelKind =
    std::variant<IdealHold, ExponentialLc, Impulse, BacklightBlink,
                 BlackFrameInsertion>;

struct DisplayModel {
    double frame_rate_hz{60.0};
    ModelKind kind{IdealHold{}};
    // When set, the pixel at horizontal position x switches (x/screen_width)*T
    // later than the frame boundary.
    bool scan_delay_enabled{false};
};

void validate(const DisplayModel& model);

// Frame-by-frame gray levels (relative drive, each in [0,1]) seen by one pixel.
struct PixelDrive {
    std::vector<double> levels;
    double frame_rate_hz{};
};

void validate(const PixelDrive& drive);

// Luminance trace over the full drive sequence. The pixel starts settled at
// levels[0]; LC state carries across frame boundaries without reset.
// switch_delay_s shifts every frame boundary (raster scan); samples before the
// first shifted boundary show the settled initial level (0 for Impulse).
Waveform pixel_response(const DisplayModel& model, const PixelDrive& drive,
                        double sample_rate_hz, double switch_delay_s = 0.0);

// Same simulation restricted to frames [first_frame, last_frame): state is
// evolved exactly from t = 0, but only the window is sampled.
Waveform pixel_response_window(const DisplayModel& model, const PixelDrive& drive,
                               double sample_rate_hz, std::size_t first_frame,
                               std::size_t last_frame,
                               double switch_delay_s = 0.0);

// Canonical gray-to-gray response curve: settled frames at from_gray, one
// switch, settled frames at to_gray. The returned start_time is negative so
// the switch instant is exactly t = 0.
Waveform lcrc(const DisplayModel& model, double from_gray, double to_gray,
              double sample_rate_hz);

// Content seen by one pixel while a block of pattern_width_px scrolls right at
// velocity_ppf, wrapping around the screen. At frame n the block occupies
// [n*v - W, n*v) modulo the screen width (leading edge at n*v).
PixelDrive scrolling_drive(int pattern_width_px, int screen_width_px,
                           int velocity_ppf, int n_frames, int pixel_x,
                           double frame_rate_hz = 60.0, double from_gray = 0.0,
                           double to_gray = 1.0);

// Frames until a disturbed pixel is indistinguishable from settled;
// used to size warm-up margins.
int settling_frames(const DisplayModel& model);

} // namespace mblur
