#pragma once

#include "mblur/display_models.hpp"
#include "mblur/waveform.hpp"

#include <utility>
#include <vector>

namespace mblur {

// Perceived relative luminance per retinal position (pattern-fixed pixel
// coordinates; the block interior spans [0, block_width)).
struct RetinalProfile {
    std::vector<int> positions;
    std::vector<double> values;
};

// Blurred-edge metric chain for one gray transition at one velocity:
// BEW in pixels, N-BEW = BEW / v in frames, N-BET = N-BEW * T in seconds.
struct MotionMetrics {
    double bew_px{};
    double n_bew_frames{};
    double n_bet_s{};
    int velocity_ppf{};
};

struct MprtResult {
    double mprt_s{};
    // Per (from_gray, to_gray) pair, sorted.
    std::vector<std::pair<std::pair<double, double>, MotionMetrics>>
        per_transition;
};

// Moving picture response curve: forward one-frame moving-window mean of the
// LCRC. Output sample k is the mean of input samples k..k+N with
// N = round(sample_rate * frame_period); the output is shorter by N samples.
Waveform mprc(const Waveform& lcrc_trace, double frame_period_s);

// 10-90% temporal edge width of the MPRC (normalized internally to its
// settled endpoint levels) converted into the Eq.-style metric chain.
MotionMetrics metrics_from_mprc(const Waveform& mprc_trace, int velocity_ppf,
                                double frame_period_s);

// Perceived profile of a scrolling block by per-pixel retinal integration:
// retinal position x sums the per-pixel sub-interval means over the eye
// trajectory within one steady-state frame. Pixels are simulated
// individually, so non-identical pixels (scan delay) are handled.
RetinalProfile retinal_profile(const DisplayModel& model, int block_width_px,
                               int velocity_ppf, double sample_rate_hz);

// LCRC -> MPRC -> metrics for every transition; MPRT is the mean N-BET.
MprtResult mprt(const DisplayModel& model,
                const std::vector<std::pair<double, double>>& transitions,
                int velocity_ppf, double sample_rate_hz);

} // namespace mblur
