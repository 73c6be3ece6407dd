#pragma once

#include "mblur/display_models.hpp"
#include "mblur/waveform.hpp"

#include <string>
#include <vector>

namespace mblur {

enum class ApertureProfile { Uniform };

enum class BlockPolarity { BrightOnDark, DarkOnBright };

// Virtual measurement setup: a stationary detector with a finite aperture
// centered on the screen watches the block scroll by.
struct RigConfig {
    int screen_width_px{1024};
    double frame_rate_hz{60.0};
    int block_width_px{512};
    int aperture_px{500};
    ApertureProfile aperture_profile{ApertureProfile::Uniform};
    double lmd_sample_rate_hz{20000.0};
    double threshold{0.10};
    BlockPolarity polarity{BlockPolarity::BrightOnDark};
};

void validate(const RigConfig& rig);

// First pixel under the aperture (aperture centered on the screen midpoint).
int aperture_start_px(const RigConfig& rig);

// One velocity point of the moving-block-width measurement.
struct MbwPoint {
    int velocity_ppf{};
    double crossing_time_s{};
    double crossing_time_frames{};
    double mbw_px{};
    double delta_mbw_px{};
    double delta_mbw_debiased_px{};
};

struct MbwSweep {
    RigConfig rig;
    std::string model_id;
    std::vector<MbwPoint> points; // strictly increasing velocity
};

// Detector trace for one block passage: the unweighted mean over the aperture
// pixels, sampled at the LMD rate, long enough to contain exactly one full
// passage plus settling tails.
Waveform simulate_scroll(const RigConfig& rig, const DisplayModel& model,
                         int velocity_ppf);

// Envelope-mode crossing measurement on a detector trace: first rising to
// last falling crossing of threshold * plateau (complemented for a dark
// block), converted through the MBW arithmetic.
MbwPoint measure_mbw(const Waveform& trace, const RigConfig& rig,
                     int velocity_ppf);

MbwSweep sweep(const RigConfig& rig, const DisplayModel& model,
               const std::vector<int>& velocities,
               const std::string& model_id = {});

// The paper's velocity range.
std::vector<int> default_sweep_velocities();

} // namespace mblur
