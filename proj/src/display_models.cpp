#include "mblur/display_models.hpp"

#include "mblur/errors.hpp"
#include "response_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace mblur {

using detail::kEmitEps;
using detail::sample_at_or_after;

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok)
        throw UsageError(msg);
}

void validate_lc(const ExponentialLc& p) {
    require(p.tau_rise_s > 0.0 && p.tau_fall_s > 0.0,
            "display model: LC time constants must be positive");
}

} // namespace

void validate(const DisplayModel& model) {
    require(model.frame_rate_hz > 0.0, "display model: frame rate must be positive");
    const double T = 1.0 / model.frame_rate_hz;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ExponentialLc>) {
                validate_lc(k);
            } else if constexpr (std::is_same_v<K, Impulse>) {
                require(k.pulse_width_s > 0.0 && k.pulse_width_s < T,
                        "display model: pulse width must be in (0, frame period)");
                require(k.decay_tau_s > 0.0,
                        "display model: decay tau must be positive");
            } else if constexpr (std::is_same_v<K, BacklightBlink>) {
                validate_lc(k.base);
                require(k.blink_freq_hz > 0.0,
                        "display model: blink frequency must be positive");
                require(k.duty > 0.0 && k.duty <= 1.0,
                        "display model: duty must be in (0, 1]");
                require(std::isfinite(k.phase), "display model: phase must be finite");
            } else if constexpr (std::is_same_v<K, BlackFrameInsertion>) {
                validate_lc(k.base);
                require(k.black_fraction >= 0.0 && k.black_fraction < 1.0,
                        "display model: black_fraction must be in [0, 1)");
            }
        },
        model.kind);
}

void validate(const PixelDrive& drive) {
    require(drive.frame_rate_hz > 0.0, "pixel drive: frame rate must be positive");
    require(!drive.levels.empty(), "pixel drive: needs at least one frame");
    for (double g : drive.levels)
        require(g >= 0.0 && g <= 1.0, "pixel drive: gray level outside [0, 1]");
}

int settling_frames(const DisplayModel& model) {
    const double F = model.frame_rate_hz;
    const double T = 1.0 / F;
    return std::visit(
        [&](const auto& k) -> int {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, IdealHold>) {
                return 0;
            } else if constexpr (std::is_same_v<K, ExponentialLc>) {
                const double tau = std::max(k.tau_rise_s, k.tau_fall_s);
                return static_cast<int>(std::ceil(32.0 * tau / T)) + 1;
            } else if constexpr (std::is_same_v<K, Impulse>) {
                return static_cast<int>(std::ceil(32.0 * k.decay_tau_s / T)) + 1;
            } else if constexpr (std::is_same_v<K, BacklightBlink>) {
                const double tau = std::max(k.base.tau_rise_s, k.base.tau_fall_s);
                return static_cast<int>(std::ceil(32.0 * tau / T)) + 2;
            } else {
                const BlackFrameInsertion& b = k;
                // Per-frame log attenuation of any deviation from the orbit.
                const double decay = (1.0 - b.black_fraction) * T / b.base.tau_rise_s +
                                     b.black_fraction * T / b.base.tau_fall_s;
                const double frames = 34.0 / decay;
                return static_cast<int>(std::ceil(std::min(frames, 1.0e6))) + 1;
            }
        },
        model.kind);
}

namespace {

class WindowEmitter {
public:
    WindowEmitter(std::int64_t i_begin, std::int64_t i_end, double rate,
                  std::vector<double>& out)
        : i_begin_(i_begin), i_end_(i_end), rate_(rate), out_(out) {}

    template <typename F>
    void emit(double t0, double t1, F&& value_at) {
        const std::int64_t a =
            std::max(i_begin_, sample_at_or_after(t0, rate_));
        const std::int64_t b = std::min(i_end_, sample_at_or_after(t1, rate_));
        for (std::int64_t i = a; i < b; ++i) {
            const double t = static_cast<double>(i) / rate_;
            out_[static_cast<std::size_t>(i - i_begin_)] = value_at(t);
        }
    }

    void emit_constant(double t0, double t1, double value) {
        emit(t0, t1, [value](double) { return value; });
    }

private:
    std::int64_t i_begin_;
    std::int64_t i_end_;
    double rate_;
    std::vector<double>& out_;
};

// First-order segment: exact emission until the deviation falls below
// kEmitEps, settled level afterwards. Returns the exact end state.
double emit_lc_segment(WindowEmitter& em, const ExponentialLc& p, double y0,
                       double target, double t0, double t1) {
    if (y0 == target) {
        em.emit_constant(t0, t1, target);
        return y0;
    }
    const double tau = detail::lc_tau(p, y0, target);
    const double delta = y0 - target;
    const double t_conv = t0 + tau * std::log(std::abs(delta) / kEmitEps);
    em.emit(t0, std::min(t_conv, t1), [&](double t) {
        return target + delta * std::exp(-(t - t0) / tau);
    });
    if (t_conv < t1)
        em.emit_constant(t_conv, t1, target);
    return target + delta * std::exp(-(t1 - t0) / tau);
}

} // namespace

Waveform pixel_response_window(const DisplayModel& model, const PixelDrive& drive,
                               double sample_rate_hz, std::size_t first_frame,
                               std::size_t last_frame, double switch_delay_s) {
    validate(model);
    validate(drive);
    const double F = model.frame_rate_hz;
    if (std::abs(drive.frame_rate_hz - F) > 1.0e-9 * F)
        throw UsageError("pixel_response: drive frame rate differs from the model");
    if (sample_rate_hz < 10.0 * F)
        throw UsageError("pixel_response: sample rate below 10x frame rate");
    if (!(switch_delay_s >= 0.0))
        throw UsageError("pixel_response: switch delay must be >= 0");
    const std::size_t frames = drive.levels.size();
    if (first_frame >= last_frame || last_frame > frames)
        throw UsageError("pixel_response: bad frame window");

    const double T = 1.0 / F;
    const double R = sample_rate_hz;
    const double win_begin = static_cast<double>(first_frame) * T;
    const double win_end = static_cast<double>(last_frame) * T;
    const std::int64_t i_begin = sample_at_or_after(win_begin, R);
    const std::int64_t i_end = sample_at_or_after(win_end, R);
    if (i_end - i_begin < 2)
        throw UsageError("pixel_response: window shorter than 2 samples");

    std::vector<double> out(static_cast<std::size_t>(i_end - i_begin), 0.0);
    WindowEmitter em(i_begin, i_end, R, out);
    const double d = switch_delay_s;
    const auto& levels = drive.levels;

    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, IdealHold>) {
                if (d > 0.0)
                    em.emit_constant(0.0, d, levels[0]);
                for (std::size_t n = 0; n < frames; ++n) {
                    const double t0 = static_cast<double>(n) * T + d;
                    if (t0 >= win_end)
                        break;
                    em.emit_constant(t0, static_cast<double>(n + 1) * T + d,
                                     levels[n]);
                }
            } else if constexpr (std::is_same_v<K, ExponentialLc> ||
                                 std::is_same_v<K, BacklightBlink>) {
                const ExponentialLc& base = [&]() -> const ExponentialLc& {
                    if constexpr (std::is_same_v<K, BacklightBlink>)
                        return k.base;
                    else
                        return k;
                }();
                double y = levels[0];
                if (d > 0.0)
                    em.emit_constant(0.0, d, y);
                for (std::size_t n = 0; n < frames; ++n) {
                    const double t0 = static_cast<double>(n) * T + d;
                    if (t0 >= win_end)
                        break;
                    const double t1 = static_cast<double>(n + 1) * T + d;
                    y = emit_lc_segment(em, base, y, levels[n], t0, t1);
                }
            } else if constexpr (std::is_same_v<K, Impulse>) {
                double amp = 0.0;
                double t_ref = 0.0;
                for (std::size_t n = 0; n < frames; ++n) {
                    const double t0 = static_cast<double>(n) * T + d;
                    if (t0 >= win_end)
                        break;
                    const double t1 = static_cast<double>(n + 1) * T + d;
                    const double pulse_end = t0 + k.pulse_width_s;
                    const double level = levels[n];
                    const double amp_in = amp;
                    const double ref_in = t_ref;
                    em.emit(t0, std::min(pulse_end, t1), [&](double t) {
                        const double tail =
                            amp_in <= 0.0
                                ? 0.0
                                : amp_in * std::exp(-(t - ref_in) / k.decay_tau_s);
                        return std::max(level, tail);
                    });
                    const double tail_pe =
                        amp <= 0.0 ? 0.0
                                   : amp * std::exp(-(pulse_end - t_ref) /
                                                    k.decay_tau_s);
                    amp = std::max(level, tail_pe);
                    t_ref = pulse_end;
                    if (amp < kEmitEps)
                        amp = 0.0;
                    const double amp_out = amp;
                    em.emit(pulse_end, t1, [&](double t) {
                        return amp_out <= 0.0
                                   ? 0.0
                                   : amp_out * std::exp(-(t - t_ref) / k.decay_tau_s);
                    });
                }
            } else {
                const BlackFrameInsertion& b = k;
                const double bright_len = (1.0 - b.black_fraction) * T;
                double y = levels[0];
                if (d > 0.0)
                    em.emit_constant(0.0, d, y);
                for (std::size_t n = 0; n < frames; ++n) {
                    const double t0 = static_cast<double>(n) * T + d;
                    if (t0 >= win_end)
                        break;
                    const double t1 = static_cast<double>(n + 1) * T + d;
                    if (b.black_fraction == 0.0) {
                        y = emit_lc_segment(em, b.base, y, levels[n], t0, t1);
                    } else {
                        const double tb = t0 + bright_len;
                        y = emit_lc_segment(em, b.base, y, levels[n], t0, tb);
                        y = emit_lc_segment(em, b.base, y, 0.0, tb, t1);
                    }
                }
            }
        },
        model.kind);

    if (const auto* blink = std::get_if<BacklightBlink>(&model.kind)) {
        if (blink->duty < 1.0) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                const double t =
                    static_cast<double>(i_begin + static_cast<std::int64_t>(j)) / R;
                if (!detail::blink_on(*blink, t))
                    out[j] = 0.0;
            }
        }
    }

    return Waveform(std::move(out), R, static_cast<double>(i_begin) / R);
}

Waveform pixel_response(const DisplayModel& model, const PixelDrive& drive,
                        double sample_rate_hz, double switch_delay_s) {
    return pixel_response_window(model, drive, sample_rate_hz, 0,
                                 drive.levels.size(), switch_delay_s);
}

Waveform lcrc(const DisplayModel& model, double from_gray, double to_gray,
              double sample_rate_hz) {
    validate(model);
    if (from_gray < 0.0 || from_gray > 1.0 || to_gray < 0.0 || to_gray > 1.0)
        throw UsageError("lcrc: gray levels must be in [0, 1]");
    const int settle = settling_frames(model);
    const int pre = std::max(4, settle + 3);
    const int post = std::max(4, settle + 3);
    PixelDrive drive;
    drive.frame_rate_hz = model.frame_rate_hz;
    drive.levels.assign(static_cast<std::size_t>(pre), from_gray);
    drive.levels.insert(drive.levels.end(), static_cast<std::size_t>(post),
                        to_gray);
    Waveform w = pixel_response(model, drive, sample_rate_hz);
    // Shift the time axis so the switch instant is t = 0.
    return Waveform(std::vector<double>(w.samples()), w.sample_rate(),
                    -static_cast<double>(pre) / model.frame_rate_hz);
}

PixelDrive scrolling_drive(int pattern_width_px, int screen_width_px,
                           int velocity_ppf, int n_frames, int pixel_x,
                           double frame_rate_hz, double from_gray,
                           double to_gray) {
    if (screen_width_px < 1)
        throw UsageError("scrolling_drive: screen width must be >= 1");
    if (pattern_width_px < 1 || pattern_width_px > screen_width_px)
        throw UsageError("scrolling_drive: pattern width must be in [1, screen width]");
    if (pixel_x < 0 || pixel_x >= screen_width_px)
        throw UsageError("scrolling_drive: pixel " + std::to_string(pixel_x) +
                         " outside screen [0, " + std::to_string(screen_width_px) +
                         ")");
    if (velocity_ppf < 1)
        throw UsageError("scrolling_drive: velocity must be a positive integer");
    if (n_frames < 1)
        throw UsageError("scrolling_drive: needs at least one frame");

    if (!(frame_rate_hz > 0.0))
        throw UsageError("scrolling_drive: frame rate must be positive");

    PixelDrive drive;
    drive.frame_rate_hz = frame_rate_hz;
    drive.levels.resize(static_cast<std::size_t>(n_frames));
    const std::int64_t S = screen_width_px;
    const std::int64_t W = pattern_width_px;
    for (int n = 0; n < n_frames; ++n) {
        std::int64_t m = (static_cast<std::int64_t>(pixel_x) -
                          static_cast<std::int64_t>(n) * velocity_ppf) %
                         S;
        if (m < 0)
            m += S;
        drive.levels[static_cast<std::size_t>(n)] =
            (m >= S - W) ? to_gray : from_gray;
    }
    return drive;
}

} // namespace mblur
