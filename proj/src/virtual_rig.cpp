#include "mblur/virtual_rig.hpp"

#include "mblur/errors.hpp"
#include "response_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

namespace mblur {

using detail::kEmitEps;
using detail::sample_at_or_after;

void validate(const RigConfig& rig) {
    if (rig.screen_width_px < 2)
        throw UsageError("rig: screen width must be >= 2");
    if (rig.block_width_px < 1 || rig.block_width_px >= rig.screen_width_px)
        throw UsageError("rig: block width must be in [1, screen width)");
    if (rig.aperture_px < 1 || rig.aperture_px > rig.screen_width_px)
        throw UsageError("rig: aperture must be in [1, screen width]");
    if (!(rig.frame_rate_hz > 0.0))
        throw UsageError("rig: frame rate must be positive");
    if (rig.lmd_sample_rate_hz < 10.0 * rig.frame_rate_hz)
        throw UsageError("rig: LMD sample rate below 10x frame rate");
    if (!(rig.threshold > 0.0 && rig.threshold < 0.5))
        throw UsageError("rig: threshold must be in (0, 0.5)");
}

int aperture_start_px(const RigConfig& rig) {
    return (rig.screen_width_px - rig.aperture_px) / 2;
}

std::vector<int> default_sweep_velocities() {
    std::vector<int> v;
    for (int i = 5; i <= 20; ++i)
        v.push_back(i);
    return v;
}

namespace {

// Per-sample accumulator with a difference array for constant spans.
class Accumulator {
public:
    Accumulator(std::int64_t n_samples, double rate)
        : acc_(static_cast<std::size_t>(n_samples), 0.0),
          diff_(static_cast<std::size_t>(n_samples) + 1, 0.0),
          n_(n_samples),
          rate_(rate) {}

    std::int64_t size() const { return n_; }
    double rate() const { return rate_; }
    double span_end_time() const { return static_cast<double>(n_) / rate_; }

    void add_constant(std::int64_t a, std::int64_t b, double value) {
        a = std::max<std::int64_t>(a, 0);
        b = std::min(b, n_);
        if (b <= a || value == 0.0)
            return;
        diff_[static_cast<std::size_t>(a)] += value;
        diff_[static_cast<std::size_t>(b)] -= value;
    }

    template <typename F>
    void add_samples(std::int64_t a, std::int64_t b, F&& value_at) {
        a = std::max<std::int64_t>(a, 0);
        b = std::min(b, n_);
        for (std::int64_t i = a; i < b; ++i)
            acc_[static_cast<std::size_t>(i)] +=
                value_at(static_cast<double>(i) / rate_);
    }

    void add_array(const std::vector<double>& values) {
        const std::size_t n =
            std::min(values.size(), static_cast<std::size_t>(n_));
        for (std::size_t i = 0; i < n; ++i)
            acc_[i] += values[i];
    }

    std::vector<double> merge() {
        double run = 0.0;
        for (std::int64_t i = 0; i < n_; ++i) {
            run += diff_[static_cast<std::size_t>(i)];
            acc_[static_cast<std::size_t>(i)] += run;
        }
        return std::move(acc_);
    }

private:
    std::vector<double> acc_;
    std::vector<double> diff_;
    std::int64_t n_;
    double rate_;
};

void aggregate_hold(Accumulator& acc, const std::vector<PixelDrive>& drives,
                    const std::vector<double>& delays, double frame_period) {
    const double rate = acc.rate();
    const double span = acc.span_end_time();
    for (std::size_t p = 0; p < drives.size(); ++p) {
        const auto& levels = drives[p].levels;
        const double d = delays[p];
        if (d > 0.0)
            acc.add_constant(0, sample_at_or_after(d, rate), levels[0]);
        for (std::size_t n = 0; n < levels.size(); ++n) {
            const double t0 = static_cast<double>(n) * frame_period + d;
            if (t0 >= span)
                break;
            const double t1 = static_cast<double>(n + 1) * frame_period + d;
            acc.add_constant(sample_at_or_after(t0, rate),
                             sample_at_or_after(t1, rate), levels[n]);
        }
    }
}

// Mirrors emit_lc_segment in the per-pixel sampler: exact emission until the
// deviation falls below kEmitEps, settled constant afterwards.
void lc_segment(Accumulator& acc, const ExponentialLc& base, double& y,
                double target, double t0, double t1) {
    const double rate = acc.rate();
    if (y == target) {
        acc.add_constant(sample_at_or_after(t0, rate),
                         sample_at_or_after(t1, rate), target);
        return;
    }
    const double tau = detail::lc_tau(base, y, target);
    const double delta = y - target;
    const double t_conv = t0 + tau * std::log(std::abs(delta) / kEmitEps);
    acc.add_samples(sample_at_or_after(t0, rate),
                    sample_at_or_after(std::min(t_conv, t1), rate),
                    [&](double t) {
                        return target + delta * std::exp(-(t - t0) / tau);
                    });
    if (t_conv < t1)
        acc.add_constant(sample_at_or_after(t_conv, rate),
                         sample_at_or_after(t1, rate), target);
    y = target + delta * std::exp(-(t1 - t0) / tau);
}

void aggregate_lc(Accumulator& acc, const ExponentialLc& base,
                  const std::vector<PixelDrive>& drives,
                  const std::vector<double>& delays, double frame_period) {
    const double span = acc.span_end_time();
    for (std::size_t p = 0; p < drives.size(); ++p) {
        const auto& levels = drives[p].levels;
        const double d = delays[p];
        double y = levels[0];
        if (d > 0.0)
            acc.add_constant(0, sample_at_or_after(d, acc.rate()), y);
        for (std::size_t n = 0; n < levels.size(); ++n) {
            const double t0 = static_cast<double>(n) * frame_period + d;
            if (t0 >= span)
                break;
            const double t1 = static_cast<double>(n + 1) * frame_period + d;
            lc_segment(acc, base, y, levels[n], t0, t1);
        }
    }
}

void aggregate_impulse(Accumulator& acc, const Impulse& imp,
                       const std::vector<PixelDrive>& drives,
                       double frame_period) {
    const double rate = acc.rate();
    const double span = acc.span_end_time();
    const std::size_t frames = drives.front().levels.size();

    // All pixels share the per-frame pulse shape; sum the drive levels once.
    std::vector<double> coeff(frames, 0.0);
    for (const auto& drive : drives)
        for (std::size_t n = 0; n < frames; ++n)
            coeff[n] += drive.levels[n];

    for (std::size_t n = 0; n < frames; ++n) {
        const double t0 = static_cast<double>(n) * frame_period;
        if (t0 >= span)
            break;
        const double pe = t0 + imp.pulse_width_s;
        const double t1 = static_cast<double>(n + 1) * frame_period;
        acc.add_constant(sample_at_or_after(t0, rate),
                         sample_at_or_after(std::min(pe, t1), rate), coeff[n]);
        const double c = coeff[n];
        if (c != 0.0) {
            acc.add_samples(sample_at_or_after(pe, rate),
                            sample_at_or_after(t1, rate), [&](double t) {
                                return c * std::exp(-(t - pe) / imp.decay_tau_s);
                            });
        }
    }

    // Per-pixel corrections where a decaying tail outlives a drop in drive.
    for (const auto& drive : drives) {
        double amp = 0.0;
        double t_ref = 0.0;
        for (std::size_t n = 0; n < frames; ++n) {
            const double t0 = static_cast<double>(n) * frame_period;
            if (t0 >= span)
                break;
            const double pe = t0 + imp.pulse_width_s;
            const double t1 = static_cast<double>(n + 1) * frame_period;
            const double level = drive.levels[n];
            const double tail_t0 =
                amp <= 0.0 ? 0.0
                           : amp * std::exp(-(t0 - t_ref) / imp.decay_tau_s);
            if (tail_t0 > level + kEmitEps) {
                const double amp_in = amp;
                const double ref_in = t_ref;
                acc.add_samples(sample_at_or_after(t0, rate),
                                sample_at_or_after(std::min(pe, t1), rate),
                                [&](double t) {
                                    const double tail =
                                        amp_in *
                                        std::exp(-(t - ref_in) / imp.decay_tau_s);
                                    return std::max(0.0, tail - level);
                                });
            }
            const double tail_pe =
                amp <= 0.0 ? 0.0
                           : amp * std::exp(-(pe - t_ref) / imp.decay_tau_s);
            amp = std::max(level, tail_pe);
            t_ref = pe;
            if (amp < kEmitEps)
                amp = 0.0;
            if (amp - level > kEmitEps) {
                const double extra = amp - level;
                acc.add_samples(sample_at_or_after(pe, rate),
                                sample_at_or_after(t1, rate), [&](double t) {
                                    return extra *
                                           std::exp(-(t - pe) / imp.decay_tau_s);
                                });
            }
        }
    }
}

void aggregate_bfi(Accumulator& acc, const BlackFrameInsertion& bfi,
                   const std::vector<PixelDrive>& drives, double frame_period) {
    const double rate = acc.rate();
    const double span = acc.span_end_time();
    const std::size_t frames = drives.front().levels.size();

    std::map<double, detail::BfiOrbit> orbits;
    auto orbit_of = [&](double level) -> const detail::BfiOrbit& {
        auto it = orbits.find(level);
        if (it == orbits.end())
            it = orbits.emplace(level, detail::bfi_orbit(bfi, level, frame_period))
                     .first;
        return it->second;
    };

    // counts[level][frame] = settled pixels showing that level.
    std::map<double, std::vector<std::int64_t>> counts;
    for (const auto& drive : drives) {
        double y = drive.levels[0];
        for (std::size_t n = 0; n < frames; ++n) {
            const double t0 = static_cast<double>(n) * frame_period;
            if (t0 >= span)
                break;
            const double level = drive.levels[n];
            const detail::BfiOrbit& orbit = orbit_of(level);
            if (std::abs(y - orbit.y_bright_start) <= 1.0e-12) {
                auto& per_frame = counts[level];
                if (per_frame.empty())
                    per_frame.assign(frames, 0);
                ++per_frame[n];
            } else {
                const double y_in = y;
                acc.add_samples(
                    sample_at_or_after(t0, rate),
                    sample_at_or_after(
                        std::min(static_cast<double>(n + 1) * frame_period, span),
                        rate),
                    [&](double t) {
                        return detail::bfi_frame_value(bfi, level, y_in, t - t0,
                                                       frame_period);
                    });
            }
            y = detail::bfi_frame_value(bfi, level, y, frame_period,
                                        frame_period);
        }
    }

    for (const auto& [level, per_frame] : counts) {
        const detail::BfiOrbit& orbit = orbit_of(level);
        if (level == 0.0 && orbit.y_bright_start == 0.0)
            continue; // settled dark pixels emit nothing
        for (std::size_t n = 0; n < frames; ++n) {
            if (per_frame[n] == 0)
                continue;
            const double t0 = static_cast<double>(n) * frame_period;
            if (t0 >= span)
                break;
            const double c = static_cast<double>(per_frame[n]);
            acc.add_samples(
                sample_at_or_after(t0, rate),
                sample_at_or_after(static_cast<double>(n + 1) * frame_period,
                                   rate),
                [&](double t) {
                    return c * detail::bfi_frame_value(bfi, level,
                                                       orbit.y_bright_start,
                                                       t - t0, frame_period);
                });
        }
    }
}

void aggregate_reference(Accumulator& acc, const DisplayModel& model,
                         const std::vector<PixelDrive>& drives,
                         const std::vector<double>& delays,
                         std::size_t n_frames) {
    // Fallback: exact per-pixel sampling. Used where no aggregate shortcut
    // applies (scan delay on pulse-shaped kinds).
    for (std::size_t p = 0; p < drives.size(); ++p) {
        const Waveform w = pixel_response_window(model, drives[p], acc.rate(), 0,
                                                 n_frames, delays[p]);
        acc.add_array(w.samples());
    }
}

} // namespace

Waveform simulate_scroll(const RigConfig& rig, const DisplayModel& model,
                         int velocity_ppf) {
    validate(rig);
    validate(model);
    if (velocity_ppf < 1 || velocity_ppf >= rig.block_width_px)
        throw UsageError("simulate_scroll: velocity " +
                         std::to_string(velocity_ppf) +
                         " outside [1, block width)");
    if (std::abs(model.frame_rate_hz - rig.frame_rate_hz) >
        1.0e-9 * rig.frame_rate_hz)
        throw UsageError("simulate_scroll: model frame rate differs from the rig");

    const int S = rig.screen_width_px;
    const int W = rig.block_width_px;
    const int A = rig.aperture_px;
    const int v = velocity_ppf;
    const double F = rig.frame_rate_hz;
    const double T = 1.0 / F;
    const double R = rig.lmd_sample_rate_hz;
    const int ap0 = aperture_start_px(rig);

    const bool dark = rig.polarity == BlockPolarity::DarkOnBright;
    const double from = dark ? 1.0 : 0.0;
    const double to = dark ? 0.0 : 1.0;

    // Covers the single full passage over the aperture, with tail margin,
    // while stopping short of the next passage's falling edge.
    const int n_frames = (S + W + A + v - 1) / v + 2;

    std::vector<PixelDrive> drives;
    drives.reserve(static_cast<std::size_t>(A));
    std::vector<double> delays(static_cast<std::size_t>(A), 0.0);
    for (int i = 0; i < A; ++i) {
        const int x = ap0 + i;
        drives.push_back(scrolling_drive(W, S, v, n_frames, x, F, from, to));
        if (model.scan_delay_enabled)
            delays[static_cast<std::size_t>(i)] =
                T * static_cast<double>(x) / static_cast<double>(S);
    }

    const std::int64_t n_samples =
        sample_at_or_after(static_cast<double>(n_frames) * T, R);
    Accumulator acc(n_samples, R);

    const BacklightBlink* blink = nullptr;
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, IdealHold>) {
                aggregate_hold(acc, drives, delays, T);
            } else if constexpr (std::is_same_v<K, ExponentialLc>) {
                aggregate_lc(acc, k, drives, delays, T);
            } else if constexpr (std::is_same_v<K, BacklightBlink>) {
                aggregate_lc(acc, k.base, drives, delays, T);
                blink = &k;
            } else if constexpr (std::is_same_v<K, Impulse>) {
                if (model.scan_delay_enabled)
                    aggregate_reference(acc, model, drives, delays,
                                        static_cast<std::size_t>(n_frames));
                else
                    aggregate_impulse(acc, k, drives, T);
            } else {
                if (k.black_fraction == 0.0)
                    aggregate_lc(acc, k.base, drives, delays, T);
                else if (model.scan_delay_enabled)
                    aggregate_reference(acc, model, drives, delays,
                                        static_cast<std::size_t>(n_frames));
                else
                    aggregate_bfi(acc, k, drives, T);
            }
        },
        model.kind);

    std::vector<double> sum = acc.merge();
    if (blink != nullptr && blink->duty < 1.0) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            if (!detail::blink_on(*blink, static_cast<double>(i) / R))
                sum[i] = 0.0;
        }
    }
    const double inv_a = 1.0 / static_cast<double>(A);
    for (double& y : sum)
        y *= inv_a;
    return Waveform(std::move(sum), R, 0.0);
}

namespace {

double band_median(const std::vector<double>& samples, double lo, double hi,
                   bool upper) {
    const double cut = upper ? lo + 0.75 * (hi - lo) : lo + 0.25 * (hi - lo);
    std::vector<double> band;
    for (double y : samples) {
        if (upper ? (y >= cut) : (y <= cut))
            band.push_back(y);
    }
    std::sort(band.begin(), band.end());
    const std::size_t n = band.size();
    return n % 2 == 1 ? band[n / 2] : 0.5 * (band[n / 2 - 1] + band[n / 2]);
}

} // namespace

MbwPoint measure_mbw(const Waveform& trace, const RigConfig& rig,
                     int velocity_ppf) {
    validate(rig);
    if (velocity_ppf < 1)
        throw UsageError("measure_mbw: velocity must be a positive integer");
    const auto& y = trace.samples();
    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
    const double lo_raw = *min_it;
    const double hi_raw = *max_it;
    if (hi_raw - lo_raw < 1.0e-9)
        throw NumericError("measure_mbw: flat trace, no block passage");

    const double floor_level = band_median(y, lo_raw, hi_raw, false);
    const double plateau_level = band_median(y, lo_raw, hi_raw, true);
    if (plateau_level - floor_level < 1.0e-9)
        throw NumericError("measure_mbw: plateau and floor coincide");

    std::vector<double> norm(y.size());
    const double inv = 1.0 / (plateau_level - floor_level);
    const bool dark = rig.polarity == BlockPolarity::DarkOnBright;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double n = (y[i] - floor_level) * inv;
        norm[i] = dark ? 1.0 - n : n;
    }
    const Waveform normalized(std::move(norm), trace.sample_rate(),
                              trace.start_time());

    double crossing_s = 0.0;
    try {
        crossing_s = width_between(normalized, rig.threshold, rig.threshold,
                                   WidthMode::Envelope);
    } catch (const NumericError& e) {
        throw NumericError(std::string("measure_mbw: no full block passage (") +
                           e.what() + ")");
    }
    if (!(crossing_s > 0.0))
        throw NumericError("measure_mbw: no full block passage");

    MbwPoint point;
    point.velocity_ppf = velocity_ppf;
    point.crossing_time_s = crossing_s;
    point.crossing_time_frames = crossing_s * rig.frame_rate_hz;
    point.mbw_px = point.crossing_time_frames * velocity_ppf;
    point.delta_mbw_px = point.mbw_px - rig.block_width_px;
    point.delta_mbw_debiased_px =
        point.delta_mbw_px - 0.8 * (rig.aperture_px - 1);
    return point;
}

MbwSweep sweep(const RigConfig& rig, const DisplayModel& model,
               const std::vector<int>& velocities, const std::string& model_id) {
    if (velocities.empty())
        throw UsageError("sweep: velocity set must not be empty");
    for (std::size_t i = 1; i < velocities.size(); ++i) {
        if (velocities[i] <= velocities[i - 1])
            throw UsageError("sweep: velocities must be strictly increasing");
    }
    MbwSweep result;
    result.rig = rig;
    result.model_id = model_id;
    for (int v : velocities) {
        try {
            const Waveform trace = simulate_scroll(rig, model, v);
            result.points.push_back(measure_mbw(trace, rig, v));
        } catch (const Error& e) {
            throw Error(e.kind(), "velocity " + std::to_string(v) + ": " +
                                      e.what());
        }
    }
    return result;
}

} // namespace mblur
