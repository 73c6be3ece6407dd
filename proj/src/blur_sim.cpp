#include "mblur/blur_sim.hpp"

#include "mblur/errors.hpp"
#include "response_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

namespace mblur {

using detail::sample_at_or_after;

Waveform mprc(const Waveform& lcrc_trace, double frame_period_s) {
    if (!(frame_period_s > 0.0))
        throw UsageError("mprc: frame period must be positive");
    const double R = lcrc_trace.sample_rate();
    const long N = std::lround(R * frame_period_s);
    if (N < 10)
        throw UsageError("mprc: fewer than 10 samples per frame");
    if (lcrc_trace.duration() < 3.0 * frame_period_s)
        throw DataError("mprc: trace shorter than 3 frame periods");
    const auto& x = lcrc_trace.samples();
    const std::size_t window = static_cast<std::size_t>(N) + 1;
    if (x.size() < window + 1)
        throw DataError("mprc: trace too short for the one-frame window");
    const std::size_t n_out = x.size() - static_cast<std::size_t>(N);
    std::vector<double> out(n_out);
    const double pivot = x[0];
    const double inv = 1.0 / static_cast<double>(window);
    double acc = 0.0;
    for (std::size_t i = 0; i < window; ++i)
        acc += x[i] - pivot;
    out[0] = pivot + acc * inv;
    for (std::size_t k = 1; k < n_out; ++k) {
        acc += (x[k + window - 1] - pivot) - (x[k - 1] - pivot);
        out[k] = pivot + acc * inv;
    }
    return Waveform(std::move(out), R, lcrc_trace.start_time());
}

namespace {

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1)
        return hi;
    std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
    return 0.5 * (v[n / 2 - 1] + hi);
}

// Median over the frame-long band at the given end of the trace.
double settled_level(const Waveform& w, double frame_period_s, bool front) {
    const auto frame_samples = static_cast<std::size_t>(
        std::max<long>(1, std::lround(frame_period_s * w.sample_rate())));
    const std::size_t n = std::min(frame_samples, w.size());
    std::vector<double> band;
    band.reserve(n);
    if (front) {
        band.assign(w.samples().begin(),
                    w.samples().begin() + static_cast<std::ptrdiff_t>(n));
    } else {
        band.assign(w.samples().end() - static_cast<std::ptrdiff_t>(n),
                    w.samples().end());
    }
    return median_of(std::move(band));
}

} // namespace

MotionMetrics metrics_from_mprc(const Waveform& mprc_trace, int velocity_ppf,
                                double frame_period_s) {
    if (velocity_ppf < 1)
        throw UsageError("metrics_from_mprc: velocity must be a positive integer");
    if (!(frame_period_s > 0.0))
        throw UsageError("metrics_from_mprc: frame period must be positive");
    const double s0 = settled_level(mprc_trace, frame_period_s, true);
    const double s1 = settled_level(mprc_trace, frame_period_s, false);
    const double scale = std::max({std::abs(s0), std::abs(s1), 1.0});
    if (std::abs(s1 - s0) < 1.0e-9 * scale)
        throw NumericError("metrics_from_mprc: no edge (settled levels coincide)");
    const Waveform norm =
        normalize(mprc_trace, std::min(s0, s1), std::max(s0, s1));
    const double tau_edge = width_between(norm, 0.1, 0.9, WidthMode::Edge);

    MotionMetrics m;
    m.velocity_ppf = velocity_ppf;
    m.n_bew_frames = tau_edge / frame_period_s;
    m.bew_px = m.n_bew_frames * static_cast<double>(velocity_ppf);
    m.n_bet_s = m.n_bew_frames * frame_period_s;
    return m;
}

RetinalProfile retinal_profile(const DisplayModel& model, int block_width_px,
                               int velocity_ppf, double sample_rate_hz) {
    validate(model);
    if (block_width_px < 1)
        throw UsageError("retinal_profile: block width must be >= 1");
    if (velocity_ppf < 1)
        throw UsageError("retinal_profile: velocity must be a positive integer");
    const double F = model.frame_rate_hz;
    const double T = 1.0 / F;
    const double R = sample_rate_hz;
    if (std::floor(T * R / velocity_ppf) < 2.0)
        throw UsageError(
            "retinal_profile: need at least 2 samples per eye sub-interval");

    const int v = velocity_ppf;
    const int W = block_width_px;
    const int settle = settling_frames(model);
    const int pad = v * (settle + 2) + 2;
    // Reference frame: late enough for every pixel of interest to have left
    // its initial state and settled into the periodic scroll.
    const int n0 = 2 + settle + (W + pad + v - 1) / v;
    // Wide virtual screen keeps the wrapped block away from the pixels of
    // interest for the whole simulated span.
    const int screen = n0 * v + pad + 2 * v + 2 * W + 8;
    const int x_base = n0 * v - W; // screen position of retinal x = 0
    const int x_lo = x_base - pad;
    const int x_hi = x_base + W + pad + v - 1;
    const int n_frames = n0 + 2;

    // Eye sub-interval boundaries within frame n0.
    const std::int64_t i0 = sample_at_or_after(n0 * T, R);
    std::vector<std::int64_t> bounds(static_cast<std::size_t>(v) + 1);
    for (int m = 0; m <= v; ++m) {
        const double t =
            (static_cast<double>(n0) + static_cast<double>(m) / v) * T;
        bounds[static_cast<std::size_t>(m)] = sample_at_or_after(t, R);
    }

    // Per pixel: mean emission in each sub-interval of frame n0.
    const int n_pixels = x_hi - x_lo + 1;
    std::vector<double> means(static_cast<std::size_t>(n_pixels) *
                              static_cast<std::size_t>(v));
    for (int px = 0; px < n_pixels; ++px) {
        const int x = x_lo + px;
        const PixelDrive drive =
            scrolling_drive(W, screen, v, n_frames, x, F);
        const double delay =
            model.scan_delay_enabled
                ? T * static_cast<double>(x) / static_cast<double>(screen)
                : 0.0;
        const Waveform trace = pixel_response_window(
            model, drive, R, static_cast<std::size_t>(n0),
            static_cast<std::size_t>(n0) + 1, delay);
        for (int m = 0; m < v; ++m) {
            const std::int64_t a = bounds[static_cast<std::size_t>(m)] - i0;
            const std::int64_t b = bounds[static_cast<std::size_t>(m) + 1] - i0;
            double acc = 0.0;
            for (std::int64_t i = a; i < b; ++i)
                acc += trace[static_cast<std::size_t>(i)];
            means[static_cast<std::size_t>(px) * v + static_cast<std::size_t>(m)] =
                acc / static_cast<double>(b - a);
        }
    }

    RetinalProfile profile;
    for (int x_r = -pad; x_r < W + pad; ++x_r) {
        const int px0 = (x_base + x_r) - x_lo;
        double acc = 0.0;
        for (int m = 0; m < v; ++m)
            acc += means[static_cast<std::size_t>(px0 + m) * v +
                         static_cast<std::size_t>(m)];
        profile.positions.push_back(x_r);
        profile.values.push_back(acc / v);
    }
    return profile;
}

MprtResult mprt(const DisplayModel& model,
                const std::vector<std::pair<double, double>>& transitions,
                int velocity_ppf, double sample_rate_hz) {
    if (transitions.empty())
        throw UsageError("mprt: transition set must not be empty");
    std::vector<std::pair<double, double>> pairs = transitions;
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    const double T = 1.0 / model.frame_rate_hz;
    MprtResult result;
    double acc = 0.0;
    for (const auto& p : pairs) {
        try {
            const Waveform curve = lcrc(model, p.first, p.second, sample_rate_hz);
            const Waveform response = mprc(curve, T);
            const MotionMetrics m =
                metrics_from_mprc(response, velocity_ppf, T);
            acc += m.n_bet_s;
            result.per_transition.emplace_back(p, m);
        } catch (const NumericError& e) {
            throw NumericError("transition " + std::to_string(p.first) + "->" +
                               std::to_string(p.second) + ": " + e.what());
        }
    }
    result.mprt_s = acc / static_cast<double>(result.per_transition.size());
    return result;
}

} // namespace mblur
