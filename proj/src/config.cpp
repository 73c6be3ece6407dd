#include "mblur/config.hpp"

#include "mblur/csv.hpp"
#include "mblur/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mblur {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Ordered key -> value with consumption tracking, so leftovers can be
// reported as unknown keys.
class KeyValues {
public:
    KeyValues(const std::string& text, std::string source)
        : source_(std::move(source)) {
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            const std::string t = trim(line);
            if (t.empty())
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw UsageError(source_ + ": expected 'key = value' at line " +
                                 std::to_string(line_no));
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty() || value.empty())
                throw UsageError(source_ + ": empty key or value at line " +
                                 std::to_string(line_no));
            if (!entries_.emplace(key, value).second)
                throw UsageError(source_ + ": duplicate key '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string take_string(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw UsageError(source_ + ": missing required key '" + key + "'");
        consumed_.insert(key);
        return it->second;
    }

    double take_number(const std::string& key, double fallback,
                       bool* provided = nullptr) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            if (provided != nullptr)
                *provided = false;
            return fallback;
        }
        consumed_.insert(key);
        if (provided != nullptr)
            *provided = true;
        char* end = nullptr;
        const double v = std::strtod(it->second.c_str(), &end);
        if (end != it->second.c_str() + it->second.size() || !std::isfinite(v))
            throw UsageError(source_ + ": key '" + key + "' has bad number '" +
                             it->second + "'");
        return v;
    }

    double require_number(const std::string& key) {
        if (!has(key))
            throw UsageError(source_ + ": missing required key '" + key + "'");
        return take_number(key, 0.0);
    }

    bool take_bool(const std::string& key, bool fallback) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        consumed_.insert(key);
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "yes" || v == "on")
            return true;
        if (v == "false" || v == "0" || v == "no" || v == "off")
            return false;
        throw UsageError(source_ + ": key '" + key + "' has bad boolean '" + v +
                         "'");
    }

    void finish() const {
        for (const auto& [key, value] : entries_) {
            if (consumed_.count(key) == 0)
                throw UsageError(source_ + ": unknown key '" + key + "'");
        }
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExponentialLc take_lc_params(KeyValues& kv) {
    ExponentialLc lc;
    lc.tau_rise_s = kv.require_number("tau_rise_ms") * 1.0e-3;
    lc.tau_fall_s = kv.take_number("tau_fall_ms", lc.tau_rise_s * 1.0e3) * 1.0e-3;
    return lc;
}

} // namespace

DisplayModel parse_display_model_config(const std::string& text,
                                        const std::string& source_name) {
    KeyValues kv(text, source_name);
    DisplayModel model;
    const std::string kind = kv.take_string("kind");
    model.frame_rate_hz = kv.take_number("frame_rate_hz", 60.0);
    model.scan_delay_enabled = kv.take_bool("scan_delay", false);

    if (kind == "ideal_hold") {
        model.kind = IdealHold{};
    } else if (kind == "exponential_lc") {
        model.kind = take_lc_params(kv);
    } else if (kind == "impulse") {
        Impulse imp;
        imp.pulse_width_s = kv.take_number("pulse_width_ms", 0.1) * 1.0e-3;
        imp.decay_tau_s = kv.take_number("decay_tau_ms", 1.0) * 1.0e-3;
        model.kind = imp;
    } else if (kind == "backlight_blink") {
        BacklightBlink blink;
        blink.base = take_lc_params(kv);
        blink.blink_freq_hz = kv.require_number("blink_freq_hz");
        blink.duty = kv.require_number("duty");
        blink.phase = kv.take_number("phase", 0.0);
        model.kind = blink;
    } else if (kind == "black_frame_insertion") {
        BlackFrameInsertion bfi;
        bfi.base = take_lc_params(kv);
        bfi.black_fraction = kv.require_number("black_fraction");
        model.kind = bfi;
    } else {
        throw UsageError(source_name + ": unknown kind '" + kind +
                         "' (expected ideal_hold, exponential_lc, impulse, "
                         "backlight_blink or black_frame_insertion)");
    }
    kv.finish();
    validate(model);
    return model;
}

DisplayModel load_display_model_config(const std::string& path) {
    return parse_display_model_config(read_file(path), path);
}

RigConfig parse_rig_config(const std::string& text,
                           const std::string& source_name) {
    KeyValues kv(text, source_name);
    RigConfig rig;
    rig.screen_width_px =
        static_cast<int>(kv.take_number("screen_width_px", rig.screen_width_px));
    rig.frame_rate_hz = kv.take_number("frame_rate", rig.frame_rate_hz);
    rig.block_width_px =
        static_cast<int>(kv.take_number("block_width_px", rig.block_width_px));
    rig.aperture_px =
        static_cast<int>(kv.take_number("aperture_px", rig.aperture_px));
    rig.lmd_sample_rate_hz =
        kv.take_number("lmd_sample_rate", rig.lmd_sample_rate_hz);
    rig.threshold = kv.take_number("threshold", rig.threshold);
    if (kv.has("aperture_profile")) {
        const std::string profile = kv.take_string("aperture_profile");
        if (profile != "uniform")
            throw UsageError(source_name + ": aperture_profile must be 'uniform'");
        rig.aperture_profile = ApertureProfile::Uniform;
    }
    if (kv.has("polarity")) {
        const std::string polarity = kv.take_string("polarity");
        if (polarity == "bright-block-on-dark")
            rig.polarity = BlockPolarity::BrightOnDark;
        else if (polarity == "dark-block-on-bright")
            rig.polarity = BlockPolarity::DarkOnBright;
        else
            throw UsageError(source_name + ": polarity must be "
                             "'bright-block-on-dark' or 'dark-block-on-bright'");
    }
    kv.finish();
    validate(rig);
    return rig;
}

RigConfig load_rig_config(const std::string& path) {
    return parse_rig_config(read_file(path), path);
}

std::string describe(const DisplayModel& model) {
    std::string out = "kind=";
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, IdealHold>) {
                out += "ideal_hold";
            } else if constexpr (std::is_same_v<K, ExponentialLc>) {
                out += "exponential_lc tau_rise_ms=" +
                       format_double(k.tau_rise_s * 1.0e3) + " tau_fall_ms=" +
                       format_double(k.tau_fall_s * 1.0e3);
            } else if constexpr (std::is_same_v<K, Impulse>) {
                out += "impulse pulse_width_ms=" +
                       format_double(k.pulse_width_s * 1.0e3) + " decay_tau_ms=" +
                       format_double(k.decay_tau_s * 1.0e3);
            } else if constexpr (std::is_same_v<K, BacklightBlink>) {
                out += "backlight_blink tau_rise_ms=" +
                       format_double(k.base.tau_rise_s * 1.0e3) +
                       " tau_fall_ms=" + format_double(k.base.tau_fall_s * 1.0e3) +
                       " blink_freq_hz=" + format_double(k.blink_freq_hz) +
                       " duty=" + format_double(k.duty) +
                       " phase=" + format_double(k.phase);
            } else {
                out += "black_frame_insertion tau_rise_ms=" +
                       format_double(k.base.tau_rise_s * 1.0e3) +
                       " tau_fall_ms=" + format_double(k.base.tau_fall_s * 1.0e3) +
                       " black_fraction=" + format_double(k.black_fraction);
            }
        },
        model.kind);
    out += " frame_rate_hz=" + format_double(model.frame_rate_hz);
    out += std::string(" scan_delay=") +
           (model.scan_delay_enabled ? "true" : "false");
    return out;
}

std::string describe(const RigConfig& rig) {
    std::string out = "screen_width_px=" + std::to_string(rig.screen_width_px);
    out += " frame_rate=" + format_double(rig.frame_rate_hz);
    out += " block_width_px=" + std::to_string(rig.block_width_px);
    out += " aperture_px=" + std::to_string(rig.aperture_px);
    out += " aperture_profile=uniform";
    out += " lmd_sample_rate=" + format_double(rig.lmd_sample_rate_hz);
    out += " threshold=" + format_double(rig.threshold);
    out += std::string(" polarity=") +
           (rig.polarity == BlockPolarity::BrightOnDark
                ? "bright-block-on-dark"
                : "dark-block-on-bright");
    return out;
}

} // namespace mblur
