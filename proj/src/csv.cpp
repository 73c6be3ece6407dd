#include "mblur/csv.hpp"

#include "mblur/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace mblur {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& field, const std::string& source,
                    int line_no) {
    const std::string t = trim(field);
    if (t.empty())
        throw DataError(source + ": empty numeric field at line " +
                        std::to_string(line_no));
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v))
        throw DataError(source + ": bad number '" + t + "' at line " +
                        std::to_string(line_no));
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

void write_manifest(std::ostream& out, const std::vector<std::string>& manifest) {
    for (const auto& line : manifest)
        out << "# " << line << "\n";
}

} // namespace

Waveform read_waveform_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<double> times;
    std::vector<double> values;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        if (!header_seen) {
            if (t != "time_s,luminance")
                throw DataError(source_name +
                                ": expected header 'time_s,luminance' at line " +
                                std::to_string(line_no));
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(t);
        if (fields.size() != 2)
            throw DataError(source_name + ": expected 2 fields at line " +
                            std::to_string(line_no));
        times.push_back(parse_number(fields[0], source_name, line_no));
        values.push_back(parse_number(fields[1], source_name, line_no));
        const std::size_t n = times.size();
        if (n >= 2) {
            const double dt = times[n - 1] - times[n - 2];
            if (!(dt > 0.0))
                throw DataError(source_name +
                                ": time not strictly increasing at line " +
                                std::to_string(line_no));
            const double dt0 = times[1] - times[0];
            if (std::abs(dt - dt0) > 1.0e-6 * dt0)
                throw DataError(source_name + ": non-uniform time grid at line " +
                                std::to_string(line_no));
        }
    }
    if (!header_seen)
        throw DataError(source_name + ": missing header 'time_s,luminance'");
    if (times.size() < 2)
        throw DataError(source_name + ": needs at least 2 samples");

    const double rate = static_cast<double>(times.size() - 1) /
                        (times.back() - times.front());
    return Waveform(std::move(values), rate, times.front());
}

Waveform load_waveform_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open waveform CSV: " + path);
    return read_waveform_csv(in, path);
}

void write_waveform_csv(std::ostream& out, const Waveform& w,
                        const std::vector<std::string>& manifest) {
    write_manifest(out, manifest);
    out << "time_s,luminance\n";
    for (std::size_t i = 0; i < w.size(); ++i)
        out << format_double(w.time_at(i)) << "," << format_double(w[i]) << "\n";
}

void save_waveform_csv(const std::string& path, const Waveform& w,
                       const std::vector<std::string>& manifest) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write file: " + path);
    write_waveform_csv(out, w, manifest);
}

MethodScores read_method_scores_csv(std::istream& in,
                                    const std::string& source_name) {
    std::string line;
    int line_no = 0;
    MethodScores scores;
    bool meta_seen = false;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            if (meta_seen)
                continue;
            // Expect: # method=<name> orientation=<higher|lower>
            std::istringstream meta(t.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "method") {
                    scores.method = value;
                } else if (key == "orientation") {
                    if (value == "higher")
                        scores.orientation = Orientation::HigherIsBetter;
                    else if (value == "lower")
                        scores.orientation = Orientation::LowerIsBetter;
                    else
                        throw DataError(source_name +
                                        ": orientation must be 'higher' or "
                                        "'lower', got '" +
                                        value + "'");
                    meta_seen = true;
                }
            }
            continue;
        }
        if (!meta_seen)
            throw DataError(source_name +
                            ": missing '# method=<name> orientation=<higher|lower>' "
                            "comment before data");
        if (!header_seen) {
            if (t != "device,value")
                throw DataError(source_name +
                                ": expected header 'device,value' at line " +
                                std::to_string(line_no));
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(t);
        if (fields.size() != 2)
            throw DataError(source_name + ": expected 2 fields at line " +
                            std::to_string(line_no));
        const std::string device = trim(fields[0]);
        if (device.empty())
            throw DataError(source_name + ": empty device id at line " +
                            std::to_string(line_no));
        scores.values.emplace_back(device,
                                   parse_number(fields[1], source_name, line_no));
    }
    if (scores.method.empty())
        throw DataError(source_name + ": missing method name");
    if (scores.values.size() < 2)
        throw DataError(source_name + ": needs at least 2 devices");
    return scores;
}

MethodScores load_method_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open scores CSV: " + path);
    return read_method_scores_csv(in, path);
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table,
                          const std::vector<std::string>& manifest) {
    write_manifest(out, manifest);
    for (const auto& [pair, rho] : table.spearman)
        out << "# spearman " << pair.first << ":" << pair.second << "="
            << format_double(rho) << "\n";
    for (const auto& col : table.methods) {
        if (col.has_ties)
            out << "# tie method=" << col.method
                << " (broken by device identifier order)\n";
    }
    out << "device";
    for (const auto& col : table.methods)
        out << "," << col.method << "_z";
    for (const auto& col : table.methods)
        out << "," << col.method << "_rank";
    out << "\n";
    for (std::size_t i = 0; i < table.devices.size(); ++i) {
        out << table.devices[i];
        for (const auto& col : table.methods)
            out << "," << format_double(col.z[i]);
        for (const auto& col : table.methods)
            out << "," << col.rank[i];
        out << "\n";
    }
}

void write_sweep_csv(std::ostream& out, const MbwSweep& sweep_result,
                     const std::vector<std::string>& manifest,
                     const std::vector<std::string>& trailing_comments) {
    write_manifest(out, manifest);
    out << "velocity_ppf,crossing_time_s,crossing_time_frames,mbw_px,"
           "delta_mbw_px,delta_mbw_debiased_px\n";
    for (const auto& p : sweep_result.points) {
        out << p.velocity_ppf << "," << format_double(p.crossing_time_s) << ","
            << format_double(p.crossing_time_frames) << ","
            << format_double(p.mbw_px) << "," << format_double(p.delta_mbw_px)
            << "," << format_double(p.delta_mbw_debiased_px) << "\n";
    }
    write_manifest(out, trailing_comments);
}

void write_metrics_csv(std::ostream& out, const MprtResult& result,
                       const std::vector<std::string>& manifest) {
    write_manifest(out, manifest);
    out << "from_gray,to_gray,velocity_ppf,bew_px,n_bew_frames,n_bet_ms\n";
    for (const auto& [pair, m] : result.per_transition) {
        out << format_double(pair.first) << "," << format_double(pair.second)
            << "," << m.velocity_ppf << "," << format_double(m.bew_px) << ","
            << format_double(m.n_bew_frames) << ","
            << format_double(m.n_bet_s * 1.0e3) << "\n";
    }
}

} // namespace mblur
