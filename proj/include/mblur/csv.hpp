#pragma once

#include "mblur/analysis.hpp"
#include "mblur/blur_sim.hpp"
#include "mblur/virtual_rig.hpp"
#include "mblur/waveform.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mblur {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

// Waveform CSV: optional '#' comment lines, header `time_s,luminance`, then
// one row per sample. The time column must be strictly increasing and uniform
// within 1 ppm of the first step.
Waveform read_waveform_csv(std::istream& in, const std::string& source_name);
Waveform load_waveform_csv(const std::string& path);
void write_waveform_csv(std::ostream& out, const Waveform& w,
                        const std::vector<std::string>& manifest = {});
void save_waveform_csv(const std::string& path, const Waveform& w,
                       const std::vector<std::string>& manifest = {});

// Method scores CSV: a leading comment `# method=<name> orientation=<higher|lower>`
// followed by header `device,value`.
MethodScores read_method_scores_csv(std::istream& in,
                                    const std::string& source_name);
MethodScores load_method_scores_csv(const std::string& path);

void write_comparison_csv(std::ostream& out, const ComparisonTable& table,
                          const std::vector<std::string>& manifest = {});

void write_sweep_csv(std::ostream& out, const MbwSweep& sweep_result,
                     const std::vector<std::string>& manifest = {},
                     const std::vector<std::string>& trailing_comments = {});

void write_metrics_csv(std::ostream& out, const MprtResult& result,
                       const std::vector<std::string>& manifest = {});

} // namespace mblur
