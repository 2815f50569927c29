#pragma once

#include <string>
#include <vector>

#include "dcsgd/harness.hpp"

namespace dcsgd {

// Renders one polyline per method of mean excess risk against log10(cost),
// with a shaded mean +/- sd band, on log10/log10 axes. `metric` must be
// "excess_risk". Throws std::invalid_argument when the summary has no
// plottable rows.
std::string render_summary_svg(const std::vector<SummaryRow>& rows, const std::string& metric);

}  // namespace dcsgd
