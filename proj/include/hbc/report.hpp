#pragma once

#include <string>

#include "hbc/eval.hpp"
#include "json.hpp"

namespace hbc {

// Row-normalized confusion heatmap of the pooled matrix.
std::string render_confusion_svg(const EvalReport& r);

// Box summary (min, quartiles, max) of per-segment counting accuracy for
// each source, from a CountReport JSON.
std::string render_count_box_svg(const nlohmann::json& count_report);

}  // namespace hbc
