#pragma once

#include <span>
#include <vector>

#include "depthgaze/metrics.hpp"

namespace depthgaze {

void check_eval_inputs(std::span<const Heatmap> predictions, std::span<const AnnotationRecord> records,
                       const EvalOptions& options);
EvalReport summarize(std::vector<RecordMetrics> rows);

}  // namespace depthgaze
