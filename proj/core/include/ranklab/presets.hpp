#pragma once

#include <string>
#include <vector>

#include "ranklab/model.hpp"

namespace ranklab::presets {

// Pooled behavioral parameters matching the static-experiment aggregates:
// beta 1.09, a left-skewed user distribution concentrated at the extremes,
// same-stance click lift of about 2 for center users and 1.5 for extreme
// users, and a U-shaped highlight propensity (about 0.50 for extreme-left,
// 0.47 for extreme-right, 0.30-0.40 in between).
BehaviorParams pooled();

// The four survey topics.
const std::vector<std::string>& topic_names();

// Topic-level variations around the pooled parameters.
BehaviorParams topic(const std::string& name);

// Expected marginal highlight rate of each user stance under `params`
// (highlight probability averaged over the uniform-position click mix).
StanceVector marginal_highlight(const BehaviorParams& params);

}  // namespace ranklab::presets
