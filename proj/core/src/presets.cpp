#include "ranklab/presets.hpp"

#include "ranklab/error.hpp"

namespace ranklab::presets {

namespace {

// Columns are user stances -2..2; entries within a column are news stances.
StanceMatrix from_columns(const std::array<StanceVector, kNumStances>& columns) {
  StanceMatrix m{};
  for (std::size_t u = 0; u < kNumStances; ++u)
    for (std::size_t n = 0; n < kNumStances; ++n) m[n][u] = columns[u][n];
  return m;
}

StanceMatrix pooled_click() {
  return from_columns({{
      {0.30, 0.20, 0.26, 0.13, 0.11},
      {0.20, 0.26, 0.30, 0.13, 0.11},
      {0.15, 0.15, 0.40, 0.15, 0.15},
      {0.11, 0.13, 0.30, 0.26, 0.20},
      {0.10, 0.12, 0.26, 0.22, 0.30},
  }});
}

// Side users click centrist news often but mostly highlight same-side news.
StanceMatrix pooled_highlight() {
  return from_columns({{
      {0.68, 0.64, 0.34, 0.30, 0.30},
      {0.50, 0.48, 0.24, 0.22, 0.20},
      {0.28, 0.28, 0.36, 0.28, 0.28},
      {0.20, 0.22, 0.24, 0.48, 0.50},
      {0.24, 0.24, 0.26, 0.64, 0.72},
  }});
}

// Moves `amount` of click mass in column `user` from news stance `from` to `to`.
void shift_click(StanceMatrix& c, int user, int from, int to, double amount) {
  c[static_cast<std::size_t>(from + 2)][static_cast<std::size_t>(user + 2)] -= amount;
  c[static_cast<std::size_t>(to + 2)][static_cast<std::size_t>(user + 2)] += amount;
}

void scale_highlight_column(StanceMatrix& h, int user, double factor) {
  for (auto& row : h) row[static_cast<std::size_t>(user + 2)] *= factor;
}

}  // namespace

BehaviorParams pooled() {
  BehaviorParams p;
  p.user_stance_dist = StanceDistribution({0.30, 0.15, 0.13, 0.15, 0.27});
  p.beta = 1.09;
  p.click = ClickMatrix(pooled_click());
  p.highlight = HighlightMatrix(pooled_highlight());
  return p;
}

const std::vector<std::string>& topic_names() {
  static const std::vector<std::string> kTopics = {"gender", "vaccination", "immigration", "climate_change"};
  return kTopics;
}

BehaviorParams topic(const std::string& name) {
  StanceMatrix c = pooled_click();
  StanceMatrix h = pooled_highlight();
  BehaviorParams p;
  if (name == "pooled") return pooled();
  if (name == "gender") {
    // Extreme users click extreme news less; right-leaning users engage less.
    shift_click(c, -2, -2, 0, 0.04);
    shift_click(c, 2, 2, 0, 0.04);
    scale_highlight_column(h, 1, 0.8);
    scale_highlight_column(h, 2, 0.8);
    p.user_stance_dist = StanceDistribution({0.30, 0.20, 0.18, 0.14, 0.18});
    p.beta = 1.07;
  } else if (name == "vaccination") {
    shift_click(c, -2, 0, -2, 0.02);
    shift_click(c, 2, 0, 2, 0.02);
    h[0][0] += 0.04;
    h[4][4] += 0.04;
    p.user_stance_dist = StanceDistribution({0.30, 0.16, 0.14, 0.14, 0.26});
    p.beta = 1.12;
  } else if (name == "immigration") {
    shift_click(c, -2, 0, -2, 0.04);
    shift_click(c, 2, 0, 2, 0.04);
    p.user_stance_dist = StanceDistribution({0.26, 0.16, 0.14, 0.18, 0.26});
    p.beta = 1.08;
  } else if (name == "climate_change") {
    shift_click(c, -2, 0, -2, 0.03);
    shift_click(c, 2, 0, 2, 0.03);
    shift_click(c, -1, 0, -1, 0.02);
    p.user_stance_dist = StanceDistribution({0.34, 0.20, 0.16, 0.12, 0.18});
    p.beta = 1.10;
  } else {
    throw ConfigError("unknown topic preset: " + name);
  }
  p.click = ClickMatrix(c);
  p.highlight = HighlightMatrix(h);
  return p;
}

StanceVector marginal_highlight(const BehaviorParams& params) {
  StanceVector out{};
  for (std::size_t u = 0; u < kNumStances; ++u) {
    for (std::size_t n = 0; n < kNumStances; ++n) {
      out[u] += params.click.values()[n][u] * params.highlight.values()[n][u];
    }
  }
  return out;
}

}  // namespace ranklab::presets
