#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>

#include "commands.hpp"
#include "ranklab/error.hpp"
#include "ranklab/event.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/simulator.hpp"
#include "ranklab/stats.hpp"

namespace ranklab::cli {

namespace {

struct AnalyzeArgs {
  std::string baseline;
  std::string treatment;
  std::string baseline_label = "baseline";
  std::string treatment_label = "treatment";
};

// Applied events of one scenario restricted to a topic (or all topics), with
// the clicks of every run's steady window.
struct ScenarioData {
  std::vector<InteractionEvent> events;
  MetricWindow steady;
  std::vector<double> ext_samples;
  std::vector<double> pol_samples;
  std::size_t runs = 0;
};

ScenarioData collect(const InteractionLog& log, const std::optional<std::string>& topic, std::size_t burn_in,
                     std::size_t w) {
  std::map<std::string, std::vector<const InteractionEvent*>> by_run;
  std::vector<std::string> order;
  for (const auto& r : log.records) {
    if (!r.applied) continue;
    if (topic && r.event.topic != *topic) continue;
    auto [it, inserted] = by_run.try_emplace(r.run_id);
    if (inserted) order.push_back(r.run_id);
    it->second.push_back(&r.event);
  }
  ScenarioData d;
  d.runs = order.size();
  for (const auto& run_id : order) {
    const auto& events = by_run[run_id];
    const auto [begin, end] = steady_range(events.size(), burn_in, w);
    for (std::size_t i = 0; i < events.size(); ++i) {
      const InteractionEvent& e = *events[i];
      d.events.push_back(e);
      if (i < begin || i >= end) continue;
      const UserGroup g = group_of(e.user_stance);
      d.steady.clicks.push_back({e.clicked_stance, g});
      d.ext_samples.push_back(std::abs(e.clicked_stance.value()));
      if (auto c = polarization_contribution(e.clicked_stance, g)) d.pol_samples.push_back(*c);
    }
  }
  d.steady.w = d.steady.clicks.size();
  return d;
}

struct TestRow {
  std::string scope;
  std::string name;
  std::optional<stats::TestResult> result;
};

std::optional<stats::TestResult> mwu(const std::vector<double>& treatment, const std::vector<double>& baseline) {
  if (treatment.empty() || baseline.empty()) return std::nullopt;
  return stats::mann_whitney_u(treatment, baseline, stats::Alternative::Greater);
}

// Scenario x news-stance counts of one user group, without all-zero columns.
std::optional<stats::TestResult> group_chi_square(const ScenarioData& a, const ScenarioData& b, UserGroup g) {
  const auto ca = click_counts_by_group(a.events)[group_index(g)];
  const auto cb = click_counts_by_group(b.events)[group_index(g)];
  std::vector<std::vector<double>> table(2);
  for (std::size_t s = 0; s < kNumStances; ++s) {
    if (ca[s] + cb[s] == 0) continue;
    table[0].push_back(ca[s]);
    table[1].push_back(cb[s]);
  }
  if (table[0].size() < 2) return std::nullopt;
  double ra = 0, rb = 0;
  for (std::size_t j = 0; j < table[0].size(); ++j) {
    ra += table[0][j];
    rb += table[1][j];
  }
  if (ra == 0 || rb == 0) return std::nullopt;
  return stats::chi_square_contingency(table);
}

std::string p_text(const std::optional<stats::TestResult>& r) {
  if (!r) return "NA";
  return num(r->p_value, 6) + stars(r->p_value);
}

}  // namespace

void add_analyze(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("analyze", "Compare the event logs of two ranking scenarios");
  auto o = std::make_shared<AnalyzeArgs>();
  app->add_option("baseline", o->baseline, "Event log of the reference scenario")->required();
  app->add_option("treatment", o->treatment, "Event log of the compared scenario")->required();
  app->add_option("--baseline-label", o->baseline_label, "Name of the reference scenario")->capture_default_str();
  app->add_option("--treatment-label", o->treatment_label, "Name of the compared scenario")->capture_default_str();
  app->callback([&common, &action, o]() {
    action = [&common, o]() {
      const InteractionLog log_a = read_event_log(o->baseline);
      const InteractionLog log_b = read_event_log(o->treatment);
      std::set<std::string> topic_set;
      for (const auto* log : {&log_a, &log_b})
        for (const auto& r : log->records) topic_set.insert(r.event.topic);
      std::vector<std::optional<std::string>> scopes;
      if (topic_set.size() > 1)
        for (const auto& t : topic_set) scopes.emplace_back(t);
      scopes.emplace_back(std::nullopt);

      const auto dir = common.out_dir();
      std::ofstream metrics(dir / "metrics.csv");
      metrics << "scope,scenario,runs,events,steady_clicks,ext,pol\n";
      std::ofstream ranks(dir / "ranks.csv");
      ranks << "scope,scenario,group,EL,ML,C,MR,ER\n";
      std::ofstream shares(dir / "shares.csv");
      shares << "scope,scenario,group,clicks,EL,ML,C,MR,ER\n";
      std::ofstream tests(dir / "tests.csv");
      tests << "scope,test,method,alternative,statistic,dof,p_value,stars,flagged\n";

      for (const auto& scope : scopes) {
        const std::string name = scope.value_or("pooled");
        const ScenarioData a = collect(log_a, scope, common.burn_in, common.window);
        const ScenarioData b = collect(log_b, scope, common.burn_in, common.window);
        std::cout << "== " << name << " ==\n";
        std::cout << "  scenario        runs  events  Ext       Pol\n";
        for (const auto& [label, d] : {std::pair{&o->baseline_label, &a}, std::pair{&o->treatment_label, &b}}) {
          const auto ext = try_extremism(d->steady);
          const auto pol = try_polarization(d->steady);
          metrics << name << ',' << *label << ',' << d->runs << ',' << d->events.size() << ','
                  << d->steady.clicks.size() << ',' << num(ext) << ',' << num(pol) << '\n';
          char line[160];
          std::snprintf(line, sizeof line, "  %-14s %5zu %7zu  %-8s  %-8s\n", label->c_str(), d->runs,
                        d->events.size(), num(ext, 3).c_str(), num(pol, 3).c_str());
          std::cout << line;

          const auto shares_by_group = click_share_by_group(d->events);
          const auto counts = click_counts_by_group(d->events);
          for (UserGroup g : kAllGroups) {
            const auto r = avg_group_ranking_by_stance(d->events, g);
            ranks << name << ',' << *label << ',' << group_tag(g);
            for (const auto& v : r) ranks << ',' << num(v, 4);
            ranks << '\n';
            double n = 0;
            for (double c : counts[group_index(g)]) n += c;
            shares << name << ',' << *label << ',' << group_tag(g) << ',' << n;
            const auto& sh = shares_by_group[group_index(g)];
            for (std::size_t s = 0; s < kNumStances; ++s) shares << ',' << (sh ? num((*sh)[s], 4) : "NA");
            shares << '\n';
          }
        }

        std::vector<TestRow> rows;
        rows.push_back({name, "mwu_ext", mwu(b.ext_samples, a.ext_samples)});
        rows.push_back({name, "mwu_pol", mwu(b.pol_samples, a.pol_samples)});
        for (UserGroup g : kAllGroups) {
          rows.push_back({name, "chi2_" + std::string(group_tag(g)), group_chi_square(a, b, g)});
        }
        std::cout << "  tests (" << o->treatment_label << " vs " << o->baseline_label << "):";
        for (const auto& row : rows) {
          std::cout << "  " << row.name << " p=" << p_text(row.result);
          tests << row.scope << ',' << row.name << ',';
          if (row.result) {
            const auto& t = *row.result;
            tests << t.method << ',' << t.alternative << ',' << num(t.statistic) << ','
                  << (t.dof > 0 ? num(t.dof, 0) : "NA") << ',' << num(t.p_value, 8) << ',' << stars(t.p_value) << ','
                  << (t.flagged ? "true" : "false") << '\n';
          } else {
            tests << "NA,NA,NA,NA,NA,,false\n";
          }
        }
        std::cout << "\n";
      }
      std::cout << "significance: * p<0.05, ** p<0.01, *** p<0.001\n";
      write_manifest(dir, "analyze", common, {o->baseline, o->treatment},
                     {"metrics.csv", "ranks.csv", "shares.csv", "tests.csv"});
    };
  });
}

}  // namespace ranklab::cli
