#include "mca/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

namespace mca {

std::vector<SweepConfig> sweep_grid(const std::vector<double>& thresholds,
                                    const std::vector<double>& coefficients) {
  std::vector<SweepConfig> grid;
  grid.reserve(thresholds.size() * coefficients.size() * 2);
  for (const double t : thresholds) {
    for (const double c : coefficients) {
      for (const auto m : {AffinityMetric::M4, AffinityMetric::M5}) {
        grid.push_back({t, c, m});
      }
    }
  }
  return grid;
}

std::vector<SweepConfig> default_sweep_grid() {
  return sweep_grid({kDefaultThresholds.begin(), kDefaultThresholds.end()},
                    {kDefaultCoefficients.begin(), kDefaultCoefficients.end()});
}

PipelineConfig to_pipeline_config(const SweepConfig& c, const SweepOptions& o) {
  PipelineConfig p;
  p.loftr_threshold = c.loftr_threshold;
  p.distance_coefficient = c.distance_coefficient;
  p.metric = c.metric;
  p.window = o.window;
  p.accept_threshold = o.accept_threshold;
  p.symmetric_residual = o.symmetric_residual;
  return p;
}

namespace {

void rank(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& l, const SweepRow& r) { return l.scores.f1 > r.scores.f1; });
}

}  // namespace

std::vector<SweepRow> run_sweep(const PairContext& ctx, const std::vector<FrameInput>& frames,
                                const std::vector<SweepConfig>& configs,
                                const SweepOptions& options) {
  std::vector<SweepRow> rows(configs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      SweepRow& row = rows[k];
      row.pair = {ctx.camera_a, ctx.camera_b};
      row.config = configs[k];
      try {
        const PairRun run = run_pair(ctx, frames, to_pipeline_config(configs[k], options));
        row.counts = run.totals;
        row.scores = run.scores;
        row.failed_frames = run.failed_frames;
        for (const auto& f : run.frames) {
          if (!f.failure.empty()) {
            row.failure = "frame " + std::to_string(f.frame_id) + ": " + f.failure;
            break;
          }
        }
      } catch (const std::exception& e) {
        row.failed_frames = frames.size();
        row.failure = e.what();
      }
    }
  };

  unsigned n = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  n = std::clamp<unsigned>(n, 1, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
      pool.emplace_back(worker);
    }
  }
  rank(rows);
  return rows;
}

std::vector<SweepRow> failed_sweep(const CameraPair& pair, const std::vector<SweepConfig>& configs,
                                   const std::vector<FrameInput>& frames,
                                   const std::string& failure) {
  // Zero predictions: every co-visible person is a false negative.
  EvalCounts counts;
  for (const auto& f : frames) {
    counts += score_frame({}, f.pair.detections_a, f.pair.detections_b);
  }
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) {
    SweepRow row;
    row.pair = pair;
    row.config = c;
    row.counts = counts;
    row.scores = micro_f1(counts);
    row.failed_frames = frames.size();
    row.failure = failure;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> best_per_pair(const std::vector<SweepRow>& rows) {
  std::vector<SweepRow> best;
  std::map<CameraPair, std::size_t> slot;
  for (const auto& r : rows) {
    const auto it = slot.find(r.pair);
    if (it == slot.end()) {
      slot.emplace(r.pair, best.size());
      best.push_back(r);
    } else if (r.scores.f1 > best[it->second].scores.f1) {
      best[it->second] = r;
    }
  }
  return best;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "pair,threshold,coefficient,metric,tp,fp,fn,precision,recall,f1,failed_frames\n";
  const auto precision = out.precision(17);
  for (const auto& r : rows) {
    out << r.pair.a << '_' << r.pair.b << ',' << r.config.loftr_threshold << ','
        << r.config.distance_coefficient << ',' << to_string(r.config.metric) << ','
        << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.fn << ',' << r.scores.precision
        << ',' << r.scores.recall << ',' << r.scores.f1 << ',' << r.failed_frames << '\n';
  }
  out.precision(precision);
}

std::string sweep_json(const std::vector<SweepRow>& rows) {
  auto doc = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"pair", {r.pair.a, r.pair.b}},
                     {"threshold", r.config.loftr_threshold},
                     {"coefficient", r.config.distance_coefficient},
                     {"metric", std::string(to_string(r.config.metric))},
                     {"tp", r.counts.tp},
                     {"fp", r.counts.fp},
                     {"fn", r.counts.fn},
                     {"precision", r.scores.precision},
                     {"recall", r.scores.recall},
                     {"f1", r.scores.f1},
                     {"failed_frames", r.failed_frames}};
    if (!r.failure.empty()) {
      j["failure"] = r.failure;
    }
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void write_best_summary(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "pair,precision,recall,f1,threshold,coefficient,metric\n";
  char buf[160];
  for (const auto& r : best_per_pair(rows)) {
    std::snprintf(buf, sizeof buf, "%d_%d,%.2f,%.2f,%.2f,%g,%g,", r.pair.a, r.pair.b,
                  100.0 * r.scores.precision, 100.0 * r.scores.recall, 100.0 * r.scores.f1,
                  r.config.loftr_threshold, r.config.distance_coefficient);
    out << buf << to_string(r.config.metric) << '\n';
  }
}

void write_f1_surface(std::ostream& out, const std::vector<SweepRow>& rows) {
  std::vector<const SweepRow*> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) {
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow* l, const SweepRow* r) {
    return std::tuple(l->pair, l->config.metric, l->config.loftr_threshold,
                      l->config.distance_coefficient) <
           std::tuple(r->pair, r->config.metric, r->config.loftr_threshold,
                      r->config.distance_coefficient);
  });
  out << "pair,metric,threshold,coefficient,f1\n";
  const auto precision = out.precision(17);
  for (const auto* r : sorted) {
    out << r->pair.a << '_' << r->pair.b << ',' << to_string(r->config.metric) << ','
        << r->config.loftr_threshold << ',' << r->config.distance_coefficient << ','
        << r->scores.f1 << '\n';
  }
  out.precision(precision);
}

}  // namespace mca
