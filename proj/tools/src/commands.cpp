#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "geoloc/error.hpp"
#include "geoloc/pipeline.hpp"
#include "geoloc/serialize.hpp"

namespace geoloc::cli {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

OutputLayout::OutputLayout(fs::path r)
    : root(std::move(r)),
      landmarks(root / "landmarks.json"),
      training_measurements(root / "training_measurements.jsonl"),
      training_csv(root / "training.csv"),
      targets(root / "targets.json"),
      target_measurements(root / "target_measurements.jsonl"),
      curves_dir(root / "curves"),
      fit_report(root / "fit_report.json"),
      estimates_dir(root / "estimates"),
      eval_dir(root / "eval") {}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Algorithm: return 4;
  }
  return 4;
}

namespace {

// Owns the configured provider and the optional cache in front of it.
class ProviderStack {
 public:
  explicit ProviderStack(const ProviderSettings& s) {
    if (s.mode == ProviderMode::Http) {
      upstream_ = std::make_unique<HttpRoutingProvider>(s.base_url, std::chrono::milliseconds(s.timeout_ms));
    } else {
      upstream_ = std::make_unique<DetourProvider>(s.detour_factor);
    }
    if (s.cache_path) cached_ = std::make_unique<CachedProvider>(*upstream_, *s.cache_path);
  }
  DistanceProvider& get() { return cached_ ? static_cast<DistanceProvider&>(*cached_) : *upstream_; }
  std::optional<std::size_t> upstream_calls() const {
    if (!cached_) return std::nullopt;
    return cached_->upstream_calls();
  }

 private:
  std::unique_ptr<DistanceProvider> upstream_;
  std::unique_ptr<CachedProvider> cached_;
};

Topology topology_for(const PipelineConfig& c) {
  if (c.topology.path) return load_topology(*c.topology.path, c.topology.format);
  const auto& s = *c.topology.synthetic;
  return make_synthetic_topology(s.nodes, s.region, s.seed, s.degree);
}

Region bounding_region(const Topology& t) {
  Region r{90.0, -90.0, 180.0, -180.0};
  for (const auto& n : t.nodes()) {
    r.lat_min = std::min(r.lat_min, n.position.lat);
    r.lat_max = std::max(r.lat_max, n.position.lat);
    r.lon_min = std::min(r.lon_min, n.position.lon);
    r.lon_max = std::max(r.lon_max, n.position.lon);
  }
  // A single node or a line of nodes still needs a non-empty box.
  if (!(r.lat_min < r.lat_max)) r.lat_max = r.lat_min + 1e-6;
  if (!(r.lon_min < r.lon_max)) r.lon_max = r.lon_min + 1e-6;
  return r;
}

std::vector<SimTarget> targets_for(const PipelineConfig& c, const Topology& t) {
  return random_targets(c.targets.count, c.targets.region.value_or(bounding_region(t)), c.targets.seed);
}

LandmarkSet read_landmarks(const OutputLayout& layout) {
  if (!fs::exists(layout.landmarks)) {
    throw Error(ErrorCode::IoError, layout.landmarks.string() + " not found; run 'place' first");
  }
  return landmarks_from_json(read_text_file(layout.landmarks));
}

std::string targets_to_json(const std::vector<SimTarget>& targets) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : targets) {
    arr.push_back({{"id", t.id}, {"lat", t.position.lat}, {"lon", t.position.lon}});
  }
  return ordered_json{{"targets", arr}}.dump(2) + "\n";
}

std::vector<SimTarget> targets_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    std::vector<SimTarget> out;
    for (const auto& t : doc.at("targets")) {
      out.push_back({t.at("id").get<std::string>(),
                     make_geo_point(t.at("lat").get<double>(), t.at("lon").get<double>())});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("targets file: ") + e.what());
  }
}

std::vector<Measurement> measure_targets(const Topology& t, const LandmarkSet& landmarks,
                                         const std::vector<SimTarget>& targets,
                                         const NoiseModel& noise, const SimulationOptions& options,
                                         DistanceProvider& provider) {
  std::vector<Measurement> out;
  out.reserve(targets.size() * landmarks.k());
  for (const auto& target : targets) {
    for (const auto& lm : landmarks.members) {
      out.push_back(simulate_measurement(t, lm, target, noise, provider, options));
    }
  }
  return out;
}

const char* stage_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "distance conversion";
    case ErrorCode::TooFewCircles:
    case ErrorCode::CoincidentCenters: return "lateration";
    case ErrorCode::TooFewPoints:
    case ErrorCode::EmptyCloud:
    case ErrorCode::EmptyPointSet: return "estimation";
    case ErrorCode::UnknownNode:
    case ErrorCode::ValidationError: return "measurement input";
    default: return "localization";
  }
}

// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct TrainedModel {
  GeolocationModel model;
  CurveFit fit;
};

TrainedModel train(const Topology& t, const LandmarkSet& landmarks,
                   const std::vector<TrainingPair>& training) {
  TrainedModel out;
  out.fit = fit_landmark_curves(landmarks, training);
  if (out.fit.curves.empty()) {
    throw Error(ErrorCode::InsufficientData, "no landmark produced a usable curve");
  }
  out.model.landmarks = landmarks;
  out.model.frame = plane_frame_for(t, landmarks);
  out.model.lc = calibrate_uniform_lc(t, out.fit.curves, training, out.model.frame);
  out.model.curves = out.fit.curves;
  return out;
}

}  // namespace

void cmd_place(const PipelineConfig& config, std::ostream& log) {
  const OutputLayout layout(config.out);
  const auto t = topology_for(config);
  const auto result = dragoon(t, config.k);
  PlacementReport report{result.landmarks, result.score, std::nullopt, std::nullopt};
  report.baseline = init_2approx(t, config.k);
  report.baseline_score = placement_score(t, *report.baseline);
  write_text_file(layout.landmarks, landmarks_to_json(t, report));
  log << "placed " << config.k << " landmarks on " << t.size() << " nodes: max_dist "
      << result.score.max_dist << " (2-approx " << report.baseline_score->max_dist << "), mean_dist "
      << format_double(result.score.mean_dist) << " -> " << layout.landmarks.string() << "\n";
}

void cmd_simulate(const PipelineConfig& config, std::ostream& log) {
  const OutputLayout layout(config.out);
  const auto t = topology_for(config);
  const auto landmarks = read_landmarks(layout);
  ProviderStack provider(config.provider);

  const auto training_ms = measure_landmark_pairs(t, landmarks, config.noise, provider.get());
  write_text_file(layout.training_measurements, measurements_to_jsonl(training_ms));
  const auto training = training_from_measurements(t, training_ms, provider.get());
  write_text_file(layout.training_csv, training_to_csv(training));

  const auto targets = targets_for(config, t);
  write_text_file(layout.targets, targets_to_json(targets));
  const auto target_ms = measure_targets(t, landmarks, targets, config.noise, config.simulation, provider.get());
  write_text_file(layout.target_measurements, measurements_to_jsonl(target_ms));

  log << "simulated " << training_ms.size() << " landmark pair measurements and "
      << target_ms.size() << " target measurements (" << targets.size() << " targets) -> "
      << layout.root.string() << "\n";
}

void cmd_fit(const PipelineConfig& config, const FitOptions& options, std::ostream& log) {
  const OutputLayout layout(config.out);
  const auto t = topology_for(config);
  const auto landmarks = read_landmarks(layout);
  ProviderStack provider(config.provider);

  std::vector<Measurement> ms;
  if (options.measurements) {
    ms = measurements_from_jsonl(read_text_file(*options.measurements));
  } else if (fs::exists(layout.training_measurements)) {
    ms = measurements_from_jsonl(read_text_file(layout.training_measurements));
  } else {
    ms = measure_landmark_pairs(t, landmarks, config.noise, provider.get());
  }
  const auto training = training_from_measurements(t, ms, provider.get());
  write_text_file(layout.training_csv, training_to_csv(training));

  const auto trained = train(t, landmarks, training);
  fs::remove_all(layout.curves_dir);
  ordered_json curves = ordered_json::array();
  for (const auto& curve : trained.fit.curves) {
    write_text_file(layout.curves_dir / (curve.landmark_id + ".json"),
                    curve_to_json(curve, trained.model.lc));
    const auto pairs = std::count_if(training.begin(), training.end(),
                                     [&](const auto& p) { return p.from == curve.landmark_id; });
    curves.push_back({{"landmark_id", curve.landmark_id}, {"pairs", pairs}, {"residual", curve.residual}});
  }
  ordered_json skipped = ordered_json::array();
  for (const auto& s : trained.fit.skipped) {
    skipped.push_back({{"landmark_id", s.id}, {"reason", s.reason}});
    log << "skipped landmark " << s.id << ": " << s.reason << "\n";
  }
  const ordered_json report{{"lc", trained.model.lc.value()},
                            {"plane_ref_lat", trained.model.frame.ref_lat()},
                            {"curves", curves},
                            {"skipped", skipped}};
  write_text_file(layout.fit_report, report.dump(2) + "\n");

  log << "fitted " << trained.fit.curves.size() << " curves (" << trained.fit.skipped.size()
      << " skipped), uniform lc " << format_double(trained.model.lc.value());
  if (const auto calls = provider.upstream_calls()) log << ", provider calls " << *calls;
  log << " -> " << layout.curves_dir.string() << "\n";
}

void cmd_locate(const PipelineConfig& config, const LocateOptions& options, std::ostream& log) {
  const OutputLayout layout(config.out);
  const auto t = topology_for(config);
  const auto landmarks = read_landmarks(layout);

  GeolocationModel model;
  model.landmarks = landmarks;
  model.frame = plane_frame_for(t, landmarks);
  std::optional<double> lc;
  for (const auto& id : landmarks.members) {
    const auto path = layout.curves_dir / (id + ".json");
    if (!fs::exists(path)) continue;
    auto [curve, factor] = curve_from_json(read_text_file(path));
    if (lc && *lc != factor.value()) {
      throw Error(ErrorCode::ValidationError, "curve files disagree on the lc factor");
    }
    lc = factor.value();
    model.curves.push_back(std::move(curve));
  }
  if (model.curves.empty()) {
    throw Error(ErrorCode::IoError, "no curves in " + layout.curves_dir.string() + "; run 'fit' first");
  }
  model.lc = LcFactor(*lc);

  std::vector<SimTarget> truth;
  std::vector<Measurement> ms;
  if (options.measurements) {
    ms = measurements_from_jsonl(read_text_file(*options.measurements));
  } else if (fs::exists(layout.target_measurements)) {
    ms = measurements_from_jsonl(read_text_file(layout.target_measurements));
  } else {
    ProviderStack provider(config.provider);
    truth = targets_for(config, t);
    ms = measure_targets(t, landmarks, truth, config.noise, config.simulation, provider.get());
  }
  if (truth.empty() && fs::exists(layout.targets)) truth = targets_from_json(read_text_file(layout.targets));

  std::map<std::string, std::vector<Measurement>> by_target;
  for (auto& m : ms) by_target[m.target_id].push_back(std::move(m));
  if (options.target) {
    const auto it = by_target.find(*options.target);
    if (it == by_target.end()) {
      throw Error(ErrorCode::ValidationError, "no measurements for target '" + *options.target + "'");
    }
    auto selected = std::move(*it);
    by_target.clear();
    by_target.insert(std::move(selected));
  }

  std::string table = "target_id,lat,lon,error_km,tuning_steps,deviation_km\n";
  for (const auto& [target_id, target_ms] : by_target) {
    Estimate est;
    try {
      est = locate(t, model, target_ms, config.estimator);
    } catch (const Error& e) {
      throw Error(e.code(), "target '" + target_id + "', " + stage_of(e.code()) + " stage: " + e.what());
    }
    const auto base = layout.estimates_dir / target_id;
    write_text_file(base.string() + ".geojson", estimate_to_geojson(est));
    write_text_file(base.string() + ".cloud.geojson", cloud_to_geojson(est.cloud));
    write_text_file(base.string() + ".json", estimate_summary_json(est, target_id));

    std::string deviation;
    const auto gt = std::find_if(truth.begin(), truth.end(), [&](const auto& s) { return s.id == target_id; });
    if (gt != truth.end()) deviation = format_double(orthodromic_distance(est.location, gt->position).km());
    table += target_id + "," + format_double(est.location.lat) + "," + format_double(est.location.lon) + "," +
             format_double(est.error_radius_km.km()) + "," + std::to_string(est.tuning.accepted_steps) + "," +
             deviation + "\n";
    log << target_id << ": " << format_double(est.location.lat) << ", " << format_double(est.location.lon)
        << " error " << format_double(est.error_radius_km.km()) << " km";
    if (!deviation.empty()) log << ", deviation " << deviation << " km";
    log << "\n";
  }
  write_text_file(layout.estimates_dir / "estimates.csv", table);
}

namespace {

struct EvalRun {
  std::string method;
  int k = 0;
  std::vector<double> deviation;  // NaN where localization failed
  std::vector<double> error_radius;
  std::vector<std::string> failure;
};

struct Summary {
  std::size_t located = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double median = std::numeric_limits<double>::quiet_NaN();
  double within_50km = std::numeric_limits<double>::quiet_NaN();
  double variance = std::numeric_limits<double>::quiet_NaN();
};

Summary summarize(const std::vector<double>& values) {
  std::vector<double> ok;
  for (const double v : values) {
    if (std::isfinite(v)) ok.push_back(v);
  }
  Summary s;
  s.located = ok.size();
  if (ok.empty()) return s;
  std::sort(ok.begin(), ok.end());
  double sum = 0.0;
  for (const double v : ok) sum += v;
  s.mean = sum / static_cast<double>(ok.size());
  const auto mid = ok.size() / 2;
  s.median = ok.size() % 2 == 1 ? ok[mid] : 0.5 * (ok[mid - 1] + ok[mid]);
  s.within_50km = static_cast<double>(std::count_if(ok.begin(), ok.end(), [](double v) { return v <= 50.0; })) /
                  static_cast<double>(ok.size());
  double sq = 0.0;
  for (const double v : ok) sq += (v - s.mean) * (v - s.mean);
  s.variance = sq / static_cast<double>(ok.size());
  return s;
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

EvalRun evaluate(const PipelineConfig& config, const Topology& t, const LandmarkSet& landmarks,
                 std::string method, const std::vector<SimTarget>& targets, DistanceProvider& provider) {
  EvalRun run;
  run.method = std::move(method);
  run.k = static_cast<int>(landmarks.k());
  const auto training = generate_training_set(t, landmarks, config.noise, provider);
  const auto trained = train(t, landmarks, training);

  const auto n = targets.size();
  run.deviation.assign(n, std::numeric_limits<double>::quiet_NaN());
  run.error_radius.assign(n, std::numeric_limits<double>::quiet_NaN());
  run.failure.assign(n, {});
  parallel_for(n, config.eval.threads, [&](std::size_t i) {
    try {
      std::vector<Measurement> ms;
      for (const auto& lm : landmarks.members) {
        ms.push_back(simulate_measurement(t, lm, targets[i], config.noise, provider, config.simulation));
      }
      const auto est = locate(t, trained.model, ms, config.estimator);
      run.deviation[i] = orthodromic_distance(est.location, targets[i].position).km();
      run.error_radius[i] = est.error_radius_km.km();
    } catch (const Error& e) {
      run.failure[i] = std::string(to_string(e.code()));
    }
  });
  return run;
}

}  // namespace

void cmd_eval(const PipelineConfig& config, std::ostream& log) {
  const OutputLayout layout(config.out);
  const auto t = topology_for(config);
  const auto targets = targets_for(config, t);
  ProviderStack provider(config.provider);

  std::vector<EvalRun> runs;
  runs.push_back(evaluate(config, t, dragoon(t, config.k).landmarks, "dragoon", targets, provider.get()));
  if (config.eval.baseline) {
    runs.push_back(evaluate(config, t, init_2approx(t, config.k), "2-approx", targets, provider.get()));
  }
  for (const int k : config.eval.compare_k) {
    if (k == config.k) continue;
    runs.push_back(evaluate(config, t, dragoon(t, k).landmarks, "dragoon", targets, provider.get()));
  }

  // Per-target table: one deviation column per run.
  std::string per_target = "target_id,lat,lon";
  for (const auto& r : runs) per_target += "," + r.method + "_k" + std::to_string(r.k) + "_km";
  per_target += "\n";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    per_target += targets[i].id + "," + format_double(targets[i].position.lat) + "," +
                  format_double(targets[i].position.lon);
    for (const auto& r : runs) per_target += "," + csv_number(r.deviation[i]);
    per_target += "\n";
  }
  write_text_file(layout.eval_dir / "targets.csv", per_target);

  std::string details = "method,k,target_id,deviation_km,error_radius_km,failure\n";
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      details += r.method + "," + std::to_string(r.k) + "," + targets[i].id + "," + csv_number(r.deviation[i]) +
                 "," + csv_number(r.error_radius[i]) + "," + r.failure[i] + "\n";
    }
  }
  write_text_file(layout.eval_dir / "details.csv", details);

  std::string table = "method,k,targets,located,mean_km,median_km,within_50km,variance_km2\n";
  ordered_json summary = ordered_json::array();
  for (const auto& r : runs) {
    const auto s = summarize(r.deviation);
    table += r.method + "," + std::to_string(r.k) + "," + std::to_string(targets.size()) + "," +
             std::to_string(s.located) + "," + csv_number(s.mean) + "," + csv_number(s.median) + "," +
             csv_number(s.within_50km) + "," + csv_number(s.variance) + "\n";
    auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    summary.push_back({{"method", r.method},
                       {"k", r.k},
                       {"targets", targets.size()},
                       {"located", s.located},
                       {"mean_km", num(s.mean)},
                       {"median_km", num(s.median)},
                       {"within_50km", num(s.within_50km)},
                       {"variance_km2", num(s.variance)}});
    log << r.method << " k=" << r.k << ": located " << s.located << "/" << targets.size() << ", mean "
        << csv_number(s.mean) << " km, median " << csv_number(s.median) << " km, within 50 km "
        << csv_number(s.within_50km) << ", variance " << csv_number(s.variance) << "\n";
  }
  write_text_file(layout.eval_dir / "summary.csv", table);
  write_text_file(layout.eval_dir / "summary.json", ordered_json{{"runs", summary}}.dump(2) + "\n");
  log << "-> " << layout.eval_dir.string() << "\n";
}

}  // namespace geoloc::cli
