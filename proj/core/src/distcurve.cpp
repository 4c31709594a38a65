#include "geoloc/distcurve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "geoloc/error.hpp"

namespace geoloc {

double LatencyDistanceCurve::evaluate(double latency_ms) const {
  const double arg = q * latency_ms + n;
  if (!(arg > 0.0)) {
    std::ostringstream os;
    os << "latency " << latency_ms << " ms outside curve domain (q*latency+n=" << arg << ")";
    throw Error(ErrorCode::DomainError, os.str());
  }
  // log1p keeps precision for the nearly linear regime (q*latency << n).
  if (n > 0.0) return p * (std::log(n) + std::log1p(q * latency_ms / n)) + m;
  return p * std::log(arg) + m;
}

LcFactor::LcFactor(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0 || value > kMaxLcFactor) {
    std::ostringstream os;
    os << "LC factor must lie in (0, " << kMaxLcFactor << "], got " << value;
    throw Error(ErrorCode::ValidationError, os.str());
  }
}

CorrectedLatency corrected_latency(double rtt_min_ms, int hop_count) {
  const double ms = rtt_min_ms / 2.0 - kPerHopDelayMs * hop_count - kProcessingDelayMs;
  if (ms <= kMinLatencyMs) return {kMinLatencyMs, ms <= 0.0};
  return {ms, false};
}

namespace {

// Canonical model d = p * log1p(q * x) + m, parameterised as (p, ln q, m).
struct Model {
  double p;
  double log_q;
  double m;
};

double sse(const Model& mdl, std::span<const double> x, std::span<const double> y) {
  const double q = std::exp(mdl.log_q);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (mdl.p * std::log1p(q * x[i]) + mdl.m);
    s += r * r;
  }
  return s;
}

// Linear least squares for (p, m) with q held fixed.
std::optional<Model> linear_start(double q, std::span<const double> x, std::span<const double> y) {
  Eigen::MatrixXd a(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = std::log1p(q * x[i]);
    a(static_cast<Eigen::Index>(i), 1) = 1.0;
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
  if (!sol.allFinite()) return std::nullopt;
  return Model{sol(0), std::log(q), sol(1)};
}

Model levenberg_marquardt(Model mdl, std::span<const double> x, std::span<const double> y) {
  constexpr int kMaxIterations = 500;
  double lambda = 1e-3;
  double cost = sse(mdl, x, y);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double q = std::exp(mdl.log_q);
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double qx = q * x[i];
      const double f = mdl.p * std::log1p(qx) + mdl.m;
      const Eigen::Vector3d g(std::log1p(qx), mdl.p * qx / (1.0 + qx), 1.0);
      jtj += g * g.transpose();
      jtr += g * (y[i] - f);
    }

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const Eigen::Vector3d step = damped.ldlt().solve(jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Model trial{mdl.p + step(0), mdl.log_q + step(1), mdl.m + step(2)};
      const double trial_cost = sse(trial, x, y);
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double gain = cost - trial_cost;
        mdl = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (gain <= 1e-15 * std::max(cost, 1e-300) || step.norm() < 1e-14) return mdl;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
  }
  return mdl;
}

}  // namespace

LatencyDistanceCurve fit_curve(std::span<const TrainingPair> data, const NodeId& landmark_id) {
  if (data.size() < 4) {
    std::ostringstream os;
    os << "curve fit needs at least 4 training pairs, got " << data.size();
    throw Error(ErrorCode::InsufficientData, os.str());
  }
  std::vector<double> x, y;
  x.reserve(data.size());
  y.reserve(data.size());
  for (const auto& pair : data) {
    if (!(pair.latency_ms > 0.0) || !(pair.distance_km > 0.0) || !std::isfinite(pair.latency_ms) ||
        !std::isfinite(pair.distance_km)) {
      throw Error(ErrorCode::ValidationError, "training pairs need positive latency and distance");
    }
    x.push_back(pair.latency_ms);
    y.push_back(pair.distance_km);
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw Error(ErrorCode::DegenerateData, "all training latencies are equal");

  // Small q values cover data that is close to linear (q -> 0, p*q fixed).
  static constexpr std::array<double, 8> kStartQ{1e-6, 1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0, 100.0};

  std::optional<Model> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const double q0 : kStartQ) {
    const auto start = linear_start(q0, x, y);
    if (!start) continue;
    const Model fitted = levenberg_marquardt(*start, x, y);
    const double cost = sse(fitted, x, y);
    const bool valid = std::isfinite(cost) && fitted.p > 0.0 && std::isfinite(fitted.log_q) &&
                       std::isfinite(fitted.m);
    if (valid && cost < best_cost) {
      best = fitted;
      best_cost = cost;
    }
  }
  if (!best) throw Error(ErrorCode::FitDiverged, "no start converged to an increasing curve");

  LatencyDistanceCurve curve;
  curve.landmark_id = landmark_id;
  curve.p = best->p;
  curve.q = std::exp(best->log_q);
  curve.n = 1.0;
  curve.m = best->m;
  curve.residual = best_cost;
  return curve;
}

KmDistance latency_to_distance(const LatencyDistanceCurve& curve, LcFactor lc, double latency_ms) {
  return KmDistance(lc.value() * std::max(0.0, curve.evaluate(latency_ms)));
}

LcFactor fit_uniform_lc(std::span<const double> predicted_km, std::span<const double> reference_km) {
  if (predicted_km.size() != reference_km.size()) {
    throw Error(ErrorCode::ValidationError, "LC calibration needs paired samples");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < predicted_km.size(); ++i) {
    num += predicted_km[i] * reference_km[i];
    den += predicted_km[i] * predicted_km[i];
  }
  if (!(den > 0.0) || !(num > 0.0)) return LcFactor{};
  return LcFactor(std::min(num / den, kMaxLcFactor));
}

}  // namespace geoloc
