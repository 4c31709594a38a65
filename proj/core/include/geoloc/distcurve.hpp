#pragma once

#include <span>
#include <string>
#include <vector>

#include "geoloc/geo.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

// Average per-hop delay and final-router processing delay removed from
// halved RTTs before they are mapped to distance.
inline constexpr double kPerHopDelayMs = 0.055;
inline constexpr double kProcessingDelayMs = 0.11;
inline constexpr double kMinLatencyMs = 0.001;

// distance_km = p * ln(q * latency_ms + n) + m
//
// The four parameters are not jointly identifiable (n can be traded against
// q and m), so fit_curve always returns the representative with n == 1.
struct LatencyDistanceCurve {
  NodeId landmark_id;
  double p = 0.0;
  double q = 0.0;
  double n = 1.0;
  double m = 0.0;
  double residual = 0.0;  // sum of squared errors on the training data

  // Raw model value, may be negative. Throws Error(DomainError) when
  // q * latency + n <= 0.
  double evaluate(double latency_ms) const;
};

class LcFactor {
 public:
  constexpr LcFactor() = default;
  // Throws Error(ValidationError) unless 0 < value <= 1.5.
  explicit LcFactor(double value);

  constexpr double value() const noexcept { return value_; }

 private:
  double value_ = 1.0;
};

inline constexpr double kMaxLcFactor = 1.5;

struct TrainingPair {
  double latency_ms = 0.0;  // corrected one-way latency
  double distance_km = 0.0; // road distance
  NodeId from;
  NodeId to;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct CorrectedLatency {
  double ms = 0.0;
  bool clamped = false;  // subtraction went non-positive; implausible sample
};

// rtt_min / 2 - 0.055 * hops - 0.11, clamped below at kMinLatencyMs.
CorrectedLatency corrected_latency(double rtt_min_ms, int hop_count);

// Least-squares fit of the logarithmic curve. Throws
// Error(InsufficientData) for fewer than 4 pairs, Error(DegenerateData) when
// all latencies are equal, Error(FitDiverged) when no start converges to a
// valid increasing curve.
LatencyDistanceCurve fit_curve(std::span<const TrainingPair> data, const NodeId& landmark_id = {});

// lc * max(0, curve(latency)). Throws Error(DomainError) outside the curve's
// domain.
KmDistance latency_to_distance(const LatencyDistanceCurve& curve, LcFactor lc, double latency_ms);

// Uniform LC factor that best maps predicted distances onto reference
// distances in the least-squares sense, clamped into (0, 1.5].
LcFactor fit_uniform_lc(std::span<const double> predicted_km, std::span<const double> reference_km);

}  // namespace geoloc
