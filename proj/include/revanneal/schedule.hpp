#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "revanneal/errors.hpp"

namespace revanneal {

enum class ScheduleKind { qa, ara_linear, ara_custom, ira_quadratic };

inline std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::qa: return "qa";
    case ScheduleKind::ara_linear: return "ara_linear";
    case ScheduleKind::ara_custom: return "ara_custom";
    case ScheduleKind::ira_quadratic: return "ira_quadratic";
  }
  return "unknown";
}

/// A tabulated control point at normalized time u = t / tau.
struct ControlPoint {
  double u;
  double s;
  double lambda;
};

struct Controls {
  double s;
  double lambda;
};

/// Maps time t in [0, tau] to the control parameters (s, lambda).
class Schedule {
 public:
  static Schedule qa(double tau) { return Schedule(ScheduleKind::qa, tau); }

  static Schedule ara_linear(double tau) { return Schedule(ScheduleKind::ara_linear, tau); }

  /// Piecewise-linear interpolation of control points; u must start at 0,
  /// end at 1 and increase strictly.
  static Schedule ara_custom(double tau, std::vector<ControlPoint> points) {
    if (points.size() < 2 || points.front().u != 0.0 || points.back().u != 1.0) {
      throw ConfigError("custom schedule needs control points spanning u = 0 .. 1");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i].u > points[i - 1].u)) throw ConfigError("custom schedule times must increase");
    }
    for (const auto& p : points) {
      if (p.s < 0.0 || p.s > 1.0 || p.lambda < 0.0 || p.lambda > 1.0) {
        throw ConfigError("custom schedule controls must lie in [0, 1]");
      }
    }
    Schedule sch(ScheduleKind::ara_custom, tau);
    sch.points_ = std::move(points);
    return sch;
  }

  /// s(t) = s_min + (1 - s_min)(2t/tau - 1)^2 with lambda = 1.
  static Schedule ira_quadratic(double tau, double s_min) {
    if (!(s_min > 0.0) || s_min > 1.0) throw ConfigError("s_min must lie in (0, 1]");
    Schedule sch(ScheduleKind::ira_quadratic, tau);
    sch.s_min_ = s_min;
    return sch;
  }

  ScheduleKind kind() const { return kind_; }
  double tau() const { return tau_; }
  double s_min() const { return s_min_; }
  bool is_reversed() const { return reversed_; }
  const std::vector<ControlPoint>& points() const { return points_; }

  /// The same path traversed backwards in time, t -> tau - t.
  Schedule reversed() const {
    Schedule r = *this;
    r.reversed_ = !reversed_;
    return r;
  }

  Controls at(double t) const {
    double u = std::clamp(t / tau_, 0.0, 1.0);
    if (reversed_) u = 1.0 - u;
    switch (kind_) {
      case ScheduleKind::qa: return {u, 1.0};
      case ScheduleKind::ara_linear: return {u, u};
      case ScheduleKind::ira_quadratic: {
        const double x = 2.0 * u - 1.0;
        return {s_min_ + (1.0 - s_min_) * x * x, 1.0};
      }
      case ScheduleKind::ara_custom: {
        auto it = std::upper_bound(points_.begin(), points_.end(), u,
                                   [](double v, const ControlPoint& p) { return v < p.u; });
        if (it == points_.end()) return {points_.back().s, points_.back().lambda};
        const ControlPoint& hi = *it;
        const ControlPoint& lo = *(it - 1);
        const double w = (u - lo.u) / (hi.u - lo.u);
        return {lo.s + w * (hi.s - lo.s), lo.lambda + w * (hi.lambda - lo.lambda)};
      }
    }
    return {0.0, 0.0};
  }

 private:
  Schedule(ScheduleKind kind, double tau) : kind_(kind), tau_(tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive and finite");
  }

  ScheduleKind kind_;
  double tau_;
  double s_min_ = 1.0;
  bool reversed_ = false;
  std::vector<ControlPoint> points_;
};

}  // namespace revanneal
