#include "landing/decision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace landing::decision {

namespace {

constexpr std::array<std::string_view, 6> kPhaseNames{"Scan", "Approach", "Hold", "Descend", "Landed", "Abort"};

}  // namespace

std::string_view to_string(LandingPhase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

std::optional<LandingPhase> phase_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == s) return static_cast<LandingPhase>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Clearance c) { return c == Clearance::Cleared ? "Cleared" : "Wait"; }

bool is_legal_transition(LandingPhase from, LandingPhase to) {
  using P = LandingPhase;
  if (from == to) return true;
  if (from == P::Landed || from == P::Abort) return false;
  if (to == P::Abort) return true;
  switch (from) {
    case P::Scan:
      return to == P::Approach;
    case P::Approach:
      return to == P::Hold || to == P::Descend;
    case P::Hold:
      return to == P::Approach || to == P::Descend;
    case P::Descend:
      return to == P::Hold || to == P::Landed;
    default:
      return false;
  }
}

IllegalTransition::IllegalTransition(LandingPhase from, LandingPhase to)
    : std::logic_error("illegal landing phase transition " + std::string(to_string(from)) + " -> " +
                       std::string(to_string(to))) {}

LandingPhase transition(LandingPhase from, LandingPhase to) {
  if (!is_legal_transition(from, to)) throw IllegalTransition(from, to);
  return to;
}

void DroneState::validate() const {
  if (position.altitude_m < 0.0) throw std::invalid_argument("drone altitude must be non-negative");
  if (!(cruise_speed_mps > 0.0) || !(descent_speed_mps > 0.0)) {
    throw std::invalid_argument("drone speeds must be positive");
  }
}

double drone_eta(const DroneState& drone, const plz::PLZ& zone, const CameraModel& cam) {
  drone.validate();
  const PointPx offset = zone.center_px - cam.principal_point();
  const double horizontal_m = plz::px_to_meters(offset.norm(), cam);
  return horizontal_m / drone.cruise_speed_mps + drone.position.altitude_m / drone.descent_speed_mps;
}

double drone_eta_to(const DroneState& drone, Vec2 target_m) {
  drone.validate();
  const double horizontal_m = distance(drone.position.ground(), target_m);
  return horizontal_m / drone.cruise_speed_mps + drone.position.altitude_m / drone.descent_speed_mps;
}

ClearanceVerdict clearance_decision(int plz_id, std::span<const tracking::ReachEstimate> reaches, double t_d,
                                    double margin_s, MarginRule rule) {
  if (!(margin_s > 0.0)) throw std::invalid_argument("clearance margin must be positive");
  ClearanceVerdict v;
  v.plz_id = plz_id;
  bool blocked_by_static = false;
  for (const tracking::ReachEstimate& r : reaches) {
    if (r.static_object) {
      if (r.inside_zone && !blocked_by_static) {
        blocked_by_static = true;
        v.margin_seconds = 0.0;
        v.blocking_object = r.object_id;
      }
      continue;
    }
    if (blocked_by_static || !r.t_x_seconds) continue;
    const double diff = *r.t_x_seconds - t_d;
    const double m = rule == MarginRule::Absolute ? std::abs(diff) : diff;
    if (m < v.margin_seconds) {
      v.margin_seconds = m;
      v.blocking_object = r.object_id;
    }
  }
  v.status = (!blocked_by_static && v.margin_seconds > margin_s) ? Clearance::Cleared : Clearance::Wait;
  if (v.status == Clearance::Cleared) v.blocking_object.reset();
  return v;
}

std::optional<plz::PLZ> select_plz(std::span<const ClearanceVerdict> verdicts, std::span<const plz::PLZ> zones,
                                   const DroneState& drone, const CameraModel& cam) {
  std::optional<plz::PLZ> best;
  double best_eta = 0.0;
  for (const plz::PLZ& z : zones) {
    const auto v = std::find_if(verdicts.begin(), verdicts.end(), [&](const ClearanceVerdict& c) {
      return c.plz_id == z.id;
    });
    if (v == verdicts.end() || v->status != Clearance::Cleared) continue;
    const double eta = drone_eta(drone, z, cam);
    const bool better = !best || eta < best_eta ||
                        (eta == best_eta && (z.area_m2 > best->area_m2 ||
                                             (z.area_m2 == best->area_m2 && z.id < best->id)));
    if (better) {
      best = z;
      best_eta = eta;
    }
  }
  return best;
}

PhaseCommand step_phase(const DroneState& drone, const ClearanceVerdict& verdict, bool arrived,
                        const DecisionConfig& config) {
  using P = LandingPhase;
  const bool cleared = verdict.status == Clearance::Cleared;
  const double cruise = drone.cruise_speed_mps;
  const double slow = config.slow_factor * cruise;
  P next = drone.phase;
  double speed = 0.0;

  switch (drone.phase) {
    case P::Scan:
      next = cleared ? P::Approach : P::Scan;
      speed = cleared ? cruise : 0.0;
      break;
    case P::Approach:
    case P::Hold:
      if (!cleared) {
        next = P::Hold;
        speed = arrived ? 0.0 : slow;
      } else if (arrived) {
        next = P::Descend;
        speed = drone.descent_speed_mps;
      } else {
        next = P::Approach;
        speed = cruise;
      }
      break;
    case P::Descend:
      if (!cleared && drone.position.altitude_m > config.descent_hold_floor_m) {
        next = P::Hold;
        speed = 0.0;
      } else {
        speed = drone.descent_speed_mps;
      }
      break;
    case P::Landed:
    case P::Abort:
      break;
  }
  return {transition(drone.phase, next), speed};
}

}  // namespace landing::decision
