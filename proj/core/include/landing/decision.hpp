#pragma once

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "landing/camera.hpp"
#include "landing/plz.hpp"
#include "landing/tracking.hpp"

namespace landing::decision {

enum class LandingPhase { Scan, Approach, Hold, Descend, Landed, Abort };

std::string_view to_string(LandingPhase p);
std::optional<LandingPhase> phase_from_string(std::string_view s);

/// Staying in a phase is always legal. Otherwise: Scan->Approach,
/// Approach->{Hold, Descend}, Hold->{Approach, Descend}, Descend->{Hold, Landed},
/// and Abort from any non-terminal phase.
bool is_legal_transition(LandingPhase from, LandingPhase to);

struct IllegalTransition : std::logic_error {
  IllegalTransition(LandingPhase from, LandingPhase to);
};

/// Returns `to`, or throws IllegalTransition.
LandingPhase transition(LandingPhase from, LandingPhase to);

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;
  double altitude_m = 0.0;

  Vec2 ground() const { return {x_m, y_m}; }
  bool operator==(const Position&) const = default;
};

struct DroneState {
  Position position;
  double cruise_speed_mps = 2.0;
  double descent_speed_mps = 1.0;
  LandingPhase phase = LandingPhase::Scan;

  void validate() const;
  bool operator==(const DroneState&) const = default;
};

/// T_d = horizontal / cruise + altitude / descent. The horizontal leg is the
/// zone's pixel offset from the principal point scaled by altitude / focal.
double drone_eta(const DroneState& drone, const plz::PLZ& zone, const CameraModel& cam);

/// Same ETA with the horizontal leg measured to a known ground point.
double drone_eta_to(const DroneState& drone, Vec2 target_m);

/// Absolute: |T_x - T_d| (default). Signed: T_x - T_d, so only objects
/// arriving after the drone give margin.
enum class MarginRule { Absolute, Signed };

enum class Clearance { Cleared, Wait };
std::string_view to_string(Clearance c);

inline constexpr double kNoObjectMargin = std::numeric_limits<double>::infinity();

struct ClearanceVerdict {
  int plz_id = 0;
  Clearance status = Clearance::Cleared;
  /// Smallest margin over moving objects; +infinity when there are none.
  double margin_seconds = kNoObjectMargin;
  std::optional<int> blocking_object;
};

/// Cleared iff every moving object has margin > margin_s and no static
/// object sits inside the zone. A static occupant blocks with margin 0.
ClearanceVerdict clearance_decision(int plz_id, std::span<const tracking::ReachEstimate> reaches, double t_d,
                                    double margin_s = 20.0, MarginRule rule = MarginRule::Absolute);

/// Among cleared zones: smallest ETA, then larger area, then lower id.
/// Verdicts are matched to zones by plz_id.
std::optional<plz::PLZ> select_plz(std::span<const ClearanceVerdict> verdicts, std::span<const plz::PLZ> zones,
                                   const DroneState& drone, const CameraModel& cam);

struct DecisionConfig {
  double margin_s = 20.0;
  MarginRule rule = MarginRule::Absolute;
  /// Fraction of cruise speed flown while holding.
  double slow_factor = 0.25;
  /// Below this altitude a Wait verdict no longer interrupts a descent.
  double descent_hold_floor_m = 3.0;
};

struct PhaseCommand {
  LandingPhase phase = LandingPhase::Scan;
  /// Horizontal speed for Scan/Approach/Hold, vertical speed for Descend.
  double speed_mps = 0.0;
};

/// Advances the mission phase for one frame given the verdict for the target
/// zone. `arrived` tells whether the drone is already above the target.
PhaseCommand step_phase(const DroneState& drone, const ClearanceVerdict& verdict, bool arrived,
                        const DecisionConfig& config = {});

}  // namespace landing::decision
