#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bistab/lip.hpp"

namespace bistab::gait {

enum class Side { left, right };

inline double side_sign(Side s) { return s == Side::left ? 1.0 : -1.0; }
inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

struct GaitConfig {
  double stride_x = 0.0;       // forward advance per step (m); 0 walks in place
  double stride_y = 0.2;       // lateral separation between foot centers (m)
  double step_duration = 0.5;  // T (s)
  double swing_height = 0.04;  // z_max (m)
  double com_height = 0.6;     // c_z (m)
  int n_steps = 4;             // planning horizon

  void validate() const {
    if (!(step_duration > 0)) throw std::invalid_argument("GaitConfig: step_duration must be > 0");
    if (swing_height < 0) throw std::invalid_argument("GaitConfig: swing_height must be >= 0");
    if (!(com_height > 0)) throw std::invalid_argument("GaitConfig: com_height must be > 0");
    if (!(stride_y > 0)) throw std::invalid_argument("GaitConfig: stride_y must be > 0");
  }
};

struct Footstep {
  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
  Side side = Side::left;
  double t_0 = 0.0;
  double t_f = 0.0;
};

/// Footstep chain anchored on the current support foot. Step k lands the
/// swing foot stride_x ahead of the previous support and on the opposite
/// lateral offset, so the gait recenters wherever the support foot is.
std::vector<Footstep> footsteps_from_anchor(const GaitConfig& cfg, const Eigen::Vector2d& support,
                                            Side support_side, int n_steps,
                                            const std::optional<Eigen::Vector2d>& first_landing =
                                                std::nullopt);

/// Footstep plan from the current feet configuration.
std::vector<Footstep> plan_footsteps(const GaitConfig& cfg, const Eigen::Vector2d& left_foot,
                                     const Eigen::Vector2d& right_foot,
                                     Side first_swing = Side::left);

/// Assigns step k the window [t_start + k*T, t_start + (k+1)*T).
void assign_step_times(std::vector<Footstep>& steps, double T, double t_start = 0.0);

/// Swing foot position at time t. x,y follow a cubic with zero boundary
/// velocity; z adds a two-cubic bump that peaks z_max above the endpoint
/// mean at the midpoint.
Eigen::Vector3d swing_trajectory(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                                 double z_max, double t_0, double t_f, double t);

/// One COM boundary-value segment (Eq. of motion solved over [t_0, t_f] with
/// the support point fixed at `support`).
struct ComSegment {
  Eigen::Vector2d support;
  Eigen::Vector2d c_0;
  Eigen::Vector2d c_f;
  double t_0;
  double t_f;
};

/// Piecewise closed-form COM reference. Evaluation clamps t into the total
/// time range; segment interiors are analytic.
class ComTrajectory {
 public:
  ComTrajectory(std::vector<ComSegment> segments, double omega);

  Eigen::Vector2d position(double t) const;
  Eigen::Vector2d velocity(double t) const;
  const ComSegment& segment_at(double t) const;

  double t_start() const { return segments_.front().t_0; }
  double t_end() const { return segments_.back().t_f; }
  double omega() const { return omega_; }
  const std::vector<ComSegment>& segments() const { return segments_; }

 private:
  std::vector<ComSegment> segments_;
  double omega_;
};

/// COM reference over a footstep plan. The first segment starts at c_start;
/// each segment ends at the midpoint of consecutive supports, except the
/// last, which ends on the final footstep.
ComTrajectory plan_com(const std::vector<Footstep>& footsteps, const GaitConfig& cfg,
                       const Eigen::Vector2d& support0, const lip::ComState& c_start);

/// DCM reference derived analytically from a COM reference.
class DcmTrajectory {
 public:
  DcmTrajectory(ComTrajectory com, double omega) : com_(std::move(com)), omega_(omega) {}

  Eigen::Vector2d position(double t) const;  // zeta_d = c + c_dot / omega
  Eigen::Vector2d velocity(double t) const;  // zeta_d_dot = omega * (zeta_d - support)

 private:
  ComTrajectory com_;
  double omega_;
};

inline DcmTrajectory plan_dcm(const ComTrajectory& com, double omega) {
  return DcmTrajectory(com, omega);
}

/// Everything the tracking controller needs for one planning horizon.
/// Immutable value; rebuilt whenever the step landing target or commanded
/// step duration changes.
class GaitPlan {
 public:
  struct Anchor {
    Eigen::Vector3d support_pos = Eigen::Vector3d::Zero();
    Side support_side = Side::right;
    Eigen::Vector3d swing_pos = Eigen::Vector3d::Zero();  // liftoff position
    Eigen::Vector2d com_start = Eigen::Vector2d::Zero();  // committed c_0
    double t_start = 0.0;
    std::optional<Eigen::Vector2d> landing_override;  // replaces footstep 0
    std::optional<double> duration_override;          // commanded T for step 0
  };

  GaitPlan(const GaitConfig& cfg, const Anchor& anchor);

  Eigen::Vector2d com_ref(double t) const { return com_.position(t); }
  Eigen::Vector2d com_ref_dot(double t) const { return com_.velocity(t); }
  Eigen::Vector2d dcm_ref(double t) const { return dcm_.position(t); }
  Eigen::Vector2d dcm_ref_dot(double t) const { return dcm_.velocity(t); }
  Eigen::Vector3d swing_ref(double t) const;

  const std::vector<Footstep>& footsteps() const { return footsteps_; }
  const Footstep& next_footstep() const { return footsteps_.front(); }
  const ComTrajectory& com_trajectory() const { return com_; }

  double omega() const { return com_.omega(); }
  double com_height() const { return cfg_.com_height; }
  double nominal_step_duration() const { return cfg_.step_duration; }
  double current_step_duration() const { return footsteps_.front().t_f - footsteps_.front().t_0; }
  double t_start() const { return com_.t_start(); }
  double t_end() const { return com_.t_end(); }
  const Anchor& anchor() const { return anchor_; }

 private:
  GaitConfig cfg_;
  Anchor anchor_;
  std::vector<Footstep> footsteps_;
  ComTrajectory com_;
  DcmTrajectory dcm_;
};

}  // namespace bistab::gait
