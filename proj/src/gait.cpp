#include "bistab/gait.hpp"

#include <algorithm>
#include <cmath>

namespace bistab::gait {

std::vector<Footstep> footsteps_from_anchor(const GaitConfig& cfg, const Eigen::Vector2d& support,
                                            Side support_side, int n_steps,
                                            const std::optional<Eigen::Vector2d>& first_landing) {
  cfg.validate();
  if (n_steps <= 0) throw std::invalid_argument("footsteps_from_anchor: empty plan");

  std::vector<Footstep> steps;
  steps.reserve(n_steps);
  Eigen::Vector2d prev = support;
  Side side = support_side;
  for (int k = 0; k < n_steps; ++k) {
    side = opposite(side);
    Footstep fs;
    if (k == 0 && first_landing) {
      fs.pos = *first_landing;
    } else {
      fs.pos = prev + Eigen::Vector2d(cfg.stride_x, side_sign(side) * cfg.stride_y);
    }
    fs.side = side;
    steps.push_back(fs);
    prev = fs.pos;
  }
  return steps;
}

std::vector<Footstep> plan_footsteps(const GaitConfig& cfg, const Eigen::Vector2d& left_foot,
                                     const Eigen::Vector2d& right_foot, Side first_swing) {
  if ((left_foot - right_foot).norm() == 0.0)
    throw std::invalid_argument("plan_footsteps: feet must be distinct");
  const Side support_side = opposite(first_swing);
  const Eigen::Vector2d support = support_side == Side::left ? left_foot : right_foot;
  auto steps = footsteps_from_anchor(cfg, support, support_side, cfg.n_steps);
  assign_step_times(steps, cfg.step_duration);
  return steps;
}

void assign_step_times(std::vector<Footstep>& steps, double T, double t_start) {
  if (!(T > 0)) throw std::domain_error("assign_step_times: T must be > 0");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    steps[k].t_0 = t_start + static_cast<double>(k) * T;
    steps[k].t_f = t_start + static_cast<double>(k + 1) * T;
  }
}

namespace {

// Cubic with zero velocity at both ends, 0 -> 1.
double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

std::vector<Footstep> build_plan_footsteps(const GaitConfig& cfg, const GaitPlan::Anchor& anchor) {
  auto steps = footsteps_from_anchor(cfg, anchor.support_pos.head<2>(), anchor.support_side,
                                     cfg.n_steps, anchor.landing_override);
  // Step 0 may run under a learner-commanded duration; later steps are nominal.
  double t = anchor.t_start;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double dur = k == 0 ? anchor.duration_override.value_or(cfg.step_duration)
                              : cfg.step_duration;
    steps[k].t_0 = t;
    steps[k].t_f = t + dur;
    t += dur;
  }
  return steps;
}

}  // namespace

Eigen::Vector3d swing_trajectory(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                                 double z_max, double t_0, double t_f, double t) {
  if (!(t_f > t_0)) throw std::domain_error("swing_trajectory: t_f must exceed t_0");
  if (t < t_0 || t > t_f) throw std::out_of_range("swing_trajectory: t outside [t_0, t_f]");
  const double s = (t - t_0) / (t_f - t_0);
  const double h = smoothstep(s);

  Eigen::Vector3d out = from + (to - from) * h;
  // Lift bump: two cubics meeting with zero velocity at the apex.
  const double bump = s < 0.5 ? smoothstep(2.0 * s) : smoothstep(2.0 * (1.0 - s));
  out.z() = from.z() + (to.z() - from.z()) * h + z_max * bump;
  return out;
}

ComTrajectory::ComTrajectory(std::vector<ComSegment> segments, double omega)
    : segments_(std::move(segments)), omega_(omega) {
  if (segments_.empty()) throw std::invalid_argument("ComTrajectory: no segments");
}

const ComSegment& ComTrajectory::segment_at(double t) const {
  for (const auto& seg : segments_) {
    if (t < seg.t_f) return seg;
  }
  return segments_.back();
}

Eigen::Vector2d ComTrajectory::position(double t) const {
  const ComSegment& seg = segment_at(t);
  const double tc = std::clamp(t, seg.t_0, seg.t_f);
  return lip::com_closed_form<double>(seg.support, seg.c_0, seg.c_f, seg.t_0, seg.t_f, omega_, tc);
}

Eigen::Vector2d ComTrajectory::velocity(double t) const {
  const ComSegment& seg = segment_at(t);
  const double tc = std::clamp(t, seg.t_0, seg.t_f);
  return lip::com_closed_form_vel<double>(seg.support, seg.c_0, seg.c_f, seg.t_0, seg.t_f, omega_,
                                          tc);
}

ComTrajectory plan_com(const std::vector<Footstep>& footsteps, const GaitConfig& cfg,
                       const Eigen::Vector2d& support0, const lip::ComState& c_start) {
  if (footsteps.empty()) throw std::invalid_argument("plan_com: empty footstep plan");
  const double omega = lip::natural_frequency(9.81, cfg.com_height);

  std::vector<ComSegment> segments;
  segments.reserve(footsteps.size());
  Eigen::Vector2d support = support0;
  Eigen::Vector2d c_0 = c_start.c;
  for (std::size_t k = 0; k < footsteps.size(); ++k) {
    ComSegment seg;
    seg.support = support;
    seg.c_0 = c_0;
    const bool last = k + 1 == footsteps.size();
    seg.c_f = last ? footsteps[k].pos : Eigen::Vector2d(0.5 * (support + footsteps[k].pos));
    seg.t_0 = footsteps[k].t_0;
    seg.t_f = footsteps[k].t_f;
    segments.push_back(seg);

    support = footsteps[k].pos;
    c_0 = seg.c_f;
  }
  return ComTrajectory(std::move(segments), omega);
}

Eigen::Vector2d DcmTrajectory::position(double t) const {
  return lip::dcm_of<double>(com_.position(t), com_.velocity(t), omega_);
}

Eigen::Vector2d DcmTrajectory::velocity(double t) const {
  // Within a segment the implied ZMP is the support point, so the DCM obeys
  // zeta_dot = omega * (zeta - support) exactly.
  return omega_ * (position(t) - com_.segment_at(t).support);
}

GaitPlan::GaitPlan(const GaitConfig& cfg, const Anchor& anchor)
    : cfg_(cfg),
      anchor_(anchor),
      footsteps_(build_plan_footsteps(cfg, anchor)),
      com_(plan_com(footsteps_, cfg, anchor.support_pos.head<2>(),
                    lip::ComState{anchor.com_start, Eigen::Vector2d::Zero()})),
      dcm_(plan_dcm(com_, com_.omega())) {}

Eigen::Vector3d GaitPlan::swing_ref(double t) const {
  // Locate the step containing t; the swing foot of step k lifted off from
  // the support of step k-1's opposite side.
  std::size_t k = 0;
  while (k + 1 < footsteps_.size() && t >= footsteps_[k].t_f) ++k;
  const Footstep& fs = footsteps_[k];
  Eigen::Vector3d from;
  if (k == 0) {
    from = anchor_.swing_pos;
  } else if (k == 1) {
    from = anchor_.support_pos;
  } else {
    from = Eigen::Vector3d(footsteps_[k - 2].pos.x(), footsteps_[k - 2].pos.y(), 0.0);
  }
  const Eigen::Vector3d to(fs.pos.x(), fs.pos.y(), 0.0);
  const double tc = std::clamp(t, fs.t_0, fs.t_f);
  return swing_trajectory(from, to, cfg_.swing_height, fs.t_0, fs.t_f, tc);
}

}  // namespace bistab::gait
