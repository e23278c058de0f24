#include "bistab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bistab::config {

using nlohmann::json;

namespace {

void require_known_keys(const json& obj, const std::set<std::string>& known,
                        const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void get_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void get_vec2(const json& obj, const char* key, Eigen::Vector2d& out) {
  if (obj.contains(key)) {
    const auto v = obj.at(key).get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument(std::string("config: ") + key + " needs 2 values");
    out = Eigen::Vector2d(v[0], v[1]);
  }
}

void parse_gait(const json& obj, gait::GaitConfig& g) {
  require_known_keys(obj, {"stride_x", "stride_y", "step_duration", "swing_height", "com_height",
                           "n_steps"},
                     "gait");
  get_if(obj, "stride_x", g.stride_x);
  get_if(obj, "stride_y", g.stride_y);
  get_if(obj, "step_duration", g.step_duration);
  get_if(obj, "swing_height", g.swing_height);
  get_if(obj, "com_height", g.com_height);
  get_if(obj, "n_steps", g.n_steps);
}

void parse_control(const json& obj, control::ControlParams& c) {
  require_known_keys(obj,
                     {"k_phi", "k_zeta", "saturation", "rate_to_torque_kd", "torque_limit",
                      "min_step_time", "max_step_time", "foot_half_extents", "force_step_adjust"},
                     "control");
  Eigen::Vector2d k_phi = c.default_gains.k_phi;
  Eigen::Vector2d k_zeta = c.default_gains.k_zeta;
  get_vec2(obj, "k_phi", k_phi);
  get_vec2(obj, "k_zeta", k_zeta);
  c.default_gains = control::Gains(k_phi, k_zeta);
  if (obj.contains("saturation")) {
    const auto v = obj.at("saturation").get<std::vector<double>>();
    if (v.size() != 8) throw std::invalid_argument("config: saturation needs 8 values");
    control::Vec8 s;
    for (int i = 0; i < 8; ++i) s[i] = v[i];
    c.saturation = control::SaturationLimits(s);
  }
  get_if(obj, "rate_to_torque_kd", c.rate_to_torque_kd);
  get_if(obj, "torque_limit", c.torque_limit);
  get_if(obj, "min_step_time", c.min_step_time);
  get_if(obj, "max_step_time", c.max_step_time);
  get_vec2(obj, "foot_half_extents", c.foot_half_extents);
  get_if(obj, "force_step_adjust", c.force_step_adjust);
}

void parse_plant(const json& obj, plant::PlantParams& p) {
  require_known_keys(obj,
                     {"mass", "gravity", "flywheel_inertia", "flywheel_damping", "physics_dt",
                      "control_period", "height_omega", "min_pendulum_height",
                      "max_step_reach", "step_commit_fraction", "fall_height", "fall_tilt_deg",
                      "fall_com_distance"},
                     "plant");
  get_if(obj, "mass", p.mass);
  get_if(obj, "gravity", p.gravity);
  get_if(obj, "flywheel_inertia", p.flywheel_inertia);
  get_if(obj, "flywheel_damping", p.flywheel_damping);
  get_if(obj, "physics_dt", p.physics_dt);
  get_if(obj, "control_period", p.control_period);
  get_if(obj, "height_omega", p.height_omega);
  get_if(obj, "min_pendulum_height", p.min_pendulum_height);
  get_if(obj, "max_step_reach", p.max_step_reach);
  get_if(obj, "step_commit_fraction", p.step_commit_fraction);
  get_if(obj, "fall_height", p.fall_height);
  get_if(obj, "fall_tilt_deg", p.fall_tilt_deg);
  get_if(obj, "fall_com_distance", p.fall_com_distance);
}

void parse_scenario(const json& obj, plant::ScenarioSpec& s) {
  require_known_keys(obj,
                     {"kind", "terrain_amplitude", "pushes_enabled", "push_interval", "push_force",
                      "push_duration", "tilt_random_deg", "tilt_gain", "tilt_limit_deg",
                      "tilt_resample", "train_episode_cap", "eval_episode_cap"},
                     "scenario");
  if (obj.contains("kind")) s = plant::ScenarioSpec::preset(parse_scenario_kind(obj.at("kind")));
  get_if(obj, "terrain_amplitude", s.terrain_amplitude);
  get_if(obj, "pushes_enabled", s.pushes_enabled);
  get_vec2(obj, "push_interval", s.push_interval);
  get_vec2(obj, "push_force", s.push_force);
  get_if(obj, "push_duration", s.push_duration);
  get_if(obj, "tilt_random_deg", s.tilt_random_deg);
  get_if(obj, "tilt_gain", s.tilt_gain);
  get_if(obj, "tilt_limit_deg", s.tilt_limit_deg);
  get_if(obj, "tilt_resample", s.tilt_resample);
  get_if(obj, "train_episode_cap", s.train_episode_cap);
  get_if(obj, "eval_episode_cap", s.eval_episode_cap);
}

void parse_train(const json& obj, ppo::TrainConfig& t) {
  require_known_keys(obj,
                     {"batch_size", "minibatch_size", "epochs", "n_envs", "lr0", "clip", "gamma",
                      "lambda", "entropy_coef", "value_coef", "log_std_init", "total_steps",
                      "symmetry_ratio", "hidden", "checkpoint_every"},
                     "train");
  get_if(obj, "batch_size", t.batch_size);
  get_if(obj, "minibatch_size", t.minibatch_size);
  get_if(obj, "epochs", t.epochs);
  get_if(obj, "n_envs", t.n_envs);
  get_if(obj, "lr0", t.lr0);
  get_if(obj, "clip", t.clip);
  get_if(obj, "gamma", t.gamma);
  get_if(obj, "lambda", t.lam);
  get_if(obj, "entropy_coef", t.entropy_coef);
  get_if(obj, "value_coef", t.value_coef);
  get_if(obj, "log_std_init", t.log_std_init);
  get_if(obj, "total_steps", t.total_steps);
  if (obj.contains("symmetry_ratio")) {
    if (obj.at("symmetry_ratio").is_string())
      t.symmetry_ratio = parse_ratio(obj.at("symmetry_ratio").get<std::string>());
    else
      t.symmetry_ratio = obj.at("symmetry_ratio").get<double>();
  }
  get_if(obj, "hidden", t.hidden);
  get_if(obj, "checkpoint_every", t.checkpoint_every);
}

void parse_eval(const json& obj, EvalParams& e) {
  require_known_keys(obj,
                     {"episodes", "noise_episodes", "noise_episode_cap", "drift_duration",
                      "drift_sample_period", "radial_trials", "radial_threshold",
                      "radial_settle_time", "radial_observe_time", "radial_max_force"},
                     "eval");
  get_if(obj, "episodes", e.episodes);
  get_if(obj, "noise_episodes", e.noise_episodes);
  get_if(obj, "noise_episode_cap", e.noise_episode_cap);
  get_if(obj, "drift_duration", e.drift_duration);
  get_if(obj, "drift_sample_period", e.drift_sample_period);
  get_if(obj, "radial_trials", e.radial_trials);
  get_if(obj, "radial_threshold", e.radial_threshold);
  get_if(obj, "radial_settle_time", e.radial_settle_time);
  get_if(obj, "radial_observe_time", e.radial_observe_time);
  get_if(obj, "radial_max_force", e.radial_max_force);
}

void parse_mirror(const json& obj, symmetry::MirrorSpec& m) {
  require_known_keys(obj, {"obs_perm", "obs_sign", "act_perm", "act_sign"}, "mirror");
  if (obj.contains("obs_perm")) m.obs_perm = obj.at("obs_perm").get<std::vector<int>>();
  if (obj.contains("act_perm")) m.act_perm = obj.at("act_perm").get<std::vector<int>>();
  auto get_signs = [&](const char* key, Eigen::VectorXd& out) {
    if (!obj.contains(key)) return;
    const auto v = obj.at(key).get<std::vector<double>>();
    out.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  };
  get_signs("obs_sign", m.obs_sign);
  get_signs("act_sign", m.act_sign);
  m.validate();
}

}  // namespace

plant::ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "l1") return plant::ScenarioKind::l1_flat;
  if (name == "l2") return plant::ScenarioKind::l2_uneven;
  if (name == "t1") return plant::ScenarioKind::t1_tilt;
  throw std::invalid_argument("config: unknown scenario kind '" + name + "'");
}

std::string scenario_kind_name(plant::ScenarioKind kind) {
  switch (kind) {
    case plant::ScenarioKind::l1_flat: return "l1";
    case plant::ScenarioKind::l2_uneven: return "l2";
    case plant::ScenarioKind::t1_tilt: return "t1";
  }
  return "?";
}

double parse_ratio(const std::string& token) {
  if (token == "0") return 0.0;
  if (token == "1/8") return 0.125;
  if (token == "1/4") return 0.25;
  if (token == "1/2") return 0.5;
  if (token == "1" || token == "1/1") return 1.0;
  throw std::invalid_argument("ratio must be one of 0, 1/8, 1/4, 1/2, 1");
}

ExperimentConfig parse_config(const std::string& text) {
  json root = json::parse(text);
  require_known_keys(root, {"gait", "control", "plant", "scenario", "train", "eval", "mirror"},
                     "top level");
  ExperimentConfig cfg;
  if (root.contains("gait")) parse_gait(root.at("gait"), cfg.gait);
  if (root.contains("control")) parse_control(root.at("control"), cfg.control);
  if (root.contains("plant")) parse_plant(root.at("plant"), cfg.plant);
  if (root.contains("scenario")) parse_scenario(root.at("scenario"), cfg.scenario);
  if (root.contains("train")) parse_train(root.at("train"), cfg.train);
  if (root.contains("eval")) parse_eval(root.at("eval"), cfg.eval);
  if (root.contains("mirror")) parse_mirror(root.at("mirror"), cfg.mirror);

  cfg.gait.validate();
  cfg.scenario.validate();
  cfg.train.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_json(const ExperimentConfig& cfg) {
  json root;
  root["gait"] = {{"stride_x", cfg.gait.stride_x},
                  {"stride_y", cfg.gait.stride_y},
                  {"step_duration", cfg.gait.step_duration},
                  {"swing_height", cfg.gait.swing_height},
                  {"com_height", cfg.gait.com_height},
                  {"n_steps", cfg.gait.n_steps}};
  root["control"] = {
      {"k_phi", {cfg.control.default_gains.k_phi.x(), cfg.control.default_gains.k_phi.y()}},
      {"k_zeta", {cfg.control.default_gains.k_zeta.x(), cfg.control.default_gains.k_zeta.y()}},
      {"saturation", std::vector<double>(cfg.control.saturation.s.data(),
                                         cfg.control.saturation.s.data() + 8)},
      {"rate_to_torque_kd", cfg.control.rate_to_torque_kd},
      {"torque_limit", cfg.control.torque_limit},
      {"min_step_time", cfg.control.min_step_time},
      {"max_step_time", cfg.control.max_step_time},
      {"foot_half_extents", {cfg.control.foot_half_extents.x(), cfg.control.foot_half_extents.y()}},
      {"force_step_adjust", cfg.control.force_step_adjust}};
  root["plant"] = {{"mass", cfg.plant.mass},
                   {"gravity", cfg.plant.gravity},
                   {"flywheel_inertia", cfg.plant.flywheel_inertia},
                   {"flywheel_damping", cfg.plant.flywheel_damping},
                   {"physics_dt", cfg.plant.physics_dt},
                   {"control_period", cfg.plant.control_period},
                   {"height_omega", cfg.plant.height_omega},
                   {"min_pendulum_height", cfg.plant.min_pendulum_height},
                   {"max_step_reach", cfg.plant.max_step_reach},
                   {"step_commit_fraction", cfg.plant.step_commit_fraction},
                   {"fall_height", cfg.plant.fall_height},
                   {"fall_tilt_deg", cfg.plant.fall_tilt_deg},
                   {"fall_com_distance", cfg.plant.fall_com_distance}};
  root["scenario"] = {{"kind", scenario_kind_name(cfg.scenario.kind)},
                      {"terrain_amplitude", cfg.scenario.terrain_amplitude},
                      {"pushes_enabled", cfg.scenario.pushes_enabled},
                      {"push_interval", {cfg.scenario.push_interval.x(), cfg.scenario.push_interval.y()}},
                      {"push_force", {cfg.scenario.push_force.x(), cfg.scenario.push_force.y()}},
                      {"push_duration", cfg.scenario.push_duration},
                      {"tilt_random_deg", cfg.scenario.tilt_random_deg},
                      {"tilt_gain", cfg.scenario.tilt_gain},
                      {"tilt_limit_deg", cfg.scenario.tilt_limit_deg},
                      {"tilt_resample", cfg.scenario.tilt_resample},
                      {"train_episode_cap", cfg.scenario.train_episode_cap},
                      {"eval_episode_cap", cfg.scenario.eval_episode_cap}};
  root["train"] = {{"batch_size", cfg.train.batch_size},
                   {"minibatch_size", cfg.train.minibatch_size},
                   {"epochs", cfg.train.epochs},
                   {"n_envs", cfg.train.n_envs},
                   {"lr0", cfg.train.lr0},
                   {"clip", cfg.train.clip},
                   {"gamma", cfg.train.gamma},
                   {"lambda", cfg.train.lam},
                   {"entropy_coef", cfg.train.entropy_coef},
                   {"value_coef", cfg.train.value_coef},
                   {"log_std_init", cfg.train.log_std_init},
                   {"total_steps", cfg.train.total_steps},
                   {"symmetry_ratio", cfg.train.symmetry_ratio},
                   {"hidden", cfg.train.hidden},
                   {"checkpoint_every", cfg.train.checkpoint_every}};
  root["eval"] = {{"episodes", cfg.eval.episodes},
                  {"noise_episodes", cfg.eval.noise_episodes},
                  {"noise_episode_cap", cfg.eval.noise_episode_cap},
                  {"drift_duration", cfg.eval.drift_duration},
                  {"drift_sample_period", cfg.eval.drift_sample_period},
                  {"radial_trials", cfg.eval.radial_trials},
                  {"radial_threshold", cfg.eval.radial_threshold},
                  {"radial_settle_time", cfg.eval.radial_settle_time},
                  {"radial_observe_time", cfg.eval.radial_observe_time},
                  {"radial_max_force", cfg.eval.radial_max_force}};
  root["mirror"] = {{"obs_perm", cfg.mirror.obs_perm},
                    {"obs_sign", std::vector<double>(cfg.mirror.obs_sign.data(),
                                                     cfg.mirror.obs_sign.data() + cfg.mirror.obs_sign.size())},
                    {"act_perm", cfg.mirror.act_perm},
                    {"act_sign", std::vector<double>(cfg.mirror.act_sign.data(),
                                                     cfg.mirror.act_sign.data() + cfg.mirror.act_sign.size())}};
  return root.dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_json(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

env::Environment::Options make_env_options(const ExperimentConfig& cfg, bool eval_mode,
                                           double obs_noise) {
  env::Environment::Options opt;
  opt.gait = cfg.gait;
  opt.scenario = cfg.scenario;
  opt.control = cfg.control;
  opt.plant = cfg.plant;
  opt.eval_mode = eval_mode;
  opt.obs_noise = obs_noise;
  return opt;
}

}  // namespace bistab::config
