#pragma once

#include <cstdint>
#include <filesystem>

#include "bistab/policy.hpp"
#include "bistab/symmetry.hpp"

namespace bistab::checkpoint {

/// Policy snapshot with everything needed to act deterministically:
/// parameters, action bounds, and the shared observation statistics.
/// Byte layout is documented in docs/checkpoint-format.md; load(save(x))
/// is bit-exact.
struct Checkpoint {
  policy::PolicyParams params;
  symmetry::SharedNormStats stats{1};
  std::uint64_t seed = 0;
  std::int64_t env_steps = 0;
};

inline constexpr std::uint32_t kFormatVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Loads and verifies the dimension table against the expected layout.
Checkpoint load_checkpoint_checked(const std::filesystem::path& path, int obs_dim, int act_dim);

}  // namespace bistab::checkpoint
