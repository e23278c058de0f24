#include "bistab/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bistab::checkpoint {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'B', 'S', 'C', 'K'};

template <class T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void write_doubles(std::ostream& os, const double* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& is, double* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
}

void write_mlp(std::ostream& os, const mlp::MlpParams& p) {
  auto refs = mlp::tensor_refs(const_cast<mlp::MlpParams&>(p));
  for (const auto& r : refs) write_doubles(os, r.value, static_cast<std::size_t>(r.size));
}

void read_mlp(std::istream& is, mlp::MlpParams& p) {
  auto refs = mlp::tensor_refs(p);
  for (auto& r : refs) read_doubles(is, r.value, static_cast<std::size_t>(r.size));
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path.string());

  os.write(kMagic, 4);
  write_pod(os, kFormatVersion);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.params.obs_dim));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.params.act_dim));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.params.hidden));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.params.n_residuals));
  write_pod<std::uint64_t>(os, ckpt.seed);
  write_pod<std::int64_t>(os, ckpt.env_steps);

  write_doubles(os, ckpt.params.bounds.center.data(), ckpt.params.bounds.center.size());
  write_doubles(os, ckpt.params.bounds.half_range.data(), ckpt.params.bounds.half_range.size());
  write_mlp(os, ckpt.params.actor);
  write_doubles(os, ckpt.params.log_std.data(), ckpt.params.log_std.size());
  write_mlp(os, ckpt.params.critic);

  write_pod<std::uint64_t>(os, ckpt.stats.count());
  write_doubles(os, ckpt.stats.sum().data(), ckpt.stats.sum().size());
  write_doubles(os, ckpt.stats.sumsq().data(), ckpt.stats.sumsq().size());

  if (!os) throw std::runtime_error("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open: " + path.string());

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic bytes");
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kFormatVersion) throw std::runtime_error("checkpoint: unsupported version");

  const int obs_dim = static_cast<int>(read_pod<std::uint32_t>(is));
  const int act_dim = static_cast<int>(read_pod<std::uint32_t>(is));
  const int hidden = static_cast<int>(read_pod<std::uint32_t>(is));
  const int n_residuals = static_cast<int>(read_pod<std::uint32_t>(is));

  Checkpoint ckpt;
  ckpt.seed = read_pod<std::uint64_t>(is);
  ckpt.env_steps = read_pod<std::int64_t>(is);

  ckpt.params.obs_dim = obs_dim;
  ckpt.params.act_dim = act_dim;
  ckpt.params.hidden = hidden;
  ckpt.params.n_residuals = n_residuals;
  ckpt.params.bounds.center.resize(act_dim);
  ckpt.params.bounds.half_range.resize(act_dim);
  read_doubles(is, ckpt.params.bounds.center.data(), act_dim);
  read_doubles(is, ckpt.params.bounds.half_range.data(), act_dim);

  Rng dummy(0);
  ckpt.params.actor = mlp::MlpParams::init(obs_dim, hidden, hidden, act_dim, dummy);
  ckpt.params.critic = mlp::MlpParams::init(obs_dim, hidden, hidden, 1, dummy);
  read_mlp(is, ckpt.params.actor);
  ckpt.params.log_std.resize(act_dim);
  read_doubles(is, ckpt.params.log_std.data(), act_dim);
  read_mlp(is, ckpt.params.critic);

  const auto count = read_pod<std::uint64_t>(is);
  Eigen::VectorXd sum(obs_dim), sumsq(obs_dim);
  read_doubles(is, sum.data(), obs_dim);
  read_doubles(is, sumsq.data(), obs_dim);
  ckpt.stats = symmetry::SharedNormStats(obs_dim);
  ckpt.stats.restore(count, sum, sumsq);
  return ckpt;
}

Checkpoint load_checkpoint_checked(const std::filesystem::path& path, int obs_dim, int act_dim) {
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.params.obs_dim != obs_dim || ckpt.params.act_dim != act_dim)
    throw std::runtime_error("checkpoint: dimension table does not match this configuration");
  return ckpt;
}

}  // namespace bistab::checkpoint
