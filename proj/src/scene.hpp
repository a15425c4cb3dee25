#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace certicd {

// A configuration is a point in [0,1]^d.
using Config = std::vector<double>;

struct Box {
  std::vector<double> lo, hi;
};

struct WorkspaceDisc {
  double x, y, r;
};

struct Probe {
  int label;         // +1 forbidden, -1 free
  double clearance;  // distance to the nearest opposite-label point
};

// Exact C-space oracle. Immutable after construction; all queries are
// read-only and thread-safe.
class Scene {
 public:
  enum class Kind { Disc, BoxUnion, TwoLink };

  static Scene disc(Config center, double radius);
  static Scene box_union(int dimension, std::vector<Box> boxes);
  static Scene two_link(std::array<double, 2> link_lengths, std::vector<WorkspaceDisc> obstacles,
                        int grid_resolution = 1024);

  static Scene parse(std::string_view text);
  static Scene from_file(const std::string& path);

  Kind kind() const { return kind_; }
  int dimension() const { return d_; }

  // +1 iff x collides. Forbidden regions are closed, so boundary points
  // label +1.
  int label(std::span<const double> x) const;

  // Distance to the nearest opposite-label point. Exact for disc and
  // box-union; for two-link it is the nearest opposite-label cell-center
  // distance on the precomputed clearance grid.
  double clearance(std::span<const double> x) const;

  // One oracle call answering both label and clearance.
  Probe probe(std::span<const double> x) const;

  // m i.i.d. uniform samples from [0,1]^d, deterministic per seed.
  std::vector<Config> sample_uniform(long long m, std::uint64_t seed) const;

  // Canonical single-line description, used for provenance.
  const std::string& id() const { return id_; }

 private:
  Scene() = default;
  void check_config(std::span<const double> x) const;
  void build_two_link_grid();
  bool two_link_collides(double x0, double x1) const;

  Kind kind_ = Kind::Disc;
  int d_ = 0;
  std::string id_;

  // disc
  Config center_;
  double radius_ = 0;

  // box-union
  std::vector<Box> boxes_;       // forbidden
  std::vector<Box> free_boxes_;  // decomposition of [0,1]^d minus boxes_

  // two-link
  std::array<double, 2> lengths_{0, 0};
  std::vector<WorkspaceDisc> obstacles_;
  int grid_res_ = 1024;
  std::vector<std::uint8_t> grid_labels_;        // 1 = forbidden
  std::vector<float> grid_dist_to_forb_;         // from cell centers
  std::vector<float> grid_dist_to_free_;
};

}  // namespace certicd
