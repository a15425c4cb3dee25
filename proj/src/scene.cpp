#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rng.hpp"

namespace certicd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double v) { return v * v; }

double dist_point_box(std::span<const double> x, const Box& b) {
  double s = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double gap = std::max({b.lo[j] - x[j], x[j] - b.hi[j], 0.0});
    s += gap * gap;
  }
  return std::sqrt(s);
}

bool point_in_box(std::span<const double> x, const Box& b) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < b.lo[j] || x[j] > b.hi[j]) return false;
  return true;
}

bool positive_volume(const Box& b) {
  for (std::size_t j = 0; j < b.lo.size(); ++j)
    if (b.hi[j] <= b.lo[j]) return false;
  return true;
}

// Pieces of `region` outside `cut`, interior-disjoint, degenerate slabs
// dropped.
void subtract_box(const Box& region, const Box& cut, std::vector<Box>& out) {
  Box inter{region.lo, region.hi};
  for (std::size_t j = 0; j < region.lo.size(); ++j) {
    inter.lo[j] = std::max(region.lo[j], cut.lo[j]);
    inter.hi[j] = std::min(region.hi[j], cut.hi[j]);
  }
  if (!positive_volume(inter)) {
    out.push_back(region);
    return;
  }
  Box cur = region;
  for (std::size_t j = 0; j < region.lo.size(); ++j) {
    if (inter.lo[j] > cur.lo[j]) {
      Box piece = cur;
      piece.hi[j] = inter.lo[j];
      if (positive_volume(piece)) out.push_back(piece);
      cur.lo[j] = inter.lo[j];
    }
    if (inter.hi[j] < cur.hi[j]) {
      Box piece = cur;
      piece.lo[j] = inter.hi[j];
      if (positive_volume(piece)) out.push_back(piece);
      cur.hi[j] = inter.hi[j];
    }
  }
}

double dist_segment_point(double ax, double ay, double bx, double by, double px, double py) {
  double vx = bx - ax, vy = by - ay;
  double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::sqrt(sq(ax + t * vx - px) + sq(ay + t * vy - py));
}

// 1D squared-distance transform (Felzenszwalb & Huttenlocher).
void edt_1d(const double* f, int n, double* out, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[0]] == kInf) {
      v[0] = q;
      continue;
    }
    double s;
    while (true) {
      s = ((f[q] + sq(q)) - (f[v[k]] + sq(v[k]))) / (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      if (--k < 0) {
        k = 0;
        v[0] = q;
        s = -kInf;
        break;
      }
    }
    if (v[k] != q) {
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = kInf;
    }
  }
  if (f[v[0]] == kInf) {
    for (int q = 0; q < n; ++q) out[q] = kInf;
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    out[q] = sq(q - v[k]) + f[v[k]];
  }
}

// 2D squared Euclidean distance transform over an n x n grid; sites are
// cells where `site(idx)` is true. Distances are in cell units.
template <typename Pred>
std::vector<double> edt_2d(int n, Pred site) {
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  std::vector<double> f(n), out(n), z(n + 1);
  std::vector<int> v(n);
  // columns
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) f[y] = site(x, y) ? 0.0 : kInf;
    edt_1d(f.data(), n, out.data(), v.data(), z.data());
    for (int y = 0; y < n; ++y) g[static_cast<std::size_t>(y) * n + x] = out[y];
  }
  // rows
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) f[x] = g[static_cast<std::size_t>(y) * n + x];
    edt_1d(f.data(), n, out.data(), v.data(), z.data());
    for (int x = 0; x < n; ++x) g[static_cast<std::size_t>(y) * n + x] = out[x];
  }
  return g;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_csv_doubles(std::string_view s, int line_no) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(s)};
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      fail(Err::Parse, "scene file line " + std::to_string(line_no) + ": bad number '" + item + "'");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size())
      fail(Err::Parse, "scene file line " + std::to_string(line_no) + ": bad number '" + item + "'");
    out.push_back(v);
  }
  if (s.empty() || s.back() == ',')
    fail(Err::Parse, "scene file line " + std::to_string(line_no) + ": trailing comma");
  return out;
}

}  // namespace

void Scene::check_config(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_)
    fail(Err::InvalidArgument, "configuration has dimension " + std::to_string(x.size()) +
                                   ", scene expects " + std::to_string(d_));
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      fail(Err::InvalidArgument, "configuration coordinate " + fmt_double(v) + " outside [0,1]");
}

Scene Scene::disc(Config center, double radius) {
  if (center.empty()) fail(Err::InvalidArgument, "disc center must have dimension >= 1");
  if (!(radius > 0)) fail(Err::InvalidArgument, "disc radius must be positive");
  for (double c : center)
    if (!(c >= 0.0 && c <= 1.0)) fail(Err::InvalidArgument, "disc center must lie in [0,1]^d");
  Scene s;
  s.kind_ = Kind::Disc;
  s.d_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  std::string id = "disc d=" + std::to_string(s.d_) + " c=";
  for (std::size_t j = 0; j < s.center_.size(); ++j)
    id += (j ? "," : "") + fmt_double(s.center_[j]);
  id += " r=" + fmt_double(radius);
  s.id_ = id;
  return s;
}

Scene Scene::box_union(int dimension, std::vector<Box> boxes) {
  if (dimension < 1) fail(Err::InvalidArgument, "dimension must be >= 1");
  Scene s;
  s.kind_ = Kind::BoxUnion;
  s.d_ = dimension;
  std::string id = "box-union d=" + std::to_string(dimension);
  for (auto& b : boxes) {
    if (static_cast<int>(b.lo.size()) != dimension || static_cast<int>(b.hi.size()) != dimension)
      fail(Err::InvalidArgument, "box has wrong dimension");
    for (int j = 0; j < dimension; ++j) {
      b.lo[j] = std::clamp(b.lo[j], 0.0, 1.0);
      b.hi[j] = std::clamp(b.hi[j], 0.0, 1.0);
      if (!(b.lo[j] < b.hi[j])) fail(Err::InvalidArgument, "box is empty after clipping to [0,1]^d");
    }
    id += " box=";
    for (int j = 0; j < dimension; ++j) id += (j ? "," : "") + fmt_double(b.lo[j]);
    for (int j = 0; j < dimension; ++j) id += "," + fmt_double(b.hi[j]);
  }
  s.boxes_ = std::move(boxes);
  // Decompose the free space into interior-disjoint boxes so clearance
  // queries from forbidden points stay exact.
  Box unit;
  unit.lo.assign(dimension, 0.0);
  unit.hi.assign(dimension, 1.0);
  s.free_boxes_ = {unit};
  for (const Box& cut : s.boxes_) {
    std::vector<Box> next;
    for (const Box& region : s.free_boxes_) subtract_box(region, cut, next);
    s.free_boxes_ = std::move(next);
  }
  s.id_ = id;
  return s;
}

Scene Scene::two_link(std::array<double, 2> link_lengths, std::vector<WorkspaceDisc> obstacles,
                      int grid_resolution) {
  if (!(link_lengths[0] > 0) || !(link_lengths[1] > 0))
    fail(Err::InvalidArgument, "link lengths must be positive");
  if (grid_resolution < 2) fail(Err::InvalidArgument, "grid resolution must be >= 2");
  for (const auto& o : obstacles)
    if (!(o.r > 0)) fail(Err::InvalidArgument, "obstacle radius must be positive");
  Scene s;
  s.kind_ = Kind::TwoLink;
  s.d_ = 2;
  s.lengths_ = link_lengths;
  s.obstacles_ = std::move(obstacles);
  s.grid_res_ = grid_resolution;
  std::string id = "two-link l=" + fmt_double(link_lengths[0]) + "," + fmt_double(link_lengths[1]);
  for (const auto& o : s.obstacles_)
    id += " obs=" + fmt_double(o.x) + "," + fmt_double(o.y) + "," + fmt_double(o.r);
  id += " grid=" + std::to_string(grid_resolution);
  s.id_ = id;
  s.build_two_link_grid();
  return s;
}

bool Scene::two_link_collides(double x0, double x1) const {
  const double pi = std::numbers::pi;
  double t1 = (2.0 * x0 - 1.0) * pi;
  double t2 = (2.0 * x1 - 1.0) * pi;
  double j1x = lengths_[0] * std::cos(t1);
  double j1y = lengths_[0] * std::sin(t1);
  double j2x = j1x + lengths_[1] * std::cos(t1 + t2);
  double j2y = j1y + lengths_[1] * std::sin(t1 + t2);
  for (const auto& o : obstacles_) {
    if (dist_segment_point(0, 0, j1x, j1y, o.x, o.y) <= o.r) return true;
    if (dist_segment_point(j1x, j1y, j2x, j2y, o.x, o.y) <= o.r) return true;
  }
  return false;
}

void Scene::build_two_link_grid() {
  const int g = grid_res_;
  grid_labels_.assign(static_cast<std::size_t>(g) * g, 0);
  for (int iy = 0; iy < g; ++iy) {
    double y = (iy + 0.5) / g;
    for (int ix = 0; ix < g; ++ix) {
      double x = (ix + 0.5) / g;
      grid_labels_[static_cast<std::size_t>(iy) * g + ix] = two_link_collides(x, y) ? 1 : 0;
    }
  }
  auto forb = edt_2d(g, [&](int x, int y) {
    return grid_labels_[static_cast<std::size_t>(y) * g + x] == 1;
  });
  auto free = edt_2d(g, [&](int x, int y) {
    return grid_labels_[static_cast<std::size_t>(y) * g + x] == 0;
  });
  grid_dist_to_forb_.resize(forb.size());
  grid_dist_to_free_.resize(free.size());
  const double cell = 1.0 / g;
  for (std::size_t i = 0; i < forb.size(); ++i) {
    grid_dist_to_forb_[i] =
        forb[i] == kInf ? std::numeric_limits<float>::infinity()
                        : static_cast<float>(std::sqrt(forb[i]) * cell);
    grid_dist_to_free_[i] =
        free[i] == kInf ? std::numeric_limits<float>::infinity()
                        : static_cast<float>(std::sqrt(free[i]) * cell);
  }
}

int Scene::label(std::span<const double> x) const {
  check_config(x);
  switch (kind_) {
    case Kind::Disc: {
      double s = 0;
      for (int j = 0; j < d_; ++j) s += sq(x[j] - center_[j]);
      return s <= sq(radius_) ? +1 : -1;
    }
    case Kind::BoxUnion: {
      for (const Box& b : boxes_)
        if (point_in_box(x, b)) return +1;
      return -1;
    }
    case Kind::TwoLink:
      return two_link_collides(x[0], x[1]) ? +1 : -1;
  }
  return -1;
}

double Scene::clearance(std::span<const double> x) const { return probe(x).clearance; }

Probe Scene::probe(std::span<const double> x) const {
  check_config(x);
  switch (kind_) {
    case Kind::Disc: {
      double s = 0;
      for (int j = 0; j < d_; ++j) s += sq(x[j] - center_[j]);
      double dist = std::sqrt(s);
      int lab = dist <= radius_ ? +1 : -1;
      return {lab, std::fabs(dist - radius_)};
    }
    case Kind::BoxUnion: {
      bool inside = false;
      for (const Box& b : boxes_)
        if (point_in_box(x, b)) {
          inside = true;
          break;
        }
      const auto& targets = inside ? free_boxes_ : boxes_;
      double best = kInf;
      for (const Box& b : targets) best = std::min(best, dist_point_box(x, b));
      return {inside ? +1 : -1, best};
    }
    case Kind::TwoLink: {
      int lab = two_link_collides(x[0], x[1]) ? +1 : -1;
      const int g = grid_res_;
      int ix = std::min(static_cast<int>(x[0] * g), g - 1);
      int iy = std::min(static_cast<int>(x[1] * g), g - 1);
      std::size_t idx = static_cast<std::size_t>(iy) * g + ix;
      double cl = lab == +1 ? grid_dist_to_free_[idx] : grid_dist_to_forb_[idx];
      return {lab, cl};
    }
  }
  return {-1, kInf};
}

std::vector<Config> Scene::sample_uniform(long long m, std::uint64_t seed) const {
  if (m < 1) fail(Err::InvalidArgument, "sample count must be >= 1");
  Rng rng(seed);
  std::vector<Config> out;
  out.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    Config c(d_);
    for (int j = 0; j < d_; ++j) c[j] = rng.next_double();
    out.push_back(std::move(c));
  }
  return out;
}

Scene Scene::parse(std::string_view text) {
  std::stringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail(Err::Parse, "empty scene file");
  ++line_no;
  std::stringstream hdr(line);
  std::string magic, version, kind, dim_kv;
  hdr >> magic >> version >> kind >> dim_kv;
  if (magic != "SCENE") fail(Err::Parse, "scene file must start with 'SCENE'");
  if (version != "v1") fail(Err::Version, "unsupported scene version '" + version + "'");
  if (dim_kv.rfind("d=", 0) != 0) fail(Err::Parse, "scene header missing d=<dim>");
  int d = 0;
  try {
    d = std::stoi(dim_kv.substr(2));
  } catch (const std::exception&) {
    fail(Err::Parse, "bad dimension '" + dim_kv + "'");
  }
  if (d < 1) fail(Err::Parse, "dimension must be >= 1");

  Config disc_center;
  double disc_radius = -1;
  std::vector<Box> boxes;
  std::vector<double> link_lengths;
  std::vector<WorkspaceDisc> obstacles;
  int grid_res = 1024;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Err::Parse, "scene file line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "disc.center" && kind == "disc") {
      disc_center = parse_csv_doubles(value, line_no);
    } else if (key == "disc.radius" && kind == "disc") {
      disc_radius = parse_csv_doubles(value, line_no).at(0);
    } else if (key == "box" && kind == "box-union") {
      auto vals = parse_csv_doubles(value, line_no);
      if (static_cast<int>(vals.size()) != 2 * d)
        fail(Err::Parse, "scene file line " + std::to_string(line_no) + ": box needs " +
                             std::to_string(2 * d) + " coordinates");
      Box b;
      b.lo.assign(vals.begin(), vals.begin() + d);
      b.hi.assign(vals.begin() + d, vals.end());
      boxes.push_back(std::move(b));
    } else if (key == "link.lengths" && kind == "two-link") {
      link_lengths = parse_csv_doubles(value, line_no);
    } else if (key == "obstacle.disc" && kind == "two-link") {
      auto vals = parse_csv_doubles(value, line_no);
      if (vals.size() != 3)
        fail(Err::Parse, "scene file line " + std::to_string(line_no) + ": obstacle.disc needs wx,wy,r");
      obstacles.push_back({vals[0], vals[1], vals[2]});
    } else if (key == "grid.resolution" && kind == "two-link") {
      grid_res = static_cast<int>(parse_csv_doubles(value, line_no).at(0));
    } else {
      fail(Err::Parse,
           "scene file line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (kind == "disc") {
    if (disc_center.empty() || disc_radius <= 0)
      fail(Err::Parse, "disc scene needs disc.center and disc.radius");
    if (static_cast<int>(disc_center.size()) != d)
      fail(Err::Parse, "disc.center dimension does not match header");
    return disc(std::move(disc_center), disc_radius);
  }
  if (kind == "box-union") return box_union(d, std::move(boxes));
  if (kind == "two-link") {
    if (d != 2) fail(Err::Parse, "two-link scenes require d=2");
    if (link_lengths.size() != 2) fail(Err::Parse, "two-link scene needs link.lengths=l1,l2");
    return two_link({link_lengths[0], link_lengths[1]}, std::move(obstacles), grid_res);
  }
  fail(Err::Parse, "unknown scene kind '" + kind + "'");
}

Scene Scene::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::Io, "cannot open scene file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace certicd
