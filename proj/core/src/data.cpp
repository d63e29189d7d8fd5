// Copyright 2026 The vsod Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vsod/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "json.hpp"
#include "vsod/errors.hpp"

namespace vsod {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Files named <digits>.png in `dir`, keyed by index.
std::map<int, std::string> indexed_pngs(const fs::path& dir) {
  std::map<int, std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (!entry.is_regular_file() || p.extension() != ".png") continue;
    const std::string stem = p.stem().string();
    if (stem.empty() || stem.size() > 9 ||
        !std::all_of(stem.begin(), stem.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    out.emplace(std::stoi(stem), stem);
  }
  return out;
}

Image8 as_rgb(const Image8& img) {
  if (img.channels == 3) return img;
  Image8 rgb(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.at(x, y, 0);
    }
  }
  return rgb;
}

Image8 read_or_ingestion_error(const fs::path& p) {
  try {
    return read_png(p);
  } catch (const IoError& e) {
    throw IngestionError(e.what());
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// ---------------------------------------------------------------------------
// Synthetic scenes.

struct Shape {
  bool ellipse = true;
  double cx = 0, cy = 0;
  double a = 0, b = 0, angle = 0;  // ellipse
  std::vector<double> px, py;      // polygon, relative to the centre
  double radius = 0;               // bounding radius
  double color[3] = {0, 0, 0};
  double stripe_freq = 0, stripe_angle = 0, stripe_phase = 0;

  bool contains(double x, double y) const {
    const double u = x - cx;
    const double v = y - cy;
    if (ellipse) {
      const double c = std::cos(angle), s = std::sin(angle);
      const double ru = (c * u + s * v) / a;
      const double rv = (-s * u + c * v) / b;
      return ru * ru + rv * rv <= 1.0;
    }
    // Convex polygon with counter-clockwise vertices.
    const std::size_t n = px.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const double cross =
          (px[j] - px[i]) * (v - py[i]) - (py[j] - py[i]) * (u - px[i]);
      if (cross < 0) return false;
    }
    return true;
  }

  double shade(int c, double x, double y) const {
    const double u = x - cx, v = y - cy;
    const double t = u * std::cos(stripe_angle) + v * std::sin(stripe_angle);
    return color[c] * (0.8 + 0.2 * std::sin(stripe_freq * t + stripe_phase));
  }
};

struct Blob {
  double cx = 0, cy = 0, vx = 0, vy = 0, sigma = 0;
  double amp[3] = {0, 0, 0};
};

struct Wave {
  double fx = 0, fy = 0, phase = 0;
  double amp[3] = {0, 0, 0};
};

double polygon_area(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t j = (i + 1) % x.size();
    s += x[i] * y[j] - x[j] * y[i];
  }
  return 0.5 * s;
}

Shape random_shape(std::mt19937_64& rng, const SynthSpec& spec) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double canvas = spec.canvas;
  const double area =
      (spec.area_min + (spec.area_max - spec.area_min) * u01(rng)) * canvas *
      canvas;
  Shape s;
  s.ellipse = u01(rng) < 0.5;
  if (s.ellipse) {
    const double aspect = 0.6 + 0.4 * u01(rng);
    s.a = std::sqrt(area / (std::numbers::pi * aspect));
    s.b = s.a * aspect;
    s.angle = std::numbers::pi * u01(rng);
    s.radius = s.a;
  } else {
    const int n = 5 + static_cast<int>(u01(rng) * 3);
    std::vector<double> angles(n);
    for (int i = 0; i < n; ++i) {
      angles[i] = 2.0 * std::numbers::pi * (i + 0.35 * u01(rng)) / n;
    }
    for (int i = 0; i < n; ++i) {
      const double r = 0.8 + 0.2 * u01(rng);
      s.px.push_back(r * std::cos(angles[i]));
      s.py.push_back(r * std::sin(angles[i]));
    }
    const double k = std::sqrt(area / polygon_area(s.px, s.py));
    for (int i = 0; i < n; ++i) {
      s.px[i] *= k;
      s.py[i] *= k;
      s.radius = std::max(s.radius, std::hypot(s.px[i], s.py[i]));
    }
  }
  for (double& c : s.color) {
    const double v = 0.2 * u01(rng);
    c = u01(rng) < 0.5 ? v : 1.0 - v;
  }
  s.stripe_freq = 0.4 + 0.6 * u01(rng);
  s.stripe_angle = std::numbers::pi * u01(rng);
  s.stripe_phase = 2.0 * std::numbers::pi * u01(rng);
  s.cx = s.radius + (canvas - 2 * s.radius) * u01(rng);
  s.cy = s.radius + (canvas - 2 * s.radius) * u01(rng);
  return s;
}

void box_blur(std::vector<double>& field, int w, int h, int r) {
  if (r <= 0) return;
  std::vector<double> tmp(field.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      int n = 0;
      for (int k = -r; k <= r; ++k) {
        const int xx = x + k;
        if (xx < 0 || xx >= w) continue;
        s += field[y * w + xx];
        ++n;
      }
      tmp[y * w + x] = s / n;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      int n = 0;
      for (int k = -r; k <= r; ++k) {
        const int yy = y + k;
        if (yy < 0 || yy >= h) continue;
        s += tmp[yy * w + x];
        ++n;
      }
      field[y * w + x] = s / n;
    }
  }
}

std::mt19937_64 sequence_rng(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  return std::mt19937_64(seq);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("failed writing " + p.string());
}

}  // namespace

// ---------------------------------------------------------------------------
// Ingestion.

std::vector<VideoSample> load_sequence(const fs::path& dir,
                                       const LoadOptions& opts) {
  if (!fs::is_directory(dir)) {
    throw IngestionError("sequence directory not found: " + dir.string());
  }
  const std::string id = dir.filename().string();
  const auto frames = indexed_pngs(dir / "frames");
  const int count = static_cast<int>(frames.size());
  if (count < 2) {
    throw EmptySequenceError("sequence " + id + " has " +
                             std::to_string(count) +
                             " frame(s); at least 2 are needed");
  }
  int expect = 1;
  for (const auto& [index, stem] : frames) {
    if (index != expect) {
      throw IngestionError("sequence " + id + ": frames must be numbered 1.." +
                           std::to_string(count) + ", found " + stem + ".png");
    }
    ++expect;
  }
  const bool want_flow = opts.require_flow || fs::is_directory(dir / "flow");

  std::vector<VideoSample> samples;
  samples.reserve(count - 1);
  for (const auto& [t, stem] : frames) {
    if (t < 2) continue;
    const fs::path frame_path = dir / "frames" / (stem + ".png");
    const fs::path gt_path = dir / "gt" / (stem + ".png");
    const fs::path flow_path = dir / "flow" / (stem + ".png");
    if (!fs::exists(gt_path)) {
      throw IngestionError("missing ground truth " + gt_path.string() +
                           " for t=" + std::to_string(t));
    }
    VideoSample s;
    s.t = t;
    s.sequence_id = id;
    s.name = stem;
    const Image8 frame = as_rgb(read_or_ingestion_error(frame_path));
    const Image8 gt = read_or_ingestion_error(gt_path);
    if (gt.width != frame.width || gt.height != frame.height) {
      throw IngestionError(gt_path.string() + " does not match the frame size");
    }
    s.frame = to_tensor(frame);
    s.gt = to_binary_mask(gt);
    if (want_flow) {
      if (!fs::exists(flow_path)) {
        throw IngestionError("missing flow file " + flow_path.string() +
                             " for t=" + std::to_string(t));
      }
      const Image8 flow = as_rgb(read_or_ingestion_error(flow_path));
      if (flow.width != frame.width || flow.height != frame.height) {
        throw IngestionError(flow_path.string() +
                             " does not match the frame size");
      }
      s.flow = to_tensor(flow);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

bool Dataset::has_flow() const {
  return !samples.empty() &&
         std::all_of(samples.begin(), samples.end(),
                     [](const VideoSample& s) { return s.has_flow(); });
}

Dataset load_dataset(const fs::path& root, const LoadOptions& opts) {
  if (!fs::is_directory(root)) {
    throw IngestionError("dataset directory not found: " + root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::is_directory(entry.path() / "frames")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) {
    throw IngestionError("no sequences under " + root.string());
  }
  Dataset ds;
  ds.id = fs::absolute(root).lexically_normal().filename().string();
  if (ds.id.empty()) {
    ds.id = fs::absolute(root).lexically_normal().parent_path().filename();
  }
  for (const fs::path& d : dirs) {
    auto samples = load_sequence(d, opts);
    ds.sequences.push_back(d.filename().string());
    for (auto& s : samples) ds.samples.push_back(std::move(s));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Flow images.

double FlowField::magnitude(int x, int y) const {
  const std::size_t i = static_cast<std::size_t>(y) * width + x;
  return std::hypot(dx[i], dy[i]);
}

Image8 encode_flow(const FlowField& flow, double max_mag) {
  if (!(max_mag > 0) || !std::isfinite(max_mag)) {
    throw DomainError("flow max magnitude must be positive and finite");
  }
  Image8 img(flow.width, flow.height, 3);
  auto channel = [max_mag](double v) {
    const double q = std::clamp(v / max_mag, -1.0, 1.0);
    return static_cast<std::uint8_t>(std::round(127.5 * (q + 1.0)));
  };
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * flow.width + x;
      if (!std::isfinite(flow.dx[i]) || !std::isfinite(flow.dy[i])) {
        throw DomainError("non-finite flow at (" + std::to_string(x) + ", " +
                          std::to_string(y) + ")");
      }
      img.at(x, y, 0) = channel(flow.dx[i]);
      img.at(x, y, 1) = channel(flow.dy[i]);
      img.at(x, y, 2) = 128;
    }
  }
  return img;
}

FlowField decode_flow(const Image8& image, double max_mag) {
  if (image.channels != 3) throw ShapeError("flow images have 3 channels");
  FlowField f(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * image.width + x;
      f.dx[i] = (image.at(x, y, 0) / 127.5 - 1.0) * max_mag;
      f.dy[i] = (image.at(x, y, 1) / 127.5 - 1.0) * max_mag;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Generator.

double SynthSpec::max_mag() const {
  return flow_max_mag > 0 ? flow_max_mag : canvas / 8.0;
}

void SynthSpec::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("synth: " + m); };
  if (num_sequences < 1) fail("num_sequences must be >= 1");
  if (frames_per_sequence < 2) fail("frames_per_sequence must be >= 2");
  if (canvas < 16) fail("canvas must be >= 16");
  if (objects < 1 || objects > 3) fail("objects must be in [1, 3]");
  if (!(speed_min > 0) || speed_max < speed_min) {
    fail("speed range must satisfy 0 < speed_min <= speed_max");
  }
  if (speed_max > canvas / 8.0) fail("speed_max exceeds canvas / 8");
  if (area_min < 0.02 || area_max > 0.30 || area_max < area_min) {
    fail("area range must lie within [0.02, 0.30]");
  }
  if (objects * area_max > 0.30) fail("objects * area_max exceeds 0.30");
  if (clutter_blobs < 0) fail("clutter_blobs must be >= 0");
  if (clutter_speed < 0 || clutter_speed >= speed_min) {
    fail("clutter_speed must lie in [0, speed_min)");
  }
  if (flow_noise < 0 || pixel_noise < 0) fail("noise levels must be >= 0");
  if (flow_blur < 0 || flow_blur > 4) fail("flow_blur must be in [0, 4]");
  if (flow_max_mag < 0) fail("flow_max_mag must be >= 0");
}

std::string to_json(const SynthSpec& s, int indent) {
  json j{{"num_sequences", s.num_sequences},
         {"frames_per_sequence", s.frames_per_sequence},
         {"canvas", s.canvas},
         {"objects", s.objects},
         {"speed_min", s.speed_min},
         {"speed_max", s.speed_max},
         {"area_min", s.area_min},
         {"area_max", s.area_max},
         {"static_distractor", s.static_distractor},
         {"background_clutter", s.background_clutter},
         {"clutter_blobs", s.clutter_blobs},
         {"clutter_speed", s.clutter_speed},
         {"flow_noise", s.flow_noise},
         {"flow_blur", s.flow_blur},
         {"pixel_noise", s.pixel_noise},
         {"flow_max_mag", s.flow_max_mag},
         {"seed", s.seed}};
  return j.dump(indent);
}

SynthSpec synth_spec_from_json(std::string_view text) {
  SynthSpec s;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("synth spec must be a JSON object");
    const json defaults = json::parse(to_json(s, -1));
    for (const auto& [key, value] : j.items()) {
      if (!defaults.contains(key)) {
        throw ConfigError("unknown synth spec key '" + key + "'");
      }
    }
    auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("num_sequences", s.num_sequences);
    get("frames_per_sequence", s.frames_per_sequence);
    get("canvas", s.canvas);
    get("objects", s.objects);
    get("speed_min", s.speed_min);
    get("speed_max", s.speed_max);
    get("area_min", s.area_min);
    get("area_max", s.area_max);
    get("static_distractor", s.static_distractor);
    get("background_clutter", s.background_clutter);
    get("clutter_blobs", s.clutter_blobs);
    get("clutter_speed", s.clutter_speed);
    get("flow_noise", s.flow_noise);
    get("flow_blur", s.flow_blur);
    get("pixel_noise", s.pixel_noise);
    get("flow_max_mag", s.flow_max_mag);
    get("seed", s.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string sequence_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "seq%03d", index);
  return buf;
}

std::string frame_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", t);
  return buf;
}

SynthSequence synth_render(const SynthSpec& spec, int sequence_index) {
  spec.validate();
  std::mt19937_64 rng = sequence_rng(spec.seed, sequence_index);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = spec.canvas;
  const int frames = spec.frames_per_sequence;

  double base[3];
  for (double& c : base) c = 0.3 + 0.4 * u01(rng);
  std::vector<Wave> waves(3);
  for (Wave& w : waves) {
    w.fx = 2.0 * std::numbers::pi * (1.0 + 2.0 * u01(rng)) / n;
    w.fy = 2.0 * std::numbers::pi * (1.0 + 2.0 * u01(rng)) / n;
    w.phase = 2.0 * std::numbers::pi * u01(rng);
    for (double& a : w.amp) a = 0.08 * (u01(rng) - 0.5);
  }

  std::vector<Shape> movers;
  std::vector<double> vx, vy;
  for (int k = 0; k < spec.objects; ++k) {
    movers.push_back(random_shape(rng, spec));
    const double speed =
        spec.speed_min + (spec.speed_max - spec.speed_min) * u01(rng);
    const double dir = 2.0 * std::numbers::pi * u01(rng);
    vx.push_back(speed * std::cos(dir));
    vy.push_back(speed * std::sin(dir));
  }
  // Drawn from the same distribution as the movers, so that a single frame
  // cannot tell the two apart.
  std::optional<Shape> distractor;
  if (spec.static_distractor) distractor = random_shape(rng, spec);

  std::vector<Blob> blobs;
  if (spec.background_clutter) {
    for (int k = 0; k < spec.clutter_blobs; ++k) {
      Blob b;
      b.cx = n * u01(rng);
      b.cy = n * u01(rng);
      const double dir = 2.0 * std::numbers::pi * u01(rng);
      b.vx = spec.clutter_speed * std::cos(dir);
      b.vy = spec.clutter_speed * std::sin(dir);
      b.sigma = n * (0.06 + 0.06 * u01(rng));
      for (double& a : b.amp) a = 0.24 * (u01(rng) - 0.5);
      blobs.push_back(b);
    }
  }

  SynthSequence seq;
  std::vector<double> mover_dx(movers.size()), mover_dy(movers.size());
  std::vector<double> blob_dx(blobs.size()), blob_dy(blobs.size());
  for (int t = 1; t <= frames; ++t) {
    if (t > 1) {
      for (std::size_t k = 0; k < movers.size(); ++k) {
        Shape& s = movers[k];
        const double lo = s.radius, hi = n - s.radius;
        if (s.cx + vx[k] < lo || s.cx + vx[k] > hi) vx[k] = -vx[k];
        if (s.cy + vy[k] < lo || s.cy + vy[k] > hi) vy[k] = -vy[k];
        s.cx += vx[k];
        s.cy += vy[k];
        mover_dx[k] = vx[k];
        mover_dy[k] = vy[k];
      }
      for (std::size_t k = 0; k < blobs.size(); ++k) {
        Blob& b = blobs[k];
        if (b.cx + b.vx < 0 || b.cx + b.vx > n) b.vx = -b.vx;
        if (b.cy + b.vy < 0 || b.cy + b.vy > n) b.vy = -b.vy;
        b.cx += b.vx;
        b.cy += b.vy;
        blob_dx[k] = b.vx;
        blob_dy[k] = b.vy;
      }
    }

    Image8 frame(n, n, 3);
    Image8 gt(n, n, 1);
    FlowField flow(n, n);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        const std::size_t i = static_cast<std::size_t>(y) * n + x;
        double rgb[3];
        for (int c = 0; c < 3; ++c) {
          rgb[c] = base[c];
          for (const Wave& w : waves) {
            rgb[c] += w.amp[c] * std::sin(w.fx * px + w.fy * py + w.phase);
          }
        }
        double strongest = 0.5;
        for (std::size_t k = 0; k < blobs.size(); ++k) {
          const Blob& b = blobs[k];
          const double d2 = (px - b.cx) * (px - b.cx) + (py - b.cy) * (py - b.cy);
          const double g = std::exp(-0.5 * d2 / (b.sigma * b.sigma));
          for (int c = 0; c < 3; ++c) rgb[c] += b.amp[c] * g;
          if (g > strongest) {
            strongest = g;
            flow.dx[i] = blob_dx[k];
            flow.dy[i] = blob_dy[k];
          }
        }
        if (distractor && distractor->contains(px, py)) {
          for (int c = 0; c < 3; ++c) rgb[c] = distractor->shade(c, px, py);
          flow.dx[i] = flow.dy[i] = 0.0;
        }
        for (std::size_t k = 0; k < movers.size(); ++k) {
          if (!movers[k].contains(px, py)) continue;
          for (int c = 0; c < 3; ++c) rgb[c] = movers[k].shade(c, px, py);
          flow.dx[i] = mover_dx[k];
          flow.dy[i] = mover_dy[k];
          gt.at(x, y, 0) = 255;
        }
        for (int c = 0; c < 3; ++c) {
          frame.at(x, y, c) = to_byte(rgb[c] + spec.pixel_noise * gauss(rng));
        }
      }
    }
    seq.frames.push_back(std::move(frame));
    seq.gt.push_back(std::move(gt));
    if (t > 1) {
      if (spec.flow_noise > 0) {
        for (std::size_t i = 0; i < flow.dx.size(); ++i) {
          flow.dx[i] += spec.flow_noise * gauss(rng);
          flow.dy[i] += spec.flow_noise * gauss(rng);
        }
      }
      box_blur(flow.dx, n, n, spec.flow_blur);
      box_blur(flow.dy, n, n, spec.flow_blur);
      seq.flow_images.push_back(encode_flow(flow, spec.max_mag()));
      seq.flow.push_back(std::move(flow));
    }
  }
  return seq;
}

SynthManifest synth_generate(const SynthSpec& spec, const fs::path& out) {
  spec.validate();
  if (fs::exists(out) && !fs::is_empty(out)) {
    throw ConfigError("output directory " + out.string() +
                      " is not empty; refusing to overwrite");
  }
  fs::create_directories(out);
  SynthManifest manifest;
  manifest.spec = spec;
  json seqs = json::array();
  for (int s = 0; s < spec.num_sequences; ++s) {
    const std::string name = sequence_name(s);
    const SynthSequence seq = synth_render(spec, s);
    const fs::path dir = out / name;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      const std::string file = frame_name(static_cast<int>(i) + 1) + ".png";
      write_png(dir / "frames" / file, seq.frames[i]);
      write_png(dir / "gt" / file, seq.gt[i]);
    }
    for (std::size_t i = 0; i < seq.flow_images.size(); ++i) {
      const std::string file = frame_name(static_cast<int>(i) + 2) + ".png";
      write_png(dir / "flow" / file, seq.flow_images[i]);
    }
    manifest.sequences.push_back(name);
    manifest.frames.push_back(spec.frames_per_sequence);
    seqs.push_back({{"id", name}, {"frames", spec.frames_per_sequence}});
  }
  json j{{"format", "vsod-synth/1"},
         {"seed", spec.seed},
         {"flow_encoding",
          {{"max_mag", spec.max_mag()},
           {"r", "round(127.5*(clamp(dx/max_mag,-1,1)+1))"},
           {"g", "round(127.5*(clamp(dy/max_mag,-1,1)+1))"},
           {"b", 128}}},
         {"spec", json::parse(to_json(spec, -1))},
         {"sequences", seqs}};
  write_text(out / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

}  // namespace vsod
