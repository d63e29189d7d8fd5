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

#ifndef VSOD_DATA_HPP_
#define VSOD_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vsod/image_io.hpp"
#include "vsod/tensor.hpp"

namespace vsod {

// One time step t >= 2. `flow` is empty when the dataset was loaded without
// motion input.
struct VideoSample {
  Tensor frame;  // (3, H, W) in [0,1]
  Tensor flow;   // (3, H, W) in [0,1]
  Tensor gt;     // (1, H, W) in {0,1}
  int t = 0;
  std::string sequence_id;
  std::string name;  // file stem shared by frames/, gt/ and flow/, e.g. "0007"

  bool has_flow() const { return !flow.empty(); }
};

struct LoadOptions {
  bool require_flow = true;
};

// Reads root/<seq>/{frames,gt,flow}/NNNN.png; frames and gt are numbered
// 1..T, flow 2..T. Frame 1 only serves as the flow source and is dropped.
std::vector<VideoSample> load_sequence(const std::filesystem::path& dir,
                                       const LoadOptions& opts = {});

struct Dataset {
  std::string id;  // directory name
  std::vector<std::string> sequences;
  std::vector<VideoSample> samples;

  std::size_t size() const { return samples.size(); }
  bool has_flow() const;
};

// Every subdirectory of `root` holding a frames/ directory is a sequence.
Dataset load_dataset(const std::filesystem::path& root,
                     const LoadOptions& opts = {});

// Dense displacement field in pixels, row-major.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h),
        dx(static_cast<std::size_t>(w) * h, 0.0),
        dy(static_cast<std::size_t>(w) * h, 0.0) {}

  double magnitude(int x, int y) const;
};

// R = round(127.5 * (clamp(dx / max_mag, -1, 1) + 1)), G likewise for dy,
// B = 128.
Image8 encode_flow(const FlowField& flow, double max_mag);
FlowField decode_flow(const Image8& image, double max_mag);

struct SynthSpec {
  int num_sequences = 8;
  int frames_per_sequence = 16;
  int canvas = 64;
  int objects = 1;
  double speed_min = 1.5;  // pixels per frame
  double speed_max = 4.0;
  double area_min = 0.04;  // fraction of the canvas covered by the object
  double area_max = 0.12;
  bool static_distractor = true;
  bool background_clutter = true;
  int clutter_blobs = 3;
  double clutter_speed = 0.6;   // pixels per frame
  double flow_noise = 0.25;     // std of additive flow noise, pixels
  int flow_blur = 1;            // box-blur radius applied to the flow field
  double pixel_noise = 0.02;
  double flow_max_mag = 0.0;    // 0 selects canvas / 8
  std::uint64_t seed = 0;

  double max_mag() const;
  // Throws ConfigError when a field is out of range.
  void validate() const;
};

std::string to_json(const SynthSpec& spec, int indent = 2);
SynthSpec synth_spec_from_json(std::string_view text);

struct SynthManifest {
  SynthSpec spec;
  std::vector<std::string> sequences;
  std::vector<int> frames;
};

// Writes out/<seq>/{frames,gt,flow}/ plus out/manifest.json. Refuses a
// non-empty `out` with ConfigError.
SynthManifest synth_generate(const SynthSpec& spec,
                             const std::filesystem::path& out);

// In-memory rendering of one sequence; what synth_generate writes.
struct SynthSequence {
  std::vector<Image8> frames;      // T
  std::vector<Image8> gt;          // T
  std::vector<FlowField> flow;     // T - 1, flow[i] moves frame i+1 to i+2
  std::vector<Image8> flow_images; // encoded flow
};
SynthSequence synth_render(const SynthSpec& spec, int sequence_index);

std::string sequence_name(int index);
std::string frame_name(int t);  // "%04d"

}  // namespace vsod

#endif  // VSOD_DATA_HPP_
