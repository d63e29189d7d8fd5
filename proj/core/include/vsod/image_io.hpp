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

#ifndef VSOD_IMAGE_IO_HPP_
#define VSOD_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vsod/tensor.hpp"

namespace vsod {

// 8-bit interleaved image with 1 (gray) or 3 (RGB) channels.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Image8() = default;
  Image8(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Image8&, const Image8&) = default;
};

// Decodes gray, gray+alpha, RGB or RGBA PNGs; alpha is dropped.
Image8 read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image8& image);

// (C, H, W) tensor with values / 255.
Tensor to_tensor(const Image8& image);
// Gray image -> (1, H, W) tensor of {0, 1}, foreground where value >= 128.
Tensor to_binary_mask(const Image8& image);
// (1, H, W) probabilities -> 8-bit gray, round(p * 255) after clamping.
Image8 to_gray8(const Tensor& probability);
// (3, H, W) values in [0,1] -> 8-bit RGB.
Image8 to_rgb8(const Tensor& rgb);

}  // namespace vsod

#endif  // VSOD_IMAGE_IO_HPP_
