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

#ifndef VSOD_TESTS_SUPPORT_HPP_
#define VSOD_TESTS_SUPPORT_HPP_

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vsod/data.hpp"
#include "vsod/image_io.hpp"

namespace testing_support {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vsod") {
    std::random_device rd;
    for (int i = 0; i < 100; ++i) {
      fs::path p = fs::temp_directory_path() /
                   (tag + "-" + std::to_string(rd()) + std::to_string(i));
      if (fs::create_directory(p)) {
        path_ = p;
        return;
      }
    }
    throw std::runtime_error("cannot create a temporary directory");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every regular file below `root`, keyed by relative path, with its bytes.
inline std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
  }
  return out;
}

inline int count_files(const fs::path& dir, const std::string& ext = ".png") {
  if (!fs::is_directory(dir)) return 0;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) ++n;
  }
  return n;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Small synthetic dataset for tests that only need valid inputs.
inline vsod::SynthSpec small_spec(int sequences, int frames,
                                  std::uint64_t seed) {
  vsod::SynthSpec s;
  s.num_sequences = sequences;
  s.frames_per_sequence = frames;
  s.seed = seed;
  return s;
}

// Writes one sequence of T plain frames/gt/flow images of side `n`.
inline void write_plain_sequence(const fs::path& seq, int frames, int n = 16) {
  for (int t = 1; t <= frames; ++t) {
    const std::string name = vsod::frame_name(t) + ".png";
    vsod::Image8 frame(n, n, 3, static_cast<std::uint8_t>(10 * t));
    vsod::Image8 gt(n, n, 1, 0);
    for (int y = n / 4; y < n / 2; ++y) {
      for (int x = n / 4; x < n / 2; ++x) gt.at(x, y, 0) = 255;
    }
    vsod::write_png(seq / "frames" / name, frame);
    vsod::write_png(seq / "gt" / name, gt);
    if (t >= 2) vsod::write_png(seq / "flow" / name, vsod::Image8(n, n, 3, 128));
  }
}

}  // namespace testing_support

#endif  // VSOD_TESTS_SUPPORT_HPP_
