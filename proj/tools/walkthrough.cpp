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

// Executes docs/walkthrough.json against a built `vsod` binary and prints a
// checklist. Exit status is 0 only when every step and check passes.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string substitute(std::string s, const std::string& key,
                       const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos;
       pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
  return s;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

int run_command(const std::vector<std::string>& argv, const fs::path& log) {
  std::string cmd;
  for (const std::string& a : argv) cmd += shell_quote(a) + " ";
  cmd += "> " + shell_quote(log.string()) + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

int count_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) return -1;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && (ext.empty() || e.path().extension() == ext)) {
      ++n;
    }
  }
  return n;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Returns an empty string when the check holds, otherwise the reason.
std::string evaluate(const json& check, const std::string& scratch) {
  auto path = [&](const char* key) {
    return fs::path(substitute(check.at(key).get<std::string>(), "{scratch}",
                               scratch));
  };
  if (check.contains("exists")) {
    const fs::path p = path("exists");
    return fs::exists(p) ? "" : "missing " + p.string();
  }
  if (check.contains("count")) {
    const fs::path p = path("count");
    const int want = check.at("equals").get<int>();
    const int got = count_files(p, check.value("ext", std::string()));
    if (got == want) return "";
    return p.string() + " holds " + std::to_string(got) + " files, expected " +
           std::to_string(want);
  }
  if (check.contains("contains")) {
    const fs::path p = path("contains");
    const std::string text = check.at("text").get<std::string>();
    if (!fs::exists(p)) return "missing " + p.string();
    return read_text(p).find(text) != std::string::npos
               ? ""
               : p.string() + " lacks \"" + text + "\"";
  }
  return "unknown check " + check.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runs the documented end-to-end walkthrough"};
  std::string cli_path, scratch, script = "docs/walkthrough.json";
  app.add_option("--cli", cli_path, "Path to the vsod binary")->required();
  app.add_option("--scratch", scratch, "Scratch directory for all outputs")
      ->required();
  app.add_option("--script", script, "Walkthrough step list");
  CLI11_PARSE(app, argc, argv);

  json doc;
  try {
    doc = json::parse(read_text(script));
  } catch (const json::exception& e) {
    std::cerr << "cannot parse " << script << ": " << e.what() << "\n";
    return 2;
  }
  fs::create_directories(scratch);
  const fs::path logs = fs::path(scratch) / "logs";

  const json& steps = doc.at("steps");
  int index = 0;
  for (const json& step : steps) {
    ++index;
    const std::string name = step.at("name").get<std::string>();
    const int expected = step.value("exit_code", 0);
    int c = 0;
    for (const json& command : step.at("commands")) {
      std::vector<std::string> args{cli_path};
      for (const json& a : command) {
        args.push_back(substitute(a.get<std::string>(), "{scratch}", scratch));
      }
      fs::create_directories(logs);
      const fs::path log =
          logs / ("step" + std::to_string(index) + "_" + std::to_string(++c) +
                  ".log");
      const int code = run_command(args, log);
      if (code != expected) {
        std::printf("[FAIL] step %d %s: command %d exited with %d (log %s)\n",
                    index, name.c_str(), c, code, log.c_str());
        std::fputs(read_text(log).c_str(), stdout);
        return 1;
      }
    }
    for (const json& check : step.value("expect", json::array())) {
      const std::string reason = evaluate(check, scratch);
      if (!reason.empty()) {
        std::printf("[FAIL] step %d %s: %s\n", index, name.c_str(),
                    reason.c_str());
        return 1;
      }
    }
    std::printf("[PASS] step %d %s (%zu checks)\n", index, name.c_str(),
                step.value("expect", json::array()).size());
  }
  std::printf("walkthrough: all %d steps passed\n", index);
  return 0;
}
