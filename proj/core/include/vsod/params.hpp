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

#ifndef VSOD_PARAMS_HPP_
#define VSOD_PARAMS_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vsod/autograd.hpp"

namespace vsod {

enum class Init {
  kHeNormal,  // N(0, 2 / fan_in)
  kLecunNormal,  // N(0, 1 / fan_in)
  kZeros,
};

// Declaration of one learnable tensor. Layouts are computed from a config
// without allocating, so parameter counts are cheap for any profile.
struct ParamSpec {
  std::string name;
  std::vector<int> dims;
  Init init = Init::kZeros;
};

using ParamLayout = std::vector<ParamSpec>;

std::size_t parameter_count(const ParamLayout& layout);

// Named learnable tensors, iterated in name order.
//
// Each tensor is drawn from its own generator seeded by (seed, name), so a
// parameter's initial value does not depend on which other parameters an
// ablation variant happens to declare.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamLayout& layout, std::uint64_t seed);

  void add(const ParamSpec& spec, std::uint64_t seed);

  bool contains(std::string_view name) const;
  const Var& get(std::string_view name) const;
  Var& get(std::string_view name);
  // Undefined Var when absent.
  Var find(std::string_view name) const;

  std::vector<std::string> names() const;
  std::vector<std::string> names_with_prefix(std::string_view prefix) const;
  bool any_with_prefix(std::string_view prefix) const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  const std::map<std::string, Var, std::less<>>& items() const {
    return params_;
  }
  std::map<std::string, Var, std::less<>>& items() { return params_; }

  void zero_grad();

  // Copies values of every parameter present in both stores whose name
  // starts with one of `prefixes`. Returns the number copied.
  std::size_t copy_from(const ParamStore& other,
                        const std::vector<std::string>& prefixes);

  // Binary blob: magic, count, then per tensor name/dims/little-endian
  // doubles.
  void save(std::ostream& out) const;
  static ParamStore load(std::istream& in);

 private:
  std::map<std::string, Var, std::less<>> params_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace vsod

#endif  // VSOD_PARAMS_HPP_
