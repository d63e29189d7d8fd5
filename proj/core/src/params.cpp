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

#include "vsod/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

#include "vsod/errors.hpp"

namespace vsod {
namespace {

constexpr char kMagic[8] = {'V', 'S', 'O', 'D', 'P', 'R', 'M', '1'};

std::size_t fan_in(const std::vector<int>& dims) {
  std::size_t f = 1;
  for (std::size_t i = 1; i < dims.size(); ++i) f *= dims[i];
  return f;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint format assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated parameter blob");
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::size_t parameter_count(const ParamLayout& layout) {
  std::size_t n = 0;
  for (const auto& p : layout) {
    std::size_t k = 1;
    for (int d : p.dims) k *= static_cast<std::size_t>(d);
    n += k;
  }
  return n;
}

ParamStore::ParamStore(const ParamLayout& layout, std::uint64_t seed) {
  for (const auto& spec : layout) add(spec, seed);
}

void ParamStore::add(const ParamSpec& spec, std::uint64_t seed) {
  if (params_.count(spec.name)) {
    throw ConfigError("duplicate parameter " + spec.name);
  }
  Tensor t(spec.dims, 0.0);
  if (spec.init != Init::kZeros) {
    std::uint64_t name_hash = fnv1a64(spec.name);
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(name_hash),
                      static_cast<std::uint32_t>(name_hash >> 32)};
    std::mt19937_64 rng(seq);
    double gain = spec.init == Init::kHeNormal ? 2.0 : 1.0;
    std::normal_distribution<double> dist(
        0.0, std::sqrt(gain / static_cast<double>(fan_in(spec.dims))));
    for (auto& v : t.data()) v = dist(rng);
  }
  params_.emplace(spec.name, Var::parameter(std::move(t)));
}

bool ParamStore::contains(std::string_view name) const {
  return params_.find(name) != params_.end();
}

const Var& ParamStore::get(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw ConfigError("missing parameter " + std::string(name));
  }
  return it->second;
}

Var& ParamStore::get(std::string_view name) {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw ConfigError("missing parameter " + std::string(name));
  }
  return it->second;
}

Var ParamStore::find(std::string_view name) const {
  auto it = params_.find(name);
  return it == params_.end() ? Var() : it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

std::vector<std::string> ParamStore::names_with_prefix(
    std::string_view prefix) const {
  std::vector<std::string> out;
  for (auto it = params_.lower_bound(prefix);
       it != params_.end() && it->first.starts_with(prefix); ++it) {
    out.push_back(it->first);
  }
  return out;
}

bool ParamStore::any_with_prefix(std::string_view prefix) const {
  auto it = params_.lower_bound(prefix);
  return it != params_.end() && it->first.starts_with(prefix);
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, v] : params_) n += v.value().numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [_, v] : params_) v.zero_grad();
}

std::size_t ParamStore::copy_from(const ParamStore& other,
                                  const std::vector<std::string>& prefixes) {
  std::size_t copied = 0;
  for (auto& [name, var] : params_) {
    bool wanted = false;
    for (const auto& p : prefixes) wanted = wanted || name.starts_with(p);
    if (!wanted) continue;
    Var src = other.find(name);
    if (!src.defined()) continue;
    if (!src.value().same_shape(var.value())) {
      throw ConfigError("parameter " + name + " has shape " +
                        src.value().shape_string() + " in source but " +
                        var.value().shape_string() + " here");
    }
    var.mutable_value() = src.value();
    ++copied;
  }
  return copied;
}

void ParamStore::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_le<std::uint64_t>(out, params_.size());
  for (const auto& [name, var] : params_) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const auto& dims = var.value().dims();
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(dims.size()));
    for (int d : dims) write_le<std::int32_t>(out, d);
    out.write(reinterpret_cast<const char*>(var.value().raw()),
              static_cast<std::streamsize>(var.value().numel() *
                                           sizeof(double)));
  }
  if (!out) throw IoError("failed writing parameter blob");
}

ParamStore ParamStore::load(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a parameter blob");
  }
  ParamStore store;
  auto count = read_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto len = read_le<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    auto rank = read_le<std::uint32_t>(in);
    std::vector<int> dims(rank);
    for (auto& d : dims) d = read_le<std::int32_t>(in);
    Tensor t(dims, 0.0);
    in.read(reinterpret_cast<char*>(t.raw()),
            static_cast<std::streamsize>(t.numel() * sizeof(double)));
    if (!in) throw IoError("truncated parameter blob at " + name);
    store.params_.emplace(std::move(name), Var::parameter(std::move(t)));
  }
  return store;
}

}  // namespace vsod
