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

#include "vsod/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "json.hpp"
#include "vsod/backbone.hpp"
#include "vsod/decoder.hpp"
#include "vsod/errors.hpp"
#include "vsod/gtnet.hpp"
#include "vsod/modulator.hpp"
#include "vsod/params.hpp"

namespace vsod {
namespace {

using nlohmann::json;

Tensor random_tensor(const std::vector<int>& dims, std::mt19937_64& rng,
                     bool unit_interval) {
  Tensor t(dims);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t i = 0; i < t.numel(); ++i) {
    t[i] = unit_interval ? uniform(rng) : normal(rng);
  }
  return t;
}

// sum(x * r) for a fixed random projection r.
Var project(const Var& x, const Tensor& r) {
  return sum(mul(x, Var::constant(r)));
}

std::vector<GradProbe> probes_with_prefix(const ParamStore& params,
                                          const std::string& prefix) {
  std::vector<GradProbe> out;
  for (const auto& [name, var] : params.items()) {
    if (name.starts_with(prefix)) out.push_back({param_group(name), var});
  }
  return out;
}

double evaluate(const std::function<Var()>& objective, std::uint64_t* print) {
  NoGradGuard no_grad;
  KinkProbe probe;
  const double v = objective().value()[0];
  *print = probe.fingerprint();
  return v;
}

}  // namespace

std::string param_group(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = name.find('.', begin);
    parts.push_back(name.substr(begin, dot - begin));
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  std::size_t keep = std::min<std::size_t>(3, parts.size());
  while (keep > 1 && (parts[keep - 1] == "weight" || parts[keep - 1] == "bias")) {
    --keep;
  }
  std::string g = parts[0];
  for (std::size_t i = 1; i < keep; ++i) g += "." + parts[i];
  return g;
}

ModuleResult check_gradients(const std::string& module,
                             const std::function<Var()>& objective,
                             const std::vector<GradProbe>& probes,
                             const GradcheckOptions& opts) {
  ModuleResult result;
  result.module = module;
  if (probes.empty()) return result;

  for (GradProbe p : probes) p.var.mutable_grad() = Tensor();
  std::uint64_t base_print = 0;
  {
    KinkProbe kink;
    const Var f = objective();
    base_print = kink.fingerprint();
    backward(f);
  }
  std::vector<Tensor> analytic;
  for (GradProbe p : probes) {
    Tensor g = p.var.has_grad() ? p.var.grad() : Tensor(p.var.dims(), 0.0);
    if (!opts.corrupt_group.empty() &&
        p.group.starts_with(opts.corrupt_group)) {
      for (std::size_t i = 0; i < g.numel(); ++i) g[i] *= opts.corrupt_factor;
    }
    analytic.push_back(std::move(g));
    p.var.mutable_grad() = Tensor();
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    auto [it, fresh] = members.try_emplace(probes[i].group);
    if (fresh) order.push_back(probes[i].group);
    it->second.push_back(i);
  }
  std::map<std::string, GroupResult> groups;
  for (const std::string& g : order) groups[g] = {module, g};

  std::mt19937_64 rng(opts.seed ^ fnv1a64(module));
  const int total = std::max<int>(opts.samples_per_module,
                                  2 * static_cast<int>(order.size()));
  const double h = opts.step;
  for (int s = 0; s < total; ++s) {
    const std::string& gname = order[s % order.size()];
    GroupResult& gr = groups[gname];
    const auto& idx = members[gname];
    std::size_t count = 0;
    for (std::size_t i : idx) count += probes[i].var.value().numel();
    for (int attempt = 0; attempt < 100; ++attempt) {
      std::size_t pick =
          std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
      std::size_t which = idx.front();
      for (std::size_t i : idx) {
        const std::size_t n = probes[i].var.value().numel();
        if (pick < n) {
          which = i;
          break;
        }
        pick -= n;
      }
      Var v = probes[which].var;
      Tensor& x = v.mutable_value();
      const double saved = x[pick];
      // Shrink the step when it straddles a kink; give up on the coordinate
      // after three sizes.
      double numeric = 0;
      bool smooth = false;
      for (double step = h; !smooth && step >= h * 1e-2; step *= 0.1) {
        std::uint64_t print_plus = 0, print_minus = 0;
        x[pick] = saved + step;
        const double f_plus = evaluate(objective, &print_plus);
        x[pick] = saved - step;
        const double f_minus = evaluate(objective, &print_minus);
        x[pick] = saved;
        smooth = print_plus == base_print && print_minus == base_print;
        numeric = (f_plus - f_minus) / (2.0 * step);
      }
      if (!smooth) {
        ++gr.rejected;
        continue;
      }
      const double a = analytic[which][pick];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), opts.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++gr.checked;
      gr.max_rel_error = std::max(gr.max_rel_error, rel);
      break;
    }
  }
  for (const std::string& g : order) {
    GroupResult& gr = groups[g];
    gr.pass = gr.checked > 0 && gr.max_rel_error < opts.tolerance;
    result.checked += gr.checked;
    result.rejected += gr.rejected;
    if (gr.max_rel_error >= result.max_rel_error) {
      result.max_rel_error = gr.max_rel_error;
      result.worst_group = g;
    }
    result.pass = result.pass && gr.pass;
    result.groups.push_back(gr);
  }
  return result;
}

GradcheckReport run_gradcheck(const ModelConfig& cfg,
                              const GradcheckOptions& opts) {
  if (cfg.profile != Profile::kToy) {
    throw ConfigError("gradient checks run on the toy profile only");
  }
  cfg.validate();
  GradcheckReport report;
  report.tolerance = opts.tolerance;
  std::mt19937_64 rng(opts.seed);
  const GtNet model(cfg, init_parameters(cfg, opts.seed));
  const ParamStore& params = model.params();
  const auto shapes = pyramid_shapes(cfg);
  const AblationSpec& ab = cfg.ablation;
  const int side = cfg.input_size;

  // Backbone: one branch with a projection of every pyramid level.
  {
    const Branch branch = ab.uses_motion() ? Branch::kMotion : Branch::kAppearance;
    Var image = Var::parameter(random_tensor({3, side, side}, rng, true));
    std::vector<Tensor> r;
    for (const auto& s : shapes) r.push_back(random_tensor(s, rng, false));
    auto probes = probes_with_prefix(params, branch_prefix(branch));
    probes.push_back({"input.image", image});
    auto objective = [&] {
      FeaturePyramid p = extract_pyramid(params, cfg, image, branch);
      Var total = project(p.level(1), r[0]);
      for (int k = 2; k <= 5; ++k) total = add(total, project(p.level(k), r[k - 1]));
      return total;
    };
    report.modules.push_back(check_gradients("backbone", objective, probes, opts));
  }

  // Modulator: implicit guidance at every level.
  {
    std::vector<GradProbe> probes;
    std::vector<Var> fa, fm;
    std::vector<Tensor> r;
    if (ab.uses_modulator()) {
      probes = probes_with_prefix(params, "modulator.");
      for (int k = 1; k <= 5; ++k) {
        fa.push_back(Var::parameter(random_tensor(shapes[k - 1], rng, false)));
        fm.push_back(Var::parameter(random_tensor(shapes[k - 1], rng, false)));
        r.push_back(random_tensor(shapes[k - 1], rng, false));
        probes.push_back({"input.f_a", fa.back()});
        probes.push_back({"input.f_m", fm.back()});
      }
    }
    auto objective = [&] {
      Var total;
      for (int k = 1; k <= 5; ++k) {
        Var term = project(implicit_guidance_fuse(
                               fa[k - 1], fm[k - 1],
                               modulator_params(params, cfg, k)),
                           r[k - 1]);
        total = total.defined() ? add(total, term) : term;
      }
      return total;
    };
    report.modules.push_back(check_gradients("modulator", objective, probes, opts));
  }

  // Decoder: one partial decoder fed with random top-level features.
  {
    const EffectiveGraph g = apply_ablation(ab);
    std::string decoder;
    if (g.teacher_partial_decoder) {
      decoder = std::string(kTeacherDecoder);
    } else if (g.student_partial_decoder) {
      decoder = std::string(kStudentDecoder);
    }
    std::vector<GradProbe> probes;
    std::array<Var, 3> f;
    Tensor r;
    if (!decoder.empty()) {
      probes = probes_with_prefix(params, decoder + ".");
      for (int k = 3; k <= 5; ++k) {
        f[k - 3] = Var::parameter(random_tensor(shapes[k - 1], rng, false));
        probes.push_back({"input.f" + std::to_string(k), f[k - 3]});
      }
      r = random_tensor({1, shapes[2][1], shapes[2][2]}, rng, false);
    }
    auto objective = [&] {
      return project(partial_decode(params, decoder, f[0], f[1], f[2]).logits, r);
    };
    report.modules.push_back(check_gradients("decoder", objective, probes, opts));
  }

  // End to end: supervised loss of every produced map.
  {
    const Tensor frame = random_tensor({3, side, side}, rng, true);
    const Tensor flow = random_tensor({3, side, side}, rng, true);
    Tensor gt({1, side, side}, 0.0);
    const double cx = side * 0.4, cy = side * 0.55, rad = side * 0.25;
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) < rad) gt.at(0, y, x) = 1.0;
      }
    }
    std::vector<GradProbe> probes;
    for (const auto& [name, var] : params.items()) {
      probes.push_back({param_group(name), var});
    }
    auto objective = [&] {
      const ModelOutput out = model.forward(frame, &flow);
      Var loss;
      for (const Var* logits : {&out.z_a_logits, &out.z_m_logits}) {
        if (!logits->defined()) continue;
        Var term = bce_with_logits_mean(*logits, gt);
        loss = loss.defined() ? add(loss, term) : term;
      }
      return loss;
    };
    report.modules.push_back(check_gradients("gtnet", objective, probes, opts));
  }

  for (const ModuleResult& m : report.modules) report.pass = report.pass && m.pass;
  return report;
}

std::string gradcheck_text(const GradcheckReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %14s  %s\n", "module",
                "checked", "kinks", "max_rel_err", "worst group");
  out += buf;
  for (const ModuleResult& m : report.modules) {
    std::snprintf(buf, sizeof buf, "%-10s %8d %8d %14.3e  %s %s\n",
                  m.module.c_str(), m.checked, m.rejected, m.max_rel_error,
                  m.worst_group.empty() ? "-" : m.worst_group.c_str(),
                  m.pass ? "PASS" : "FAIL");
    out += buf;
  }
  for (const ModuleResult& m : report.modules) {
    for (const GroupResult& g : m.groups) {
      if (g.pass) continue;
      std::snprintf(buf, sizeof buf, "  failing group %s (%s): %.3e\n",
                    g.group.c_str(), m.module.c_str(), g.max_rel_error);
      out += buf;
    }
  }
  std::snprintf(buf, sizeof buf, "overall: %s (tolerance %.1e)\n",
                report.pass ? "PASS" : "FAIL", report.tolerance);
  out += buf;
  return out;
}

std::string gradcheck_json(const GradcheckReport& report) {
  json modules = json::array();
  for (const ModuleResult& m : report.modules) {
    json groups = json::array();
    for (const GroupResult& g : m.groups) {
      groups.push_back({{"group", g.group},
                        {"checked", g.checked},
                        {"rejected_kinks", g.rejected},
                        {"max_rel_error", g.max_rel_error},
                        {"pass", g.pass}});
    }
    modules.push_back({{"module", m.module},
                       {"checked", m.checked},
                       {"rejected_kinks", m.rejected},
                       {"max_rel_error", m.max_rel_error},
                       {"worst_group", m.worst_group},
                       {"pass", m.pass},
                       {"groups", groups}});
  }
  json j{{"tolerance", report.tolerance},
         {"pass", report.pass},
         {"modules", modules}};
  return j.dump(2) + "\n";
}

}  // namespace vsod
