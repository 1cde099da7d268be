// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/gradcheck_suite.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "ahdr/errors.hpp"
#include "ahdr/gradcheck.hpp"
#include "ahdr/hdr_domain.hpp"
#include "ahdr/network.hpp"
#include "ahdr/ops.hpp"
#include "ahdr/rng.hpp"
#include "ahdr/training.hpp"

namespace ahdr {

namespace {

using D = double;
using T = Tensor<D>;
using Fn = ScalarFn<D>;

constexpr D kEps = 1e-6;
// Smaller step for whole networks: fewer ReLU kinks fall inside the stencil.
constexpr D kNetworkEps = 1e-7;
// conv is linear in each leaf, so a large step only shrinks rounding error.
constexpr D kLinearEps = 1e-3;

constexpr std::array<std::string_view, 22> kGroups = {
    "conv",   "relu", "sigmoid", "clamp", "abs",   "square", "scale",     "add",       "sub",      "mul",     "concat",
    "slice",  "sum",  "mean",    "tonemap", "l1",  "l2",     "attention", "drdb",      "resblock", "network", "ablations"};

Array<D> uniform(const Shape& s, Rng& rng, D lo, D hi) {
  Array<D> a(s);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(lo, hi);
  return a;
}

/// |x| in [lo, hi] with random sign, keeping kinks out of reach of eps.
Array<D> signed_away(const Shape& s, Rng& rng, D lo = 0.1, D hi = 1.0) {
  Array<D> a(s);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(lo, hi);
  return a;
}

T leaf(Array<D> a) { return T(std::move(a), true); }

/// sum(r * y) for a fixed random r, so every output element matters.
T weighted(Tape<D>& tape, const T& y, const Array<D>& r) { return sum(tape, mul(tape, y, T(r))); }

class Runner {
 public:
  explicit Runner(std::uint64_t seed) : rng_(seed) {}

  Rng& rng() { return rng_; }

  /// Checks every listed leaf, at most `per_leaf` sampled entries each.
  void check(const std::string& group, const std::string& name, const Fn& f, const std::vector<T>& leaves,
             double tolerance = kOpTolerance, std::size_t per_leaf = 0,
             ErrorMetric metric = ErrorMetric::kElementwise, D eps = kEps) {
    GradCheckCase c;
    c.group = group;
    c.name = name;
    c.metric = metric;
    c.tolerance = tolerance;
    for (const T& l : leaves) {
      std::vector<std::size_t> idx;
      const std::size_t n = l.value().size();
      if (per_leaf > 0 && n > per_leaf) {
        for (std::size_t k = 0; k < per_leaf; ++k) idx.push_back(rng_.index(n));
      }
      const GradCheckResult r = check_leaf_gradient<D>(f, l, eps, idx);
      if (r.max_rel_error >= c.max_rel_error) {
        c.worst_analytic = r.worst_analytic;
        c.worst_numeric = r.worst_numeric;
      }
      c.max_rel_error = std::max(c.max_rel_error, r.max_rel_error);
      c.error = std::max(c.error, metric == ErrorMetric::kElementwise ? r.max_rel_error : r.norm_rel_error);
      c.checked += r.checked;
    }
    results_.push_back(std::move(c));
  }

  /// Unary op on x0; `s` is the output shape.
  void unary(const std::string& group, const std::string& name, const Shape& s, Array<D> x0,
             const std::function<T(Tape<D>&, const T&)>& op) {
    const T x = leaf(std::move(x0));
    const Array<D> r = uniform(s, rng_, -1.0, 1.0);
    check(group, name, [=](Tape<D>& tape) { return weighted(tape, op(tape, x), r); }, {x});
  }

  std::vector<GradCheckCase> take() { return std::move(results_); }

 private:
  Rng rng_;
  std::vector<GradCheckCase> results_;
};

std::vector<T> param_leaves(const NetworkParams<D>& p) {
  std::vector<T> out;
  for (const auto& n : p.named()) out.push_back(n.tensor);
  return out;
}

/// Random non-zero weights and biases so no path is trivially dead.
void randomize(const NetworkParams<D>& p, Rng& rng, D scale) {
  for (const auto& n : p.named()) {
    T t = n.tensor;
    Array<D>& v = t.mutable_value();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(-scale, scale);
  }
}

void conv_group(Runner& run) {
  struct Case {
    const char* name;
    ConvSpec spec;
    std::size_t n, h, w;
  };
  const Case cases[] = {
      {"conv3x3", {2, 3, 3, 1}, 2, 5, 4},
      {"conv3x3_dilated", {3, 2, 3, 2}, 1, 6, 7},
      {"conv1x1", {4, 3, 1, 1}, 2, 3, 3},
  };
  for (const Case& c : cases) {
    const T x = leaf(uniform({c.n, c.spec.in_channels, c.h, c.w}, run.rng(), -1, 1));
    const T w = leaf(uniform(c.spec.weight_shape(), run.rng(), -1, 1));
    const T b = leaf(uniform(c.spec.bias_shape(), run.rng(), -1, 1));
    const Array<D> r = uniform({c.n, c.spec.out_channels, c.h, c.w}, run.rng(), -1, 1);
    const ConvSpec spec = c.spec;
    run.check("conv", c.name, [=](Tape<D>& tape) { return weighted(tape, conv2d(tape, x, w, b, spec), r); },
              {x, w, b}, kOpTolerance, 0, ErrorMetric::kElementwise, kLinearEps);
  }
}

void elementwise_groups(Runner& run, const std::string& g) {
  const Shape s{2, 3, 3, 4};
  Rng& rng = run.rng();
  if (g == "relu") run.unary(g, "relu", s, signed_away(s, rng), [](Tape<D>& t, const T& x) { return relu(t, x); });
  if (g == "sigmoid") {
    run.unary(g, "sigmoid", s, uniform(s, rng, -6, 6), [](Tape<D>& t, const T& x) { return sigmoid(t, x); });
  }
  if (g == "clamp") {
    // Values kept clear of both bounds.
    Array<D> x(s);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = rng.uniform();
      x[i] = u < 0.3 ? rng.uniform(-1.0, -0.1) : (u < 0.7 ? rng.uniform(0.1, 0.9) : rng.uniform(1.1, 2.0));
    }
    run.unary(g, "clamp", s, x, [](Tape<D>& t, const T& v) { return clamp(t, v, 0.0, 1.0); });
  }
  if (g == "abs") run.unary(g, "abs", s, signed_away(s, rng), [](Tape<D>& t, const T& x) { return abs(t, x); });
  if (g == "square") {
    run.unary(g, "square", s, uniform(s, rng, -2, 2), [](Tape<D>& t, const T& x) { return square(t, x); });
  }
  if (g == "scale") {
    run.unary(g, "scale", s, uniform(s, rng, -2, 2), [](Tape<D>& t, const T& x) { return scale(t, x, -1.75); });
  }
  if (g == "add" || g == "sub" || g == "mul") {
    const T a = leaf(uniform(s, rng, -2, 2));
    const T b = leaf(uniform(s, rng, -2, 2));
    const Array<D> r = uniform(s, rng, -1, 1);
    const std::string op = g;
    const auto apply = [op](Tape<D>& t, const T& x, const T& y) {
      return op == "add" ? add(t, x, y) : (op == "sub" ? sub(t, x, y) : mul(t, x, y));
    };
    run.check(g, g, [=](Tape<D>& t) { return weighted(t, apply(t, a, b), r); }, {a, b});
    // Same tensor on both sides: gradients from both operands must accumulate.
    run.check(g, g + "_shared", [=](Tape<D>& t) { return weighted(t, apply(t, a, a), r); }, {a});
  }
  if (g == "sum") run.unary(g, "sum", {1, 1, 1, 1}, uniform(s, rng, -2, 2), [](Tape<D>& t, const T& x) {
    return scale(t, sum(t, x), 1.0);
  });
  if (g == "mean") run.unary(g, "mean", {1, 1, 1, 1}, uniform(s, rng, -2, 2), [](Tape<D>& t, const T& x) {
    return scale(t, mean(t, x), 1.0);
  });
}

void structural_groups(Runner& run, const std::string& g) {
  Rng& rng = run.rng();
  if (g == "concat") {
    const T a = leaf(uniform({2, 2, 3, 3}, rng, -1, 1));
    const T b = leaf(uniform({2, 3, 3, 3}, rng, -1, 1));
    const Array<D> r = uniform({2, 7, 3, 3}, rng, -1, 1);
    run.check(g, "concat", [=](Tape<D>& t) { return weighted(t, concat_channels(t, {a, b, a}), r); }, {a, b});
  }
  if (g == "slice") {
    const Shape s{2, 6, 3, 2};
    run.unary(g, "slice", {2, 3, 3, 2}, uniform(s, rng, -1, 1),
              [](Tape<D>& t, const T& x) { return slice_channels(t, x, 2, 5); });
  }
  if (g == "tonemap") {
    const Shape s{1, 3, 4, 4};
    run.unary(g, "tonemap", s, uniform(s, rng, 0.02, 1.0),
              [](Tape<D>& t, const T& x) { return mu_law_tonemap(t, x, TonemapParams{5000.0}); });
  }
  if (g == "l1" || g == "l2") {
    const Shape s{2, 3, 4, 4};
    Array<D> p = uniform(s, rng, 0.15, 0.85);
    Array<D> q(s);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = p[i] + (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(0.05, 0.12);
    const T pred = leaf(p);
    const T gt = leaf(q);
    const bool l1 = g == "l1";
    run.check(g, g, [=](Tape<D>& t) { return l1 ? loss_l1(t, pred, gt) : loss_l2(t, pred, gt); }, {pred, gt});
  }
}

void block_groups(Runner& run, const std::string& g) {
  Rng& rng = run.rng();
  const std::size_t c = 4;
  const Shape s{1, c, 5, 5};
  if (g == "attention") {
    NetConfig cfg;
    cfg.base_channels = c;
    cfg.growth_rate = 2;
    cfg.num_drdb = 1;
    const NetworkParams<D> p = allocate_params<D>(cfg);
    randomize(p, rng, 0.4);
    const AttentionParams<D> a = *p.attention_low;
    const T zi = leaf(uniform(s, rng, 0, 1));
    const T zr = leaf(uniform(s, rng, 0, 1));
    const Array<D> r = uniform(s, rng, -1, 1);
    std::vector<T> leaves{zi, zr, a.conv1.weight, a.conv1.bias, a.conv2.weight, a.conv2.bias};
    run.check(g, "attention", [=](Tape<D>& t) { return weighted(t, attend(t, zi, attention_forward(t, zi, zr, a)), r); },
              leaves, kOpTolerance, 0, ErrorMetric::kNormwise);
  }
  if (g == "drdb" || g == "resblock") {
    NetConfig cfg = NetConfig::for_variant(g == "drdb" ? Variant::kAhdr : Variant::kRb);
    cfg.base_channels = c;
    cfg.growth_rate = 3;
    cfg.num_drdb = 1;
    const NetworkParams<D> p = allocate_params<D>(cfg);
    randomize(p, rng, 0.3);
    const T x = leaf(uniform(s, rng, -1, 1));
    const Array<D> r = uniform(s, rng, -1, 1);
    std::vector<T> leaves{x};
    if (g == "drdb") {
      const DrdbParams<D> d = p.drdbs[0];
      for (const auto& layer : d.dense) leaves.insert(leaves.end(), {layer.weight, layer.bias});
      leaves.insert(leaves.end(), {d.compress.weight, d.compress.bias});
      run.check(g, "drdb", [=](Tape<D>& t) { return weighted(t, drdb_forward(t, x, d, cfg), r); }, leaves,
                kOpTolerance, 0, ErrorMetric::kNormwise);
    } else {
      const ResBlockParams<D> b = p.res_blocks[0];
      leaves.insert(leaves.end(), {b.conv1.weight, b.conv1.bias, b.conv2.weight, b.conv2.bias});
      run.check(g, "resblock", [=](Tape<D>& t) { return weighted(t, res_block_forward(t, x, b), r); }, leaves,
                kOpTolerance, 0, ErrorMetric::kNormwise);
    }
  }
}

void network_case(Runner& run, const std::string& group, Variant v, std::size_t per_leaf) {
  Rng& rng = run.rng();
  NetConfig sizes;
  sizes.base_channels = 8;
  sizes.growth_rate = 4;
  sizes.num_drdb = 1;
  const NetConfig cfg = NetConfig::for_variant(v, sizes);
  const NetworkParams<D> p = build_variant<D>(cfg, rng.index(1u << 30));
  // Non-zero biases keep every unit's pre-activation away from exact ties.
  for (const auto& n : p.named()) {
    if (n.name.ends_with(".bias")) {
      T t = n.tensor;
      for (D& b : t.mutable_value().span()) b = rng.uniform(-0.05, 0.05);
    }
  }
  const Shape s{1, 3, 8, 8};
  std::array<T, 3> x;
  const int biases[3] = {-2, 0, 2};
  for (int f = 0; f < 3; ++f) {
    const Array<D> ldr = uniform(s, rng, 0.05, 0.95);
    x[f] = leaf(build_input(ldr, std::ldexp(1.0, biases[f])));
  }
  const Array<D> r = uniform(s, rng, -1, 1);
  std::vector<T> leaves = param_leaves(p);
  leaves.insert(leaves.end(), x.begin(), x.end());
  run.check(group, std::string(variant_name(v)),
            [=](Tape<D>& t) { return weighted(t, ahdr_forward(t, x[0], x[1], x[2], p, cfg).hdr, r); }, leaves,
            kNetworkTolerance, per_leaf, ErrorMetric::kNormwise, kNetworkEps);
}

}  // namespace

std::span<const std::string_view> gradcheck_groups() { return kGroups; }

std::vector<GradCheckCase> run_gradcheck(std::span<const std::string> groups, std::uint64_t seed) {
  std::vector<std::string> selected;
  const bool all = groups.empty() || std::find(groups.begin(), groups.end(), "all") != groups.end();
  if (all) {
    selected.assign(kGroups.begin(), kGroups.end());
  } else {
    for (const std::string& g : groups) {
      if (std::find(kGroups.begin(), kGroups.end(), g) == kGroups.end()) {
        throw ConfigError("unknown gradcheck group '" + g + "'");
      }
      selected.push_back(g);
    }
  }
  Runner run(seed);
  for (const std::string& g : selected) {
    if (g == "conv") {
      conv_group(run);
    } else if (g == "network") {
      network_case(run, g, Variant::kAhdr, 0);
    } else if (g == "ablations") {
      for (Variant v : {Variant::kDrdb, Variant::kARdb, Variant::kRb, Variant::kNoGrl}) network_case(run, g, v, 0);
    } else if (g == "attention" || g == "drdb" || g == "resblock") {
      block_groups(run, g);
    } else if (g == "concat" || g == "slice" || g == "tonemap" || g == "l1" || g == "l2") {
      structural_groups(run, g);
    } else {
      elementwise_groups(run, g);
    }
  }
  return run.take();
}

}  // namespace ahdr
