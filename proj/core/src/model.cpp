// Copyright 2026 The graspstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graspstack/model.hpp"

#include <cmath>
#include <stdexcept>

#include "graspstack/losses.hpp"
#include "graspstack/quant.hpp"
#include "graspstack/rng.hpp"

namespace graspstack {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::Dense: return "dense";
    case LayerKind::ReLU: return "relu";
    case LayerKind::MaxPool2D: return "max_pool2d";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::GlobalAvgPool: return "global_avg_pool";
    case LayerKind::Softmax: return "softmax";
  }
  return "unknown";
}

std::optional<LayerKind> layer_kind_from_string(std::string_view name) {
  for (auto k : {LayerKind::Conv2D, LayerKind::Dense, LayerKind::ReLU, LayerKind::MaxPool2D,
                 LayerKind::Dropout, LayerKind::Flatten, LayerKind::GlobalAvgPool,
                 LayerKind::Softmax}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Layer Layer::conv2d(std::size_t kh, std::size_t kw, std::size_t filters, Conv2DSpec spec) {
  Layer l;
  l.kind = LayerKind::Conv2D;
  l.kernel = {kh, kw};
  l.conv = spec;
  l.units = filters;
  return l;
}

Layer Layer::dense(std::size_t units) {
  Layer l;
  l.kind = LayerKind::Dense;
  l.units = units;
  return l;
}

Layer Layer::relu() { return Layer{}; }

Layer Layer::max_pool(std::size_t ph, std::size_t pw) {
  Layer l;
  l.kind = LayerKind::MaxPool2D;
  l.window = {ph, pw};
  return l;
}

Layer Layer::dropout(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rate must be in [0, 1)");
  Layer l;
  l.kind = LayerKind::Dropout;
  l.rate = rate;
  return l;
}

Layer Layer::flatten() {
  Layer l;
  l.kind = LayerKind::Flatten;
  return l;
}

Layer Layer::global_avg_pool() {
  Layer l;
  l.kind = LayerKind::GlobalAvgPool;
  return l;
}

Layer Layer::softmax() {
  Layer l;
  l.kind = LayerKind::Softmax;
  return l;
}

std::size_t Layer::param_count() const { return has_params() ? weights.size() + bias.size() : 0; }

namespace {

[[noreturn]] void compose_error(const std::string& where, const Layer& l, const std::string& why) {
  throw ShapeError(where + " (" + std::string(to_string(l.kind)) + "): " + why);
}

void check_or_alloc(Tensor& t, const Shape& want, const std::string& where, const Layer& l,
                    const char* what) {
  if (t.empty()) {
    t = Tensor(want);
  } else if (t.shape() != want) {
    compose_error(where, l, std::string(what) + " " + shape_str(t.shape()) + " expected " +
                                shape_str(want));
  }
}

Shape propagate(Layer& l, const Shape& in, const std::string& where) {
  l.in_shape = in;
  switch (l.kind) {
    case LayerKind::Conv2D: {
      if (in.size() != 3) compose_error(where, l, "needs H x W x C input, got " + shape_str(in));
      if (l.units == 0 || l.kernel[0] == 0 || l.kernel[1] == 0) {
        compose_error(where, l, "kernel and filter counts must be positive");
      }
      const auto oh = conv_out_dim(in[0], l.kernel[0], l.conv.stride[0], l.conv.padding);
      const auto ow = conv_out_dim(in[1], l.kernel[1], l.conv.stride[1], l.conv.padding);
      if (oh == 0 || ow == 0) {
        compose_error(where, l, "kernel " + std::to_string(l.kernel[0]) + "x" +
                                    std::to_string(l.kernel[1]) + " does not fit input " +
                                    shape_str(in));
      }
      check_or_alloc(l.weights, {l.kernel[0], l.kernel[1], in[2], l.units}, where, l, "kernels");
      check_or_alloc(l.bias, {l.units}, where, l, "bias");
      l.out_shape = {oh, ow, l.units};
      break;
    }
    case LayerKind::Dense:
      if (in.size() != 1) compose_error(where, l, "needs a flat input, got " + shape_str(in));
      if (l.units == 0) compose_error(where, l, "unit count must be positive");
      check_or_alloc(l.weights, {in[0], l.units}, where, l, "weights");
      check_or_alloc(l.bias, {l.units}, where, l, "bias");
      l.out_shape = {l.units};
      break;
    case LayerKind::MaxPool2D: {
      if (in.size() != 3) compose_error(where, l, "needs H x W x C input, got " + shape_str(in));
      if (l.window[0] == 0 || l.window[1] == 0) compose_error(where, l, "window must be positive");
      const auto oh = in[0] / l.window[0];
      const auto ow = in[1] / l.window[1];
      if (oh == 0 || ow == 0) compose_error(where, l, "window larger than input " + shape_str(in));
      l.out_shape = {oh, ow, in[2]};
      break;
    }
    case LayerKind::GlobalAvgPool:
      if (in.size() != 3) compose_error(where, l, "needs H x W x C input, got " + shape_str(in));
      l.out_shape = {in[2]};
      break;
    case LayerKind::Flatten:
      l.out_shape = {shape_size(in)};
      break;
    case LayerKind::ReLU:
    case LayerKind::Dropout:
      l.out_shape = in;
      break;
    case LayerKind::Softmax:
      if (in.size() != 1) compose_error(where, l, "needs a flat input, got " + shape_str(in));
      l.out_shape = in;
      break;
  }
  return l.out_shape;
}

Shape batched(std::size_t b, const Shape& s) {
  Shape out{b};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

Tensor apply_layer(const Layer& l, const Tensor& x, const Tensor& w) {
  switch (l.kind) {
    case LayerKind::Conv2D: return conv2d(x, w, l.bias, l.conv);
    case LayerKind::Dense: return dense(x, w, l.bias);
    case LayerKind::ReLU: return relu(x);
    case LayerKind::MaxPool2D: return max_pool2d(x, l.window);
    case LayerKind::GlobalAvgPool: return global_avg_pool(x);
    case LayerKind::Flatten: return x.reshaped({x.dim(0), shape_size(l.out_shape)});
    case LayerKind::Softmax: return softmax(x);
    case LayerKind::Dropout: return x;
  }
  return x;
}

// Runs a layer chain on a batch; records intermediate values when `rec` is set.
Tensor run_chain(const std::vector<Layer>& layers, Tensor x, const StepOptions* opt, Rng* rng,
                 std::vector<LayerRecord>* rec) {
  for (const Layer& l : layers) {
    LayerRecord r;
    const Tensor* w = &l.weights;
    if (l.has_params() && opt && opt->fake_quant) {
      r.effective_weights = fake_quantize(l.weights, calibrate_quant(l.weights));
      w = &r.effective_weights;
    }
    Tensor y;
    if (l.kind == LayerKind::Dropout && opt && opt->dropout && l.rate > 0.0) {
      r.mask = Tensor(x.shape());
      y = Tensor(x.shape());
      const double keep = 1.0 / (1.0 - l.rate);
      // one 32-bit draw per element, two elements per engine call
      const auto drop_below = static_cast<std::uint64_t>(std::ldexp(l.rate, 32));
      const std::size_t n = x.size();
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 2 == 0) bits = rng->next_u64();
        const std::uint64_t u = (i % 2 == 0) ? (bits & 0xffffffffu) : (bits >> 32);
        const double m = u < drop_below ? 0.0 : keep;
        r.mask[i] = m;
        y[i] = x[i] * m;
      }
    } else {
      y = apply_layer(l, x, *w);
    }
    if (l.has_params() && opt && opt->fake_quant) y = fake_quantize(y, calibrate_quant(y));
    if (rec) {
      r.input = std::move(x);
      if (!opt || opt->keep_outputs || l.kind == LayerKind::Softmax) r.output = y;
      rec->push_back(std::move(r));
    }
    x = std::move(y);
  }
  return x;
}

Tensor as_batch(const ModelGraph& model, const Tensor& input, bool& was_single) {
  if (input.shape() == model.input_shape) {
    was_single = true;
    return input.reshaped(batched(1, model.input_shape));
  }
  if (input.rank() == model.input_shape.size() + 1 &&
      Shape(input.shape().begin() + 1, input.shape().end()) == model.input_shape) {
    was_single = false;
    return input;
  }
  throw ShapeError("model '" + model.name + "' expects input " + shape_str(model.input_shape) +
                   ", got " + shape_str(input.shape()));
}

Tensor unbatch(const Tensor& t) { return t.reshaped(Shape(t.shape().begin() + 1, t.shape().end())); }

Tensor backward_chain(const std::vector<Layer>& layers, const std::vector<LayerRecord>& recs,
                      Tensor grad, std::vector<LayerGrads>& out, bool need_input_grad) {
  out.assign(layers.size(), {});
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Layer& l = layers[i];
    const LayerRecord& r = recs[i];
    const bool want_input = need_input_grad || i > 0;
    switch (l.kind) {
      case LayerKind::Conv2D: {
        const Tensor& w = r.effective_weights.empty() ? l.weights : r.effective_weights;
        auto g = conv2d_backward(r.input, w, l.conv, grad, want_input);
        out[i] = {std::move(g.kernels), std::move(g.bias)};
        grad = std::move(g.input);
        break;
      }
      case LayerKind::Dense: {
        const Tensor& w = r.effective_weights.empty() ? l.weights : r.effective_weights;
        auto g = dense_backward(r.input, w, grad, want_input);
        out[i] = {std::move(g.weights), std::move(g.bias)};
        grad = std::move(g.input);
        break;
      }
      case LayerKind::ReLU: grad = relu_backward(r.input, grad); break;
      case LayerKind::MaxPool2D: grad = max_pool2d_backward(r.input, l.window, grad); break;
      case LayerKind::GlobalAvgPool: grad = global_avg_pool_backward(r.input, grad); break;
      case LayerKind::Flatten: grad = grad.reshaped(r.input.shape()); break;
      case LayerKind::Softmax: grad = softmax_backward(r.output, grad); break;
      case LayerKind::Dropout:
        if (!r.mask.empty()) {
          for (std::size_t k = 0; k < grad.size(); ++k) grad[k] *= r.mask[k];
        }
        break;
    }
  }
  return grad;
}

}  // namespace

void ModelGraph::finalize() {
  if (input_shape.empty()) throw ShapeError("model '" + name + "' has no input shape");
  if (heads.empty()) throw ShapeError("model '" + name + "' has no output heads");
  Shape s = input_shape;
  for (std::size_t i = 0; i < trunk.size(); ++i) {
    s = propagate(trunk[i], s, "trunk layer " + std::to_string(i));
  }
  for (std::size_t h = 0; h < heads.size(); ++h) {
    Shape hs = s;
    for (std::size_t i = 0; i < heads[h].layers.size(); ++i) {
      hs = propagate(heads[h].layers[i], hs,
                     "head '" + heads[h].name + "' layer " + std::to_string(i));
    }
    if (hs.size() != 1) {
      throw ShapeError("head '" + heads[h].name + "' must end in a flat output, got " +
                       shape_str(hs));
    }
  }
}

void ModelGraph::init_params(std::uint64_t seed) {
  Rng rng(seed);
  auto init = [&rng](Layer& l) {
    if (!l.has_params()) return;
    std::size_t fan_in, fan_out;
    if (l.kind == LayerKind::Conv2D) {
      const std::size_t field = l.kernel[0] * l.kernel[1];
      fan_in = field * l.weights.dim(2);
      fan_out = field * l.units;
    } else {
      fan_in = l.weights.dim(0);
      fan_out = l.units;
    }
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : l.weights.data()) w = rng.uniform(-limit, limit);
    l.bias.fill(0.0);
    l.quant.reset();
  };
  for (Layer& l : trunk) init(l);
  for (Head& h : heads) {
    for (Layer& l : h.layers) init(l);
  }
  input_exp.reset();
}

std::size_t ModelGraph::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : trunk) n += l.param_count();
  for (const Head& h : heads) {
    for (const Layer& l : h.layers) n += l.param_count();
  }
  return n;
}

Shape ModelGraph::trunk_output_shape() const {
  return trunk.empty() ? input_shape : trunk.back().out_shape;
}

Shape ModelGraph::head_output_shape(std::size_t head) const {
  const Head& h = heads.at(head);
  return h.layers.empty() ? trunk_output_shape() : h.layers.back().out_shape;
}

std::vector<Tensor> forward(const ModelGraph& model, const Tensor& input) {
  bool single = false;
  Tensor x = run_chain(model.trunk, as_batch(model, input, single), nullptr, nullptr, nullptr);
  std::vector<Tensor> outs;
  for (const Head& h : model.heads) {
    Tensor y = run_chain(h.layers, x, nullptr, nullptr, nullptr);
    outs.push_back(single ? unbatch(y) : std::move(y));
  }
  return outs;
}

Tensor forward_logits(const ModelGraph& model, const Tensor& input) {
  bool single = false;
  Tensor x = run_chain(model.trunk, as_batch(model, input, single), nullptr, nullptr, nullptr);
  const Head& h = model.heads.front();
  std::vector<Layer> chain = h.layers;
  if (!chain.empty() && chain.back().kind == LayerKind::Softmax) {
    chain.pop_back();
    x = run_chain(chain, x, nullptr, nullptr, nullptr);
  } else if (chain.empty() && !model.trunk.empty() &&
             model.trunk.back().kind == LayerKind::Softmax) {
    // softmax lives in the trunk: rerun without it
    std::vector<Layer> t(model.trunk.begin(), model.trunk.end() - 1);
    x = run_chain(t, as_batch(model, input, single), nullptr, nullptr, nullptr);
  } else {
    x = run_chain(chain, x, nullptr, nullptr, nullptr);
  }
  return single ? unbatch(x) : x;
}

Tape record_forward(const ModelGraph& model, const Tensor& batch_input, const StepOptions& opt) {
  bool single = false;
  Tensor x = as_batch(model, batch_input, single);
  if (opt.fake_quant) x = fake_quantize(x, calibrate_quant(x));
  Rng rng(opt.seed);
  Tape tape;
  x = run_chain(model.trunk, std::move(x), &opt, &rng, &tape.trunk);
  for (const Head& h : model.heads) {
    tape.heads.emplace_back();
    tape.outputs.push_back(run_chain(h.layers, x, &opt, &rng, &tape.heads.back()));
  }
  return tape;
}

namespace {

LossValue loss_and_grads(const ModelGraph& model, const Tape& tape, const Batch& batch,
                         std::vector<Tensor>* grads) {
  if (batch.targets.size() != model.heads.size()) {
    throw std::invalid_argument("batch has " + std::to_string(batch.targets.size()) +
                                " targets for " + std::to_string(model.heads.size()) + " heads");
  }
  LossValue lv;
  for (std::size_t h = 0; h < model.heads.size(); ++h) {
    Tensor g;
    double loss = 0.0;
    if (model.heads[h].loss == HeadLoss::CrossEntropy) {
      loss = cross_entropy_batch(tape.outputs[h], batch.targets[h].labels, grads ? &g : nullptr);
    } else {
      loss = mae_batch(tape.outputs[h], batch.targets[h].values, grads ? &g : nullptr);
    }
    lv.per_head.push_back(loss);
    lv.total += loss;
    if (grads) grads->push_back(std::move(g));
  }
  return lv;
}

}  // namespace

LossValue batch_loss(const ModelGraph& model, const Tape& tape, const Batch& batch) {
  return loss_and_grads(model, tape, batch, nullptr);
}

LossValue compute_gradients(const ModelGraph& model, const Batch& batch, const StepOptions& opt,
                            Gradients& grads) {
  if (batch.size() == 0) throw std::invalid_argument("empty batch");
  StepOptions lean = opt;
  lean.keep_outputs = false;
  const Tape tape = record_forward(model, batch.inputs, lean);
  std::vector<Tensor> out_grads;
  const LossValue lv = loss_and_grads(model, tape, batch, &out_grads);

  grads.heads.assign(model.heads.size(), {});
  Tensor trunk_grad;
  for (std::size_t h = 0; h < model.heads.size(); ++h) {
    Tensor g = backward_chain(model.heads[h].layers, tape.heads[h], std::move(out_grads[h]),
                              grads.heads[h], true);
    if (trunk_grad.empty()) {
      trunk_grad = std::move(g);
    } else {
      for (std::size_t i = 0; i < g.size(); ++i) trunk_grad[i] += g[i];
    }
  }
  backward_chain(model.trunk, tape.trunk, std::move(trunk_grad), grads.trunk, false);
  return lv;
}

StepResult train_step(ModelGraph& model, const Batch& batch, double lr, const StepOptions& opt) {
  Gradients grads;
  const LossValue lv = compute_gradients(model, batch, opt, grads);
  StepResult res{lv.total, !std::isfinite(lv.total)};
  if (res.aborted || lr == 0.0) return res;
  auto apply = [lr](std::vector<Layer>& layers, std::vector<LayerGrads>& g) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (!layers[i].has_params()) continue;
      auto w = layers[i].weights.data();
      auto b = layers[i].bias.data();
      for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * g[i].weights[k];
      for (std::size_t k = 0; k < b.size(); ++k) b[k] -= lr * g[i].bias[k];
      layers[i].quant.reset();
    }
  };
  apply(model.trunk, grads.trunk);
  for (std::size_t h = 0; h < model.heads.size(); ++h) apply(model.heads[h].layers, grads.heads[h]);
  model.input_exp.reset();
  return res;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace graspstack
