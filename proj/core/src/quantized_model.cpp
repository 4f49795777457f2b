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

#include "graspstack/quantized_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "graspstack/quant.hpp"

namespace graspstack {

namespace {

void track_max(const Tensor& t, double& m) {
  for (double v : t.data()) m = std::max(m, std::abs(v));
}

void attach(Layer& l, double out_max) {
  if (!l.has_params()) return;
  const QuantParams wp = calibrate_quant(l.weights);
  const QuantTensor qw = quantize(l.weights, wp);
  l.quant = LayerQuant{wp.exponent(), calibrate_abs_max(out_max).exponent(), qw.data};
}

struct QAct {
  Shape shape;
  std::vector<std::int32_t> v;  // int8-ranged values, widened for arithmetic
  int exp = 0;
};

std::int32_t quant_bias(double b, int exp) {
  const double r = round_half_away(std::ldexp(b, -exp));
  const double lim = static_cast<double>(std::numeric_limits<std::int32_t>::max());
  return static_cast<std::int32_t>(std::clamp(r, -lim, lim));
}

QAct conv_int(const Layer& l, const QAct& x) {
  const LayerQuant& q = *l.quant;
  const std::size_t h = x.shape[0], w = x.shape[1], c = x.shape[2];
  const std::size_t kh = l.kernel[0], kw = l.kernel[1], f = l.units;
  const std::size_t oh = l.out_shape[0], ow = l.out_shape[1];
  const std::size_t sh = l.conv.stride[0], sw = l.conv.stride[1];
  std::size_t pt = 0, pl = 0;
  if (l.conv.padding == Padding::Same) {
    const std::size_t nh = (oh - 1) * sh + kh, nw = (ow - 1) * sw + kw;
    pt = nh > h ? (nh - h) / 2 : 0;
    pl = nw > w ? (nw - w) / 2 : 0;
  }
  const int acc_exp = x.exp + q.weight_exp;
  const int shift = q.output_exp - acc_exp;
  QAct y{{oh, ow, f}, std::vector<std::int32_t>(oh * ow * f), q.output_exp};
  std::vector<std::int64_t> acc(f);
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t k = 0; k < f; ++k) acc[k] = quant_bias(l.bias[k], acc_exp);
      for (std::size_t ky = 0; ky < kh; ++ky) {
        const long iy = static_cast<long>(oy * sh + ky) - static_cast<long>(pt);
        if (iy < 0 || iy >= static_cast<long>(h)) continue;
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const long ix = static_cast<long>(ox * sw + kx) - static_cast<long>(pl);
          if (ix < 0 || ix >= static_cast<long>(w)) continue;
          const std::int32_t* px = &x.v[(static_cast<std::size_t>(iy) * w + ix) * c];
          const std::int8_t* wk = &q.weights[(ky * kw + kx) * c * f];
          for (std::size_t ci = 0; ci < c; ++ci) {
            const std::int32_t a = px[ci];
            if (a == 0) continue;
            const std::int8_t* wr = wk + ci * f;
            for (std::size_t k = 0; k < f; ++k) acc[k] += a * wr[k];
          }
        }
      }
      std::int32_t* out = &y.v[(oy * ow + ox) * f];
      for (std::size_t k = 0; k < f; ++k) out[k] = requantize(acc[k], shift);
    }
  }
  return y;
}

QAct dense_int(const Layer& l, const QAct& x) {
  const LayerQuant& q = *l.quant;
  const std::size_t n = x.v.size(), m = l.units;
  const int acc_exp = x.exp + q.weight_exp;
  std::vector<std::int64_t> acc(m);
  for (std::size_t j = 0; j < m; ++j) acc[j] = quant_bias(l.bias[j], acc_exp);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t a = x.v[i];
    if (a == 0) continue;
    const std::int8_t* wr = &q.weights[i * m];
    for (std::size_t j = 0; j < m; ++j) acc[j] += a * wr[j];
  }
  QAct y{{m}, std::vector<std::int32_t>(m), q.output_exp};
  for (std::size_t j = 0; j < m; ++j) y.v[j] = requantize(acc[j], q.output_exp - acc_exp);
  return y;
}

QAct pool_int(const Layer& l, const QAct& x) {
  const std::size_t w = x.shape[1], c = x.shape[2];
  const std::size_t oh = l.out_shape[0], ow = l.out_shape[1];
  QAct y{l.out_shape, std::vector<std::int32_t>(oh * ow * c), x.exp};
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t ci = 0; ci < c; ++ci) {
        std::int32_t best = std::numeric_limits<std::int32_t>::min();
        for (std::size_t py = 0; py < l.window[0]; ++py) {
          for (std::size_t px = 0; px < l.window[1]; ++px) {
            const std::size_t iy = oy * l.window[0] + py, ix = ox * l.window[1] + px;
            best = std::max(best, x.v[(iy * w + ix) * c + ci]);
          }
        }
        y.v[(oy * ow + ox) * c + ci] = best;
      }
    }
  }
  return y;
}

QAct gap_int(const QAct& x) {
  const std::size_t area = x.shape[0] * x.shape[1], c = x.shape[2];
  QAct y{{c}, std::vector<std::int32_t>(c), x.exp};
  for (std::size_t ci = 0; ci < c; ++ci) {
    std::int64_t s = 0;
    for (std::size_t p = 0; p < area; ++p) s += x.v[p * c + ci];
    const double avg = round_half_away(static_cast<double>(s) / static_cast<double>(area));
    y.v[ci] = static_cast<std::int32_t>(avg);
  }
  return y;
}

// Runs integer layers; a trailing softmax is left for the caller.
QAct run_int(const std::vector<Layer>& layers, QAct x, bool& ends_in_softmax) {
  ends_in_softmax = false;
  for (const Layer& l : layers) {
    switch (l.kind) {
      case LayerKind::Conv2D: x = conv_int(l, x); break;
      case LayerKind::Dense: x = dense_int(l, x); break;
      case LayerKind::ReLU:
        for (auto& v : x.v) v = std::max(v, 0);
        break;
      case LayerKind::MaxPool2D: x = pool_int(l, x); break;
      case LayerKind::GlobalAvgPool: x = gap_int(x); break;
      case LayerKind::Flatten: x.shape = l.out_shape; break;
      case LayerKind::Dropout: break;
      case LayerKind::Softmax: ends_in_softmax = true; break;
    }
  }
  return x;
}

Tensor to_float(const QAct& x) {
  std::vector<double> v(x.v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::ldexp(static_cast<double>(x.v[i]), x.exp);
  return Tensor(x.shape, std::move(v));
}

}  // namespace

void quantize_model(ModelGraph& model, std::span<const Tensor> calibration) {
  if (calibration.empty()) throw std::invalid_argument("quantize_model needs calibration data");
  double in_max = 0.0;
  std::vector<double> trunk_max(model.trunk.size(), 0.0);
  std::vector<std::vector<double>> head_max;
  for (const Head& h : model.heads) head_max.emplace_back(h.layers.size(), 0.0);

  StepOptions opt;
  opt.dropout = false;
  for (const Tensor& sample : calibration) {
    track_max(sample, in_max);
    const Tape tape = record_forward(model, sample, opt);
    for (std::size_t i = 0; i < tape.trunk.size(); ++i) track_max(tape.trunk[i].output, trunk_max[i]);
    for (std::size_t h = 0; h < tape.heads.size(); ++h) {
      for (std::size_t i = 0; i < tape.heads[h].size(); ++i) {
        track_max(tape.heads[h][i].output, head_max[h][i]);
      }
    }
  }
  model.input_exp = calibrate_abs_max(in_max).exponent();
  for (std::size_t i = 0; i < model.trunk.size(); ++i) attach(model.trunk[i], trunk_max[i]);
  for (std::size_t h = 0; h < model.heads.size(); ++h) {
    for (std::size_t i = 0; i < model.heads[h].layers.size(); ++i) {
      attach(model.heads[h].layers[i], head_max[h][i]);
    }
  }
}

bool is_quantized(const ModelGraph& model) {
  if (!model.input_exp) return false;
  auto ok = [](const std::vector<Layer>& ls) {
    return std::all_of(ls.begin(), ls.end(),
                       [](const Layer& l) { return !l.has_params() || l.quant.has_value(); });
  };
  if (!ok(model.trunk)) return false;
  return std::all_of(model.heads.begin(), model.heads.end(),
                     [&](const Head& h) { return ok(h.layers); });
}

std::vector<Tensor> forward_int8(const ModelGraph& model, const Tensor& sample) {
  if (!is_quantized(model)) throw std::logic_error("model '" + model.name + "' is not quantized");
  if (sample.shape() != model.input_shape) {
    throw ShapeError("forward_int8: model '" + model.name + "' expects " +
                     shape_str(model.input_shape) + ", got " + shape_str(sample.shape()));
  }
  const QuantTensor qin = quantize(sample, QuantParams::from_exponent(*model.input_exp));
  QAct x{sample.shape(), std::vector<std::int32_t>(qin.data.begin(), qin.data.end()),
         *model.input_exp};
  bool trunk_softmax = false;
  x = run_int(model.trunk, std::move(x), trunk_softmax);
  std::vector<Tensor> outs;
  for (const Head& h : model.heads) {
    bool sm = trunk_softmax;
    bool head_sm = false;
    QAct y = run_int(h.layers, x, head_sm);
    Tensor f = to_float(y);
    outs.push_back(sm || head_sm ? softmax(f) : std::move(f));
  }
  return outs;
}

}  // namespace graspstack
