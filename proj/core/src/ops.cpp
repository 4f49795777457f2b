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

#include "graspstack/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace graspstack {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using RowVecMap = Eigen::Map<Eigen::RowVectorXd>;
using ConstRowVecMap = Eigen::Map<const Eigen::RowVectorXd>;

[[noreturn]] void fail(const std::string& op, const std::string& what) {
  throw ShapeError(op + ": " + what);
}

// Normalised view of a possibly batched H x W x C tensor.
struct Image {
  std::size_t batch, h, w, c;
  bool batched;
};

Image image_view(const Tensor& t, const char* op) {
  if (t.rank() == 3) return {1, t.dim(0), t.dim(1), t.dim(2), false};
  if (t.rank() == 4) return {t.dim(0), t.dim(1), t.dim(2), t.dim(3), true};
  fail(op, "expected H x W x C or B x H x W x C input, got " + shape_str(t.shape()));
}

Shape image_shape(const Image& im, std::size_t h, std::size_t w, std::size_t c) {
  if (im.batched) return {im.batch, h, w, c};
  return {h, w, c};
}

struct Geometry {
  std::size_t kh, kw, out_h, out_w, pad_top, pad_left;
};

Geometry conv_geometry(const Image& im, const Tensor& kernels, const Conv2DSpec& spec) {
  if (kernels.rank() != 4) {
    fail("conv2d", "kernels must be kh x kw x C x F, got " + shape_str(kernels.shape()));
  }
  if (kernels.dim(2) != im.c) {
    fail("conv2d", "input has " + std::to_string(im.c) + " channels but kernels " +
                       shape_str(kernels.shape()) + " expect " + std::to_string(kernels.dim(2)));
  }
  if (spec.stride[0] == 0 || spec.stride[1] == 0) fail("conv2d", "stride must be positive");
  Geometry g{kernels.dim(0), kernels.dim(1), 0, 0, 0, 0};
  if (spec.padding == Padding::Valid && (g.kh > im.h || g.kw > im.w)) {
    fail("conv2d", "kernel " + std::to_string(g.kh) + "x" + std::to_string(g.kw) +
                       " exceeds input " + std::to_string(im.h) + "x" + std::to_string(im.w));
  }
  g.out_h = conv_out_dim(im.h, g.kh, spec.stride[0], spec.padding);
  g.out_w = conv_out_dim(im.w, g.kw, spec.stride[1], spec.padding);
  if (spec.padding == Padding::Same) {
    const auto pad = [](std::size_t out, std::size_t s, std::size_t k, std::size_t in) {
      const std::size_t need = (out - 1) * s + k;
      return need > in ? need - in : 0;
    };
    g.pad_top = pad(g.out_h, spec.stride[0], g.kh, im.h) / 2;
    g.pad_left = pad(g.out_w, spec.stride[1], g.kw, im.w) / 2;
  }
  return g;
}

template <class T>
using RowMatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local ConvPrecision tl_precision = ConvPrecision::Double;

// Scratch buffers reused across calls so the large unrolled-patch matrices do
// not hit the allocator (and fresh pages) on every training step.
template <class T>
T* scratch(std::size_t slot, std::size_t n) {
  thread_local std::array<std::vector<T>, 4> bufs;
  auto& b = bufs.at(slot);
  if (b.size() < n) b.resize(n);
  return b.data();
}

// Gathers every receptive field into one row: rows are (b, oy, ox), columns
// follow the kernel layout (ky, kx, c).
template <class T>
void im2col(const Tensor& input, const Image& im, const Geometry& g, const Conv2DSpec& spec,
            T* cols) {
  const std::size_t k = g.kh * g.kw * im.c;
  const std::size_t rows = im.batch * g.out_h * g.out_w;
  if (g.pad_top != 0 || g.pad_left != 0 || spec.padding == Padding::Same) {
    std::fill(cols, cols + rows * k, T(0));
  }
  const double* src = input.data().data();
  std::size_t row = 0;
  for (std::size_t b = 0; b < im.batch; ++b) {
    const double* base = src + b * im.h * im.w * im.c;
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox, ++row) {
        T* dst = cols + row * k;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
          const long iy = static_cast<long>(oy * spec.stride[0] + ky) - static_cast<long>(g.pad_top);
          if (iy < 0 || iy >= static_cast<long>(im.h)) continue;
          for (std::size_t kx = 0; kx < g.kw; ++kx) {
            const long ix =
                static_cast<long>(ox * spec.stride[1] + kx) - static_cast<long>(g.pad_left);
            if (ix < 0 || ix >= static_cast<long>(im.w)) continue;
            const double* px = base + (static_cast<std::size_t>(iy) * im.w + ix) * im.c;
            std::copy(px, px + im.c, dst + (ky * g.kw + kx) * im.c);
          }
        }
      }
    }
  }
}

template <class T>
void col2im(const T* cols, const Image& im, const Geometry& g, const Conv2DSpec& spec,
            Tensor& out) {
  const std::size_t k = g.kh * g.kw * im.c;
  double* dst = out.data().data();
  std::size_t row = 0;
  for (std::size_t b = 0; b < im.batch; ++b) {
    double* base = dst + b * im.h * im.w * im.c;
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox, ++row) {
        const T* src = cols + row * k;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
          const long iy = static_cast<long>(oy * spec.stride[0] + ky) - static_cast<long>(g.pad_top);
          if (iy < 0 || iy >= static_cast<long>(im.h)) continue;
          for (std::size_t kx = 0; kx < g.kw; ++kx) {
            const long ix =
                static_cast<long>(ox * spec.stride[1] + kx) - static_cast<long>(g.pad_left);
            if (ix < 0 || ix >= static_cast<long>(im.w)) continue;
            double* px = base + (static_cast<std::size_t>(iy) * im.w + ix) * im.c;
            const T* s = src + (ky * g.kw + kx) * im.c;
            for (std::size_t c = 0; c < im.c; ++c) px[c] += static_cast<double>(s[c]);
          }
        }
      }
    }
  }
}

// Pointer to `t` as T: the tensor itself for double, a cast copy otherwise.
template <class T>
const T* as_scalar(const Tensor& t, std::size_t slot) {
  if constexpr (std::is_same_v<T, double>) {
    (void)slot;
    return t.data().data();
  } else {
    T* buf = scratch<T>(slot, t.size());
    std::copy(t.data().begin(), t.data().end(), buf);
    return buf;
  }
}

template <class T>
void conv_forward(const Tensor& input, const Tensor& kernels, const Image& im, const Geometry& g,
                  const Conv2DSpec& spec, Tensor& out) {
  using M = Eigen::Map<RowMatT<T>>;
  using CM = Eigen::Map<const RowMatT<T>>;
  const auto rows = static_cast<Eigen::Index>(im.batch * g.out_h * g.out_w);
  const auto k = static_cast<Eigen::Index>(g.kh * g.kw * im.c);
  const auto f = static_cast<Eigen::Index>(kernels.dim(3));
  T* cols = scratch<T>(0, static_cast<std::size_t>(rows * k));
  im2col(input, im, g, spec, cols);
  CM w(as_scalar<T>(kernels, 1), k, f);
  if constexpr (std::is_same_v<T, double>) {
    M(out.data().data(), rows, f).noalias() = CM(cols, rows, k) * w;
  } else {
    T* o = scratch<T>(2, static_cast<std::size_t>(rows * f));
    M(o, rows, f).noalias() = CM(cols, rows, k) * w;
    std::copy(o, o + rows * f, out.data().begin());
  }
}

template <class T>
void conv_backward(const Tensor& input, const Tensor& kernels, const Image& im, const Geometry& g,
                   const Conv2DSpec& spec, const Tensor& grad_out, Conv2DGrads& grads,
                   bool want_input_grad) {
  using M = Eigen::Map<RowMatT<T>>;
  using CM = Eigen::Map<const RowMatT<T>>;
  const auto rows = static_cast<Eigen::Index>(im.batch * g.out_h * g.out_w);
  const auto k = static_cast<Eigen::Index>(g.kh * g.kw * im.c);
  const auto f = static_cast<Eigen::Index>(kernels.dim(3));
  T* cols = scratch<T>(0, static_cast<std::size_t>(rows * k));
  im2col(input, im, g, spec, cols);
  CM dy(as_scalar<T>(grad_out, 2), rows, f);
  if constexpr (std::is_same_v<T, double>) {
    M(grads.kernels.data().data(), k, f).noalias() = CM(cols, rows, k).transpose() * dy;
  } else {
    T* dw = scratch<T>(3, static_cast<std::size_t>(k * f));
    M(dw, k, f).noalias() = CM(cols, rows, k).transpose() * dy;
    std::copy(dw, dw + k * f, grads.kernels.data().begin());
  }
  if (want_input_grad) {
    // patches are no longer needed, so their buffer takes the patch gradients
    CM w(as_scalar<T>(kernels, 1), k, f);
    M(cols, rows, k).noalias() = dy * w.transpose();
    grads.input = Tensor(input.shape());
    col2im(cols, im, g, spec, grads.input);
  }
}

struct Rows {
  std::size_t batch, features;
  bool batched;
};

Rows rows_view(const Tensor& t, const char* op) {
  if (t.rank() == 1) return {1, t.dim(0), false};
  if (t.rank() == 2) return {t.dim(0), t.dim(1), true};
  fail(op, "expected N or B x N input, got " + shape_str(t.shape()));
}

void require_nonempty(const Tensor& t, const char* op) {
  if (t.empty()) fail(op, "empty tensor");
}

}  // namespace

ConvPrecision conv_precision() { return tl_precision; }

ScopedConvPrecision::ScopedConvPrecision(ConvPrecision p) : prev_(tl_precision) { tl_precision = p; }
ScopedConvPrecision::~ScopedConvPrecision() { tl_precision = prev_; }

std::size_t conv_out_dim(std::size_t in, std::size_t kernel, std::size_t stride, Padding padding) {
  if (padding == Padding::Same) return (in + stride - 1) / stride;
  if (kernel > in) return 0;
  return (in - kernel) / stride + 1;
}

Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              const Conv2DSpec& spec) {
  require_nonempty(input, "conv2d");
  const Image im = image_view(input, "conv2d");
  const Geometry g = conv_geometry(im, kernels, spec);
  const std::size_t filters = kernels.dim(3);
  if (bias.rank() != 1 || bias.dim(0) != filters) {
    fail("conv2d", "bias " + shape_str(bias.shape()) + " does not match " +
                       std::to_string(filters) + " filters");
  }
  Tensor out(image_shape(im, g.out_h, g.out_w, filters));
  if (tl_precision == ConvPrecision::Single) {
    conv_forward<float>(input, kernels, im, g, spec, out);
  } else {
    conv_forward<double>(input, kernels, im, g, spec, out);
  }
  MatMap o(out.data().data(), static_cast<Eigen::Index>(out.size() / filters),
           static_cast<Eigen::Index>(filters));
  o.rowwise() += ConstRowVecMap(bias.data().data(), static_cast<Eigen::Index>(filters));
  return out;
}

Conv2DGrads conv2d_backward(const Tensor& input, const Tensor& kernels, const Conv2DSpec& spec,
                            const Tensor& grad_out, bool want_input_grad) {
  const Image im = image_view(input, "conv2d_backward");
  const Geometry g = conv_geometry(im, kernels, spec);
  const std::size_t filters = kernels.dim(3);
  const Shape expect = image_shape(im, g.out_h, g.out_w, filters);
  if (grad_out.shape() != expect) {
    fail("conv2d_backward", "gradient " + shape_str(grad_out.shape()) + " expected " +
                                shape_str(expect));
  }
  Conv2DGrads grads;
  grads.kernels = Tensor(kernels.shape());
  grads.bias = Tensor({filters});
  RowVecMap(grads.bias.data().data(), static_cast<Eigen::Index>(filters)) =
      ConstMatMap(grad_out.data().data(), static_cast<Eigen::Index>(grad_out.size() / filters),
                  static_cast<Eigen::Index>(filters))
          .colwise()
          .sum();
  if (tl_precision == ConvPrecision::Single) {
    conv_backward<float>(input, kernels, im, g, spec, grad_out, grads, want_input_grad);
  } else {
    conv_backward<double>(input, kernels, im, g, spec, grad_out, grads, want_input_grad);
  }
  return grads;
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require_nonempty(input, "dense");
  const Rows r = rows_view(input, "dense");
  if (weights.rank() != 2 || weights.dim(0) != r.features) {
    fail("dense", "input " + shape_str(input.shape()) + " does not match weights " +
                      shape_str(weights.shape()));
  }
  const std::size_t units = weights.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != units) {
    fail("dense", "bias " + shape_str(bias.shape()) + " does not match " +
                      std::to_string(units) + " units");
  }
  Tensor out(r.batched ? Shape{r.batch, units} : Shape{units});
  const ConstMatMap x(input.data().data(), static_cast<Eigen::Index>(r.batch),
                      static_cast<Eigen::Index>(r.features));
  const ConstMatMap w(weights.data().data(), static_cast<Eigen::Index>(r.features),
                      static_cast<Eigen::Index>(units));
  MatMap o(out.data().data(), static_cast<Eigen::Index>(r.batch),
           static_cast<Eigen::Index>(units));
  o.noalias() = x * w;
  o.rowwise() += ConstRowVecMap(bias.data().data(), static_cast<Eigen::Index>(units));
  return out;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_out,
                          bool want_input_grad) {
  const Rows r = rows_view(input, "dense_backward");
  const std::size_t units = weights.dim(1);
  const Shape expect = r.batched ? Shape{r.batch, units} : Shape{units};
  if (grad_out.shape() != expect) {
    fail("dense_backward", "gradient " + shape_str(grad_out.shape()) + " expected " +
                               shape_str(expect));
  }
  const auto b = static_cast<Eigen::Index>(r.batch);
  const auto n = static_cast<Eigen::Index>(r.features);
  const auto m = static_cast<Eigen::Index>(units);
  const ConstMatMap x(input.data().data(), b, n);
  const ConstMatMap dy(grad_out.data().data(), b, m);
  DenseGrads grads;
  grads.weights = Tensor(weights.shape());
  MatMap(grads.weights.data().data(), n, m).noalias() = x.transpose() * dy;
  grads.bias = Tensor({units});
  RowVecMap(grads.bias.data().data(), m) = dy.colwise().sum();
  if (want_input_grad) {
    grads.input = Tensor(input.shape());
    const ConstMatMap w(weights.data().data(), n, m);
    MatMap(grads.input.data().data(), b, n).noalias() = dy * w.transpose();
  }
  return grads;
}

Tensor relu(const Tensor& input) {
  require_nonempty(input, "relu");
  Tensor out = input;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  if (input.shape() != grad_out.shape()) fail("relu_backward", "shape mismatch");
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(input[i] > 0.0)) g[i] = 0.0;
  }
  return g;
}

Tensor softmax(const Tensor& logits) {
  require_nonempty(logits, "softmax");
  const std::size_t n = logits.shape().back();
  Tensor out = logits;
  double* p = out.data().data();
  for (std::size_t row = 0; row < out.size() / n; ++row, p += n) {
    const double mx = *std::max_element(p, p + n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = std::exp(p[i] - mx);
      sum += p[i];
    }
    for (std::size_t i = 0; i < n; ++i) p[i] /= sum;
  }
  return out;
}

Tensor softmax_backward(const Tensor& output, const Tensor& grad_out) {
  if (output.shape() != grad_out.shape()) fail("softmax_backward", "shape mismatch");
  const std::size_t n = output.shape().back();
  Tensor g(output.shape());
  for (std::size_t row = 0; row < output.size() / n; ++row) {
    const std::size_t o = row * n;
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += grad_out[o + i] * output[o + i];
    for (std::size_t i = 0; i < n; ++i) g[o + i] = output[o + i] * (grad_out[o + i] - dot);
  }
  return g;
}

Tensor max_pool2d(const Tensor& input, std::array<std::size_t, 2> window) {
  require_nonempty(input, "max_pool2d");
  const Image im = image_view(input, "max_pool2d");
  if (window[0] == 0 || window[1] == 0 || window[0] > im.h || window[1] > im.w) {
    fail("max_pool2d", "window " + std::to_string(window[0]) + "x" + std::to_string(window[1]) +
                           " does not fit input " + shape_str(input.shape()));
  }
  const std::size_t oh = im.h / window[0];
  const std::size_t ow = im.w / window[1];
  Tensor out(image_shape(im, oh, ow, im.c));
  std::size_t o = 0;
  for (std::size_t b = 0; b < im.batch; ++b) {
    const double* base = input.data().data() + b * im.h * im.w * im.c;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t c = 0; c < im.c; ++c, ++o) {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t py = 0; py < window[0]; ++py) {
            for (std::size_t px = 0; px < window[1]; ++px) {
              const std::size_t iy = oy * window[0] + py;
              const std::size_t ix = ox * window[1] + px;
              best = std::max(best, base[(iy * im.w + ix) * im.c + c]);
            }
          }
          out[o] = best;
        }
      }
    }
  }
  return out;
}

Tensor max_pool2d_backward(const Tensor& input, std::array<std::size_t, 2> window,
                           const Tensor& grad_out) {
  const Image im = image_view(input, "max_pool2d_backward");
  const std::size_t oh = im.h / window[0];
  const std::size_t ow = im.w / window[1];
  if (grad_out.shape() != image_shape(im, oh, ow, im.c)) {
    fail("max_pool2d_backward", "gradient shape mismatch");
  }
  Tensor g(input.shape());
  std::size_t o = 0;
  for (std::size_t b = 0; b < im.batch; ++b) {
    const std::size_t off = b * im.h * im.w * im.c;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t c = 0; c < im.c; ++c, ++o) {
          // first maximum in scan order receives the gradient
          std::size_t arg = 0;
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t py = 0; py < window[0]; ++py) {
            for (std::size_t px = 0; px < window[1]; ++px) {
              const std::size_t idx =
                  off + ((oy * window[0] + py) * im.w + ox * window[1] + px) * im.c + c;
              if (input[idx] > best) {
                best = input[idx];
                arg = idx;
              }
            }
          }
          g[arg] += grad_out[o];
        }
      }
    }
  }
  return g;
}

Tensor global_avg_pool(const Tensor& input) {
  require_nonempty(input, "global_avg_pool");
  const Image im = image_view(input, "global_avg_pool");
  Tensor out(im.batched ? Shape{im.batch, im.c} : Shape{im.c});
  const std::size_t area = im.h * im.w;
  for (std::size_t b = 0; b < im.batch; ++b) {
    const double* base = input.data().data() + b * area * im.c;
    for (std::size_t c = 0; c < im.c; ++c) {
      double s = 0.0;
      for (std::size_t p = 0; p < area; ++p) s += base[p * im.c + c];
      out[b * im.c + c] = s / static_cast<double>(area);
    }
  }
  return out;
}

Tensor global_avg_pool_backward(const Tensor& input, const Tensor& grad_out) {
  const Image im = image_view(input, "global_avg_pool_backward");
  const std::size_t area = im.h * im.w;
  if (grad_out.size() != im.batch * im.c) fail("global_avg_pool_backward", "gradient shape mismatch");
  Tensor g(input.shape());
  for (std::size_t b = 0; b < im.batch; ++b) {
    for (std::size_t p = 0; p < area; ++p) {
      for (std::size_t c = 0; c < im.c; ++c) {
        g[(b * area + p) * im.c + c] = grad_out[b * im.c + c] / static_cast<double>(area);
      }
    }
  }
  return g;
}

}  // namespace graspstack
