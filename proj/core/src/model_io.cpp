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

#include "graspstack/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace graspstack {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void i8(int v) { buf_.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(v))); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void str(const std::string& s) {
    if (s.size() > 255) throw std::invalid_argument("name longer than 255 bytes: " + s);
    u8(static_cast<std::uint8_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == b_.size(); }

  void need(std::size_t n, const char* what) {
    if (b_.size() - pos_ < n) {
      throw FormatError(std::string("truncated ") + what + ": need " + std::to_string(n) +
                            " bytes, " + std::to_string(b_.size() - pos_) + " available",
                        pos_);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return b_[pos_++];
  }
  int i8(const char* what) { return static_cast<std::int8_t>(u8(what)); }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = b_[pos_] | (b_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }
  double f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string str(const char* what) {
    const std::size_t n = u8(what);
    need(n, what);
    std::string s(b_.begin() + static_cast<long>(pos_), b_.begin() + static_cast<long>(pos_ + n));
    pos_ += n;
    return s;
  }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

constexpr double kRateUnits = 1e6;

std::vector<std::int32_t> hyper_of(const Layer& l) {
  switch (l.kind) {
    case LayerKind::Conv2D:
      return {static_cast<std::int32_t>(l.kernel[0]), static_cast<std::int32_t>(l.kernel[1]),
              static_cast<std::int32_t>(l.units), static_cast<std::int32_t>(l.conv.stride[0]),
              static_cast<std::int32_t>(l.conv.stride[1]),
              l.conv.padding == Padding::Same ? 1 : 0};
    case LayerKind::Dense: return {static_cast<std::int32_t>(l.units)};
    case LayerKind::MaxPool2D:
      return {static_cast<std::int32_t>(l.window[0]), static_cast<std::int32_t>(l.window[1])};
    case LayerKind::Dropout:
      return {static_cast<std::int32_t>(std::lround(l.rate * kRateUnits))};
    default: return {};
  }
}

// Rebuilds layer hyperparameters; `bad` reports an error at the caller's position.
template <class Fail>
Layer layer_from(std::uint8_t tag, const std::vector<std::int32_t>& h, Fail bad) {
  const auto kind = static_cast<LayerKind>(tag);
  if (to_string(kind) == "unknown") bad("unknown layer kind tag " + std::to_string(tag));
  auto expect = [&](std::size_t n) {
    if (h.size() != n) {
      bad(std::string(to_string(kind)) + " expects " + std::to_string(n) +
          " hyperparameters, got " + std::to_string(h.size()));
    }
    for (auto v : h) {
      if (v < 0) bad("negative hyperparameter");
    }
  };
  auto sz = [](std::int32_t v) { return static_cast<std::size_t>(v); };
  switch (kind) {
    case LayerKind::Conv2D:
      expect(6);
      return Layer::conv2d(sz(h[0]), sz(h[1]), sz(h[2]),
                           Conv2DSpec{{sz(h[3]), sz(h[4])}, h[5] ? Padding::Same : Padding::Valid});
    case LayerKind::Dense: expect(1); return Layer::dense(sz(h[0]));
    case LayerKind::MaxPool2D: expect(2); return Layer::max_pool(sz(h[0]), sz(h[1]));
    case LayerKind::Dropout: expect(1); return Layer::dropout(h[0] / kRateUnits);
    case LayerKind::ReLU: expect(0); return Layer::relu();
    case LayerKind::Flatten: expect(0); return Layer::flatten();
    case LayerKind::GlobalAvgPool: expect(0); return Layer::global_avg_pool();
    case LayerKind::Softmax: expect(0); return Layer::softmax();
  }
  bad("unknown layer kind");
  throw std::logic_error("unreachable");
}

void write_layer(Writer& w, const Layer& l) {
  w.u8(static_cast<std::uint8_t>(l.kind));
  const auto hyper = hyper_of(l);
  w.u8(static_cast<std::uint8_t>(hyper.size()));
  for (auto v : hyper) w.i32(v);
  const std::vector<const Tensor*> tensors =
      l.has_params() ? std::vector<const Tensor*>{&l.weights, &l.bias} : std::vector<const Tensor*>{};
  w.u8(static_cast<std::uint8_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    w.u8(static_cast<std::uint8_t>(t->rank()));
    for (auto d : t->shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t->data()) w.f32(v);
  }
  w.u8(l.quant ? 1 : 0);
  if (l.quant) {
    w.i8(l.quant->weight_exp);
    w.i8(l.quant->output_exp);
    w.u32(static_cast<std::uint32_t>(l.quant->weights.size()));
    for (auto q : l.quant->weights) w.i8(q);
  }
}

Layer read_layer(Reader& r) {
  const std::size_t start = r.offset();
  auto bad = [&](const std::string& why) -> void { throw FormatError(why, start); };
  const std::uint8_t tag = r.u8("layer kind");
  std::vector<std::int32_t> hyper(r.u8("hyperparameter count"));
  for (auto& v : hyper) v = r.i32("hyperparameter");
  Layer l = layer_from(tag, hyper, bad);
  const std::size_t n_tensors = r.u8("tensor count");
  if (n_tensors != (l.has_params() ? 2u : 0u)) bad("unexpected tensor count");
  for (std::size_t t = 0; t < n_tensors; ++t) {
    Shape shape(r.u8("tensor rank"));
    for (auto& d : shape) d = r.u32("tensor dim");
    const std::size_t n = shape_size(shape);
    r.need(4 * n, "tensor payload");
    std::vector<double> data(n);
    for (auto& v : data) v = r.f32("tensor payload");
    (t == 0 ? l.weights : l.bias) = Tensor(std::move(shape), std::move(data));
  }
  if (r.u8("int8 flag")) {
    LayerQuant q;
    q.weight_exp = r.i8("weight exponent");
    q.output_exp = r.i8("output exponent");
    const std::size_t n = r.u32("int8 count");
    if (n != l.weights.size()) bad("int8 payload size does not match weights");
    r.need(n, "int8 payload");
    q.weights.resize(n);
    for (auto& v : q.weights) v = static_cast<std::int8_t>(r.i8("int8 payload"));
    l.quant = std::move(q);
  }
  return l;
}

std::string loss_name(HeadLoss loss) {
  return loss == HeadLoss::CrossEntropy ? "cross_entropy" : "mean_absolute";
}

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelGraph& model) {
  Writer w;
  for (char c : kModelMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kModelFormatVersion);
  w.str(model.name);
  w.u8(static_cast<std::uint8_t>(model.input_shape.size()));
  for (auto d : model.input_shape) w.u32(static_cast<std::uint32_t>(d));
  w.u8(model.input_exp ? 1 : 0);
  w.i8(model.input_exp.value_or(0));
  w.u16(static_cast<std::uint16_t>(model.trunk.size()));
  for (const Layer& l : model.trunk) write_layer(w, l);
  w.u8(static_cast<std::uint8_t>(model.heads.size()));
  for (const Head& h : model.heads) {
    w.u8(static_cast<std::uint8_t>(h.loss));
    w.str(h.name);
    w.u16(static_cast<std::uint16_t>(h.layers.size()));
    for (const Layer& l : h.layers) write_layer(w, l);
  }
  return w.take();
}

ModelGraph decode_model(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kModelMagic, 4) != 0) throw FormatError("bad magic, expected GRSP", 0);
  r.u32("magic");
  const std::uint16_t version = r.u16("version");
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) +
                          " (expected " + std::to_string(kModelFormatVersion) + ")",
                      4);
  }
  ModelGraph m;
  m.name = r.str("model name");
  m.input_shape.resize(r.u8("input rank"));
  for (auto& d : m.input_shape) d = r.u32("input dim");
  const bool has_exp = r.u8("input exponent flag") != 0;
  const int exp = r.i8("input exponent");
  if (has_exp) m.input_exp = exp;
  const std::size_t n = r.u16("trunk layer count");
  for (std::size_t i = 0; i < n; ++i) m.trunk.push_back(read_layer(r));
  const std::size_t heads = r.u8("head count");
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t at = r.offset();
    Head head;
    const auto loss = r.u8("head loss");
    if (loss != 1 && loss != 2) throw FormatError("unknown head loss tag", at);
    head.loss = static_cast<HeadLoss>(loss);
    head.name = r.str("head name");
    const std::size_t hn = r.u16("head layer count");
    for (std::size_t i = 0; i < hn; ++i) head.layers.push_back(read_layer(r));
    m.heads.push_back(std::move(head));
  }
  if (!r.done()) throw FormatError("trailing bytes after model", r.offset());
  try {
    m.finalize();
  } catch (const ShapeError& e) {
    throw FormatError(std::string("inconsistent layer shapes: ") + e.what(), bytes.size());
  }
  return m;
}

namespace {

nlohmann::json layer_json(const Layer& l) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(l.kind));
  j["hyper"] = hyper_of(l);
  j["tensors"] = nlohmann::json::array();
  if (l.has_params()) {
    for (const Tensor* t : {&l.weights, &l.bias}) {
      std::vector<double> data;
      data.reserve(t->size());
      for (double v : t->data()) data.push_back(static_cast<float>(v));
      j["tensors"].push_back({{"shape", t->shape()}, {"data", data}});
    }
  }
  if (l.quant) {
    j["int8"] = {{"weight_exp", l.quant->weight_exp},
                 {"output_exp", l.quant->output_exp},
                 {"data", l.quant->weights}};
  } else {
    j["int8"] = nullptr;
  }
  return j;
}

Layer layer_from_json(const nlohmann::json& j, const std::string& path) {
  auto bad = [&](const std::string& why) -> void { throw FormatError(path + ": " + why, 0); };
  const auto kind = layer_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) bad("unknown layer kind");
  Layer l = layer_from(static_cast<std::uint8_t>(*kind), j.at("hyper").get<std::vector<std::int32_t>>(), bad);
  const auto& tensors = j.at("tensors");
  if (tensors.size() != (l.has_params() ? 2u : 0u)) bad("unexpected tensor count");
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    std::vector<double> data = tensors[t].at("data").get<std::vector<double>>();
    for (double& v : data) v = static_cast<float>(v);
    (t == 0 ? l.weights : l.bias) = Tensor(tensors[t].at("shape").get<Shape>(), std::move(data));
  }
  if (j.contains("int8") && !j["int8"].is_null()) {
    const auto& q = j["int8"];
    l.quant = LayerQuant{q.at("weight_exp").get<int>(), q.at("output_exp").get<int>(),
                         q.at("data").get<std::vector<std::int8_t>>()};
    if (l.quant->weights.size() != l.weights.size()) bad("int8 payload size does not match weights");
  }
  return l;
}

}  // namespace

nlohmann::json model_to_json(const ModelGraph& model) {
  nlohmann::json j;
  j["magic"] = "GRSP";
  j["version"] = kModelFormatVersion;
  j["name"] = model.name;
  j["input_shape"] = model.input_shape;
  j["input_exp"] = model.input_exp ? nlohmann::json(*model.input_exp) : nlohmann::json(nullptr);
  j["trunk"] = nlohmann::json::array();
  for (const Layer& l : model.trunk) j["trunk"].push_back(layer_json(l));
  j["heads"] = nlohmann::json::array();
  for (const Head& h : model.heads) {
    nlohmann::json hj{{"name", h.name}, {"loss", loss_name(h.loss)}, {"layers", nlohmann::json::array()}};
    for (const Layer& l : h.layers) hj["layers"].push_back(layer_json(l));
    j["heads"].push_back(std::move(hj));
  }
  return j;
}

ModelGraph model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("magic") != "GRSP") throw FormatError("bad magic, expected GRSP", 0);
    if (j.at("version") != kModelFormatVersion) {
      throw FormatError("unsupported model format version " + j.at("version").dump(), 0);
    }
    ModelGraph m;
    m.name = j.at("name").get<std::string>();
    m.input_shape = j.at("input_shape").get<Shape>();
    if (!j.at("input_exp").is_null()) m.input_exp = j["input_exp"].get<int>();
    for (std::size_t i = 0; i < j.at("trunk").size(); ++i) {
      m.trunk.push_back(layer_from_json(j["trunk"][i], "trunk[" + std::to_string(i) + "]"));
    }
    for (std::size_t h = 0; h < j.at("heads").size(); ++h) {
      const auto& hj = j["heads"][h];
      Head head;
      head.name = hj.at("name").get<std::string>();
      const auto loss = hj.at("loss").get<std::string>();
      if (loss == "cross_entropy") {
        head.loss = HeadLoss::CrossEntropy;
      } else if (loss == "mean_absolute") {
        head.loss = HeadLoss::MeanAbsolute;
      } else {
        throw FormatError("heads[" + std::to_string(h) + "]: unknown loss " + loss, 0);
      }
      for (std::size_t i = 0; i < hj.at("layers").size(); ++i) {
        head.layers.push_back(layer_from_json(
            hj["layers"][i], "heads[" + std::to_string(h) + "].layers[" + std::to_string(i) + "]"));
      }
      m.heads.push_back(std::move(head));
    }
    m.finalize();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model JSON: ") + e.what(), 0);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("inconsistent layer shapes: ") + e.what(), 0);
  }
}

void save_model(const ModelGraph& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (path.extension() == ".json") {
    out << model_to_json(model).dump(1) << '\n';
  } else {
    const auto bytes = encode_model(model);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ModelGraph load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!bytes.empty() && bytes.front() == '{') {
    try {
      return model_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("malformed model JSON: ") + e.what(), e.byte);
    }
  }
  return decode_model(bytes);
}

}  // namespace graspstack
