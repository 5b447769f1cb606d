#include "scalekit/arch.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace scalekit::arch {

namespace {

std::uint64_t get_count(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string("missing key: ") + key);
  }
  const auto& v = j.at(key);
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    return v.get<std::uint64_t>();
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d <= 9.007199254740992e15) {
      return static_cast<std::uint64_t>(d);
    }
  }
  throw std::invalid_argument(std::string("key is not a non-negative integer: ") + key);
}

}  // namespace

void TransformerShape::validate() const {
  auto require = [](std::uint64_t v, const char* name) {
    if (v == 0) {
      throw std::invalid_argument(std::string(name) + " must be a positive integer");
    }
  };
  require(n_layer, "n_layer");
  require(d_model, "d_model");
  require(d_ff, "d_ff");
  require(d_attn, "d_attn");
  require(n_heads, "n_heads");
  require(n_vocab, "n_vocab");
  if (d_attn % n_heads != 0) {
    throw std::invalid_argument("d_attn must be divisible by n_heads");
  }
}

TransformerShape TransformerShape::standard(std::uint64_t n_layer, std::uint64_t d_model,
                                            std::uint64_t n_ctx, std::uint64_t n_vocab,
                                            std::uint64_t n_heads) {
  TransformerShape s;
  s.n_layer = n_layer;
  s.d_model = d_model;
  s.d_ff = 4 * d_model;
  s.d_attn = d_model;
  s.n_heads = n_heads;
  s.n_ctx = n_ctx;
  s.n_vocab = n_vocab;
  s.validate();
  return s;
}

TransformerShape TransformerShape::from_json(const nlohmann::json& j) {
  TransformerShape s;
  s.n_layer = get_count(j, "n_layer");
  s.d_model = get_count(j, "d_model");
  s.n_heads = j.contains("n_heads") ? get_count(j, "n_heads") : 1;
  s.n_ctx = get_count(j, "n_ctx");
  s.n_vocab = get_count(j, "n_vocab");
  s.d_attn = j.contains("d_attn") ? get_count(j, "d_attn") : s.d_model;
  s.d_ff = j.contains("d_ff") ? get_count(j, "d_ff") : 4 * s.d_model;
  s.validate();
  return s;
}

nlohmann::json TransformerShape::to_json() const {
  return {
      {"n_layer", n_layer}, {"d_model", d_model}, {"d_ff", d_ff},
      {"d_attn", d_attn},   {"n_heads", n_heads}, {"n_ctx", n_ctx},
      {"n_vocab", n_vocab},
  };
}

ParamBreakdown non_embedding_params(const TransformerShape& shape) {
  shape.validate();
  ParamBreakdown p;
  p.embed = (shape.n_vocab + shape.n_ctx) * shape.d_model;
  p.attn_qkv = shape.n_layer * shape.d_model * 3 * shape.d_attn;
  p.attn_project = shape.n_layer * shape.d_attn * shape.d_model;
  p.feedforward = shape.n_layer * 2 * shape.d_model * shape.d_ff;
  p.total_non_embedding = p.attn_qkv + p.attn_project + p.feedforward;
  return p;
}

FlopBreakdown forward_flops_per_token(const TransformerShape& shape) {
  ParamBreakdown p = non_embedding_params(shape);
  FlopBreakdown f;
  f.embed = 4 * shape.d_model;
  f.attn_qkv = 2 * p.attn_qkv;
  f.attn_mask = 2 * shape.n_layer * shape.n_ctx * shape.d_attn;
  f.attn_project = 2 * p.attn_project;
  f.feedforward = 2 * p.feedforward;
  f.de_embed = 2 * shape.d_model * shape.n_vocab;
  f.c_forward = 2 * p.total_non_embedding + f.attn_mask;
  f.c_train_per_token = 3 * f.c_forward;
  return f;
}

TrainingCompute training_compute(double n_params, double batch_tokens, double steps) {
  auto require_positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument(std::string(name) + " must be finite and > 0");
    }
  };
  require_positive(n_params, "n_params");
  require_positive(batch_tokens, "batch_tokens");
  require_positive(steps, "steps");
  TrainingCompute c;
  c.flops = 6.0 * n_params * batch_tokens * steps;
  c.pf_days = c.flops / kFlopsPerPfDay;
  return c;
}

double lr_hint(double n_params) {
  if (!std::isfinite(n_params) || n_params <= 0.0 || n_params > 1e10) {
    throw std::domain_error("lr_hint is valid only for 0 < n_params <= 1e10");
  }
  return 0.003239 - 0.0001395 * std::log(n_params);
}

}  // namespace scalekit::arch
