#pragma once

#include <cstdint>

#include <json.hpp>

namespace scalekit::arch {

inline constexpr double kFlopsPerPfDay = 8.64e19;

/// Decoder-only Transformer hyperparameters. Only the fields that enter
/// the leading-order parameter and FLOP counts are kept; biases and
/// layer-norm weights are sub-leading and ignored throughout.
struct TransformerShape {
  std::uint64_t n_layer = 0;
  std::uint64_t d_model = 0;
  std::uint64_t d_ff = 0;
  std::uint64_t d_attn = 0;
  std::uint64_t n_heads = 0;
  std::uint64_t n_ctx = 0;  // tokens; 0 is a permitted degenerate case
  std::uint64_t n_vocab = 0;

  // Throws std::invalid_argument on a zero field (n_ctx excepted, which
  // may be zero for context-free accounting) or when d_attn is not a
  // multiple of n_heads.
  void validate() const;

  // Standard ratios: d_attn = d_model, d_ff = 4 * d_model.
  static TransformerShape standard(std::uint64_t n_layer, std::uint64_t d_model,
                                   std::uint64_t n_ctx, std::uint64_t n_vocab,
                                   std::uint64_t n_heads = 1);

  // Accepts the seven field names above; d_attn and d_ff may be omitted
  // and default to d_model and 4 * d_model. The result is validated.
  static TransformerShape from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Weight counts itemized by layer role. `embed` covers token and positional
/// embeddings and is deliberately excluded from the non-embedding total,
/// which is the model-size variable N of all the scaling laws.
struct ParamBreakdown {
  std::uint64_t embed = 0;
  std::uint64_t attn_qkv = 0;
  std::uint64_t attn_project = 0;
  std::uint64_t feedforward = 0;
  std::uint64_t total_non_embedding = 0;
};

/// Forward-pass FLOPs per token, itemized. c_forward counts only the
/// non-embedding work, 2N plus the context-dependent attention term;
/// the embed and de_embed rows are reported but excluded from it.
struct FlopBreakdown {
  std::uint64_t embed = 0;
  std::uint64_t attn_qkv = 0;
  std::uint64_t attn_mask = 0;
  std::uint64_t attn_project = 0;
  std::uint64_t feedforward = 0;
  std::uint64_t de_embed = 0;
  std::uint64_t c_forward = 0;
  std::uint64_t c_train_per_token = 0;  // backward pass costs twice the forward
};

// N = 2 * d_model * n_layer * (2 * d_attn + d_ff), itemized.
ParamBreakdown non_embedding_params(const TransformerShape& shape);

// c_forward = 2N + 2 * n_layer * n_ctx * d_attn. The context term uses
// d_attn per the itemized table; it coincides with the d_model variant
// for standard shapes.
FlopBreakdown forward_flops_per_token(const TransformerShape& shape);

struct TrainingCompute {
  double flops = 0.0;
  double pf_days = 0.0;
};

// C = 6 * N * B * S, the standard training-compute estimate.
TrainingCompute training_compute(double n_params, double batch_tokens, double steps);

// Rule-of-thumb Adam learning rate, 0.003239 - 0.0001395 * ln(N).
// Throws std::domain_error outside 0 < N <= 1e10, where the linear-in-log
// form stops being meaningful.
double lr_hint(double n_params);

}  // namespace scalekit::arch
