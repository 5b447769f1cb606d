#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include "scalekit/arch.hpp"
#include "scalekit/batch.hpp"
#include "scalekit/errors.hpp"
#include "scalekit/fit.hpp"
#include "scalekit/frontier.hpp"
#include "scalekit/laws.hpp"
#include "scalekit/run_log.hpp"
#include "scalekit/synthetic.hpp"
#include "scalekit/text.hpp"

namespace {

using nlohmann::json;
using namespace scalekit;

struct Constants {
  laws::ScalingConstants k;
  laws::LossNDConstants nd;
  laws::LossNSConstants ns;
};

// The preset picks where the joint surfaces come from; the base
// constant set is always the canonical one. A constants file then
// overrides individual symbols everywhere they appear.
Constants build_constants(const std::string& preset, const std::string& constants_path) {
  Constants c;
  c.k = laws::ScalingConstants::appendix_a();
  if (preset == "appendix_a") {
    c.nd = {c.k.alpha_N, c.k.alpha_D, c.k.N_c, c.k.D_c};
    c.ns = {c.k.alpha_N, c.k.alpha_S, c.k.N_c, c.k.S_c};
  } else if (preset == "table_2") {
    c.nd = laws::LossNDConstants::table_2();
    c.ns = {c.k.alpha_N, c.k.alpha_S, c.k.N_c, c.k.S_c};
  } else if (preset == "table_3") {
    c.nd = {c.k.alpha_N, c.k.alpha_D, c.k.N_c, c.k.D_c};
    c.ns = laws::LossNSConstants::table_3();
  } else {
    throw std::invalid_argument("unknown preset: " + preset +
                                " (expected appendix_a, table_2 or table_3)");
  }

  if (!constants_path.empty()) {
    std::ifstream in(constants_path);
    if (!in) throw std::invalid_argument("cannot open constants file: " + constants_path);
    json j = json::parse(in);
    if (!j.is_object()) throw std::invalid_argument("constants file must hold a JSON object");
    static const std::vector<std::string> known = {
        "alpha_N", "alpha_D", "alpha_C", "alpha_C_min", "alpha_B", "alpha_S",
        "N_c",     "D_c",     "C_c",     "C_c_min",     "B_star",  "S_c"};
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw std::invalid_argument("unknown constant key: " + key);
      }
      if (!value.is_number()) {
        throw std::invalid_argument("constant is not a number: " + key);
      }
    }
    c.k = laws::merge_from_json(c.k, j);
    auto merge = [&j](const char* key, double& slot) {
      if (j.contains(key)) slot = j.at(key).get<double>();
    };
    merge("alpha_N", c.nd.alpha_N);
    merge("alpha_D", c.nd.alpha_D);
    merge("N_c", c.nd.N_c);
    merge("D_c", c.nd.D_c);
    c.nd.validate();
    merge("alpha_N", c.ns.alpha_N);
    merge("alpha_S", c.ns.alpha_S);
    merge("N_c", c.ns.N_c);
    merge("S_c", c.ns.S_c);
    c.ns.validate();
  }
  return c;
}

std::string resolve_format(const std::string& requested, bool has_out_file) {
  if (requested != "auto") return requested;
  if (has_out_file || isatty(fileno(stdout)) == 0) return "json";
  return "table";
}

std::string scalar_to_string(const json& v) {
  if (v.is_number_float()) return text::format_double(v.get<double>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const std::string& prefix, const json& v,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (v.is_object()) {
    for (const auto& [key, value] : v.items()) {
      flatten(prefix.empty() ? key : prefix + "." + key, value, rows);
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      flatten(prefix + "[" + std::to_string(i) + "]", v[i], rows);
    }
  } else {
    rows.emplace_back(prefix, scalar_to_string(v));
  }
}

// An array of uniform objects renders as a column table; everything
// else as key/value rows.
const json* uniform_array_member(const json& doc, std::string& name) {
  if (!doc.is_object()) return nullptr;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array() && !value.empty() && value[0].is_object()) {
      name = key;
      return &value;
    }
  }
  return nullptr;
}

void render_columns(const json& rows, std::ostream& out) {
  std::vector<std::string> headers;
  for (const auto& [key, value] : rows[0].items()) headers.push_back(key);
  std::vector<std::vector<std::string>> cells;
  cells.push_back(headers);
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (const auto& h : headers) {
      line.push_back(row.contains(h) ? scalar_to_string(row.at(h)) : "");
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(headers.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      widths[i] = std::max(widths[i], line[i].size());
    }
  }
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << line[i];
      if (i + 1 < line.size()) {
        out << std::string(widths[i] - line[i].size() + 2, ' ');
      }
    }
    out << '\n';
  }
}

void render_table(const json& doc, std::ostream& out) {
  std::string array_name;
  const json* rows = uniform_array_member(doc, array_name);
  std::vector<std::pair<std::string, std::string>> kv;
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (rows != nullptr && key == array_name) continue;
      flatten(key, value, kv);
    }
  } else {
    flatten("", doc, kv);
  }
  std::size_t width = 0;
  for (const auto& [key, value] : kv) width = std::max(width, key.size());
  for (const auto& [key, value] : kv) {
    out << key << std::string(width - key.size() + 2, ' ') << value << '\n';
  }
  if (rows != nullptr) {
    if (!kv.empty()) out << '\n';
    render_columns(*rows, out);
  }
}

void render_csv(const json& doc, std::ostream& out) {
  std::string array_name;
  const json* rows = uniform_array_member(doc, array_name);
  if (rows != nullptr) {
    std::vector<std::string> headers;
    for (const auto& [key, value] : (*rows)[0].items()) headers.push_back(key);
    for (std::size_t i = 0; i < headers.size(); ++i) {
      out << headers[i] << (i + 1 < headers.size() ? "," : "");
    }
    out << '\n';
    for (const auto& row : *rows) {
      for (std::size_t i = 0; i < headers.size(); ++i) {
        out << (row.contains(headers[i]) ? scalar_to_string(row.at(headers[i])) : "")
            << (i + 1 < headers.size() ? "," : "");
      }
      out << '\n';
    }
    return;
  }
  std::vector<std::pair<std::string, std::string>> kv;
  flatten("", doc, kv);
  out << "key,value\n";
  for (const auto& [key, value] : kv) out << key << ',' << value << '\n';
}

void emit(const json& doc, const std::string& format, const std::string& out_path) {
  std::ostringstream body;
  if (format == "json") {
    body << doc.dump(2) << '\n';
  } else if (format == "csv") {
    render_csv(doc, body);
  } else if (format == "table") {
    render_table(doc, body);
  } else {
    throw std::invalid_argument("unknown format: " + format);
  }
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << body.str();
  }
}

void emit_raw(const std::string& body, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << body;
  }
}

std::vector<double> log_grid(double from, double to, int count) {
  if (!(from > 0.0) || !(to > from)) {
    throw std::invalid_argument("need 0 < from < to for a log-spaced grid");
  }
  if (count < 2) throw std::invalid_argument("need at least 2 grid points");
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    double t = static_cast<double>(i) / (count - 1);
    g.push_back(from * std::pow(to / from, t));
  }
  return g;
}

std::vector<double> parse_grid_list(const std::string& csv, const char* name) {
  std::vector<double> out;
  for (const auto& fieldstr : text::split_csv(csv)) {
    auto v = text::parse_double(fieldstr);
    if (!v || !(*v > 0.0)) {
      throw std::invalid_argument(std::string(name) + " entries must be positive numbers");
    }
    out.push_back(*v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(name) + " must be nonempty");
  return out;
}

json allocation_to_json(const frontier::Allocation& a) {
  return {{"c_min_pf_days", a.c_min},
          {"n_opt_params", a.n_opt},
          {"b_tokens", a.b},
          {"s_min_steps", a.s_min},
          {"d_processed_tokens", a.d_processed},
          {"predicted_loss_nats", a.predicted_loss}};
}

frontier::Mode parse_mode(const std::string& mode) {
  if (mode == "derived") return frontier::Mode::derived;
  if (mode == "empirical") return frontier::Mode::empirical;
  throw std::invalid_argument("unknown mode: " + mode + " (expected derived or empirical)");
}

int run_count(const std::string& shape_path, double batch, double steps,
              const std::string& format, const std::string& out_path) {
  std::ifstream in(shape_path);
  if (!in) throw std::invalid_argument("cannot open shape file: " + shape_path);
  auto shape = arch::TransformerShape::from_json(json::parse(in));
  auto params = arch::non_embedding_params(shape);
  auto flops = arch::forward_flops_per_token(shape);

  json doc;
  doc["shape"] = shape.to_json();
  doc["params"] = {{"embed_params", params.embed},
                   {"attn_qkv_params", params.attn_qkv},
                   {"attn_project_params", params.attn_project},
                   {"feedforward_params", params.feedforward},
                   {"total_non_embedding_params", params.total_non_embedding}};
  doc["flops_per_token"] = {{"embed_flops", flops.embed},
                            {"attn_qkv_flops", flops.attn_qkv},
                            {"attn_mask_flops", flops.attn_mask},
                            {"attn_project_flops", flops.attn_project},
                            {"feedforward_flops", flops.feedforward},
                            {"de_embed_flops", flops.de_embed},
                            {"c_forward_flops", flops.c_forward},
                            {"c_train_flops", flops.c_train_per_token}};
  double n = static_cast<double>(params.total_non_embedding);
  if (n <= 1e10) {
    doc["lr_hint"] = arch::lr_hint(n);
  }
  if (batch > 0.0 && steps > 0.0) {
    auto c = arch::training_compute(n, batch, steps);
    doc["training_compute"] = {{"flops", c.flops}, {"pf_days", c.pf_days}};
  }
  emit(doc, format, out_path);
  return 0;
}

int run_fit(const std::string& runs_path, const std::string& fronts_path,
            std::vector<std::string> law_names, const Constants& c,
            const std::string& format, const std::string& out_path) {
  if (law_names.empty()) throw std::invalid_argument("fit needs at least one --law");
  std::sort(law_names.begin(), law_names.end());
  law_names.erase(std::unique(law_names.begin(), law_names.end()), law_names.end());

  json doc;
  json fits = json::array();
  std::vector<fit::RunRecord> records;
  bool have_records = false;
  for (const auto& name : law_names) {
    fit::LawId law = fit::law_from_string(name);
    fit::FitResult result;
    if (law == fit::LawId::bcrit) {
      if (fronts_path.empty()) {
        throw std::invalid_argument("--law bcrit needs --fronts with a pareto front CSV");
      }
      std::ifstream in(fronts_path);
      if (!in) throw std::invalid_argument("cannot open fronts file: " + fronts_path);
      result = fit::fit_bcrit(batch::fronts_from_csv(in));
    } else if (law == fit::LawId::pareto) {
      throw std::invalid_argument(
          "pareto fronts are fitted per loss level; fit bcrit from a fronts CSV instead");
    } else {
      if (!have_records) {
        if (runs_path.empty()) {
          throw std::invalid_argument("fit needs --runs with a run-log CSV");
        }
        std::ifstream in(runs_path);
        if (!in) throw std::invalid_argument("cannot open runs file: " + runs_path);
        auto ingest = fit::ingest_runs(in);
        records = std::move(ingest.records);
        json rejected = json::array();
        for (const auto& r : ingest.rejected) {
          rejected.push_back({{"line", r.line}, {"reason", r.reason}});
        }
        doc["ingest"] = {{"accepted", records.size()}, {"rejected", rejected}};
        have_records = true;
      }
      result = fit::fit_from_records(records, law, c.k);
    }
    fits.push_back(fit::to_json(result));
  }
  doc["fits"] = std::move(fits);
  emit(doc, format, out_path);
  return 0;
}

int run_predict(const std::string& law_name, const std::string& var, double at,
                double from, double to, int points, const Constants& c,
                const std::string& format, const std::string& out_path) {
  auto grid = log_grid(from, to, points);
  json rows = json::array();
  json constants;
  auto need_at = [&](const char* what) {
    if (!(at > 0.0)) {
      throw std::invalid_argument(std::string("--at must fix ") + what + " for this law");
    }
  };

  if (law_name == "n") {
    for (double x : grid) {
      rows.push_back({{"n_params", x}, {"loss_nats", laws::loss_of_n(x, c.k)}});
    }
    constants = laws::to_json(c.k);
  } else if (law_name == "d") {
    for (double x : grid) {
      rows.push_back({{"d_tokens", x}, {"loss_nats", laws::loss_of_d(x, c.k)}});
    }
    constants = laws::to_json(c.k);
  } else if (law_name == "cmin") {
    for (double x : grid) {
      rows.push_back({{"c_min_pf_days", x}, {"loss_nats", laws::loss_of_cmin(x, c.k)}});
    }
    constants = laws::to_json(c.k);
  } else if (law_name == "bcrit") {
    for (double x : grid) {
      rows.push_back({{"loss_nats", x}, {"b_crit_tokens", laws::critical_batch(x, c.k)}});
    }
    constants = laws::to_json(c.k);
  } else if (law_name == "nd") {
    constants = laws::to_json(c.nd);
    if (var == "n") {
      need_at("d_tokens");
      for (double x : grid) {
        rows.push_back({{"n_params", x},
                        {"d_tokens", at},
                        {"loss_nats", laws::loss_of_nd(x, at, c.nd)},
                        {"overfit_fraction", laws::overfit_fraction(x, at, c.nd)}});
      }
    } else if (var == "d") {
      need_at("n_params");
      for (double x : grid) {
        rows.push_back({{"n_params", at},
                        {"d_tokens", x},
                        {"loss_nats", laws::loss_of_nd(at, x, c.nd)},
                        {"overfit_fraction", laws::overfit_fraction(at, x, c.nd)}});
      }
    } else {
      throw std::invalid_argument("--var must be n or d for this law");
    }
  } else if (law_name == "ns") {
    constants = laws::to_json(c.ns);
    if (var == "n") {
      need_at("s_min_steps");
      for (double x : grid) {
        rows.push_back({{"n_params", x},
                        {"s_min_steps", at},
                        {"loss_nats", laws::loss_of_ns(x, at, c.ns)}});
      }
    } else if (var == "s") {
      need_at("n_params");
      for (double x : grid) {
        rows.push_back({{"n_params", at},
                        {"s_min_steps", x},
                        {"loss_nats", laws::loss_of_ns(at, x, c.ns)}});
      }
    } else {
      throw std::invalid_argument("--var must be n or s for this law");
    }
  } else {
    throw std::invalid_argument("unknown predict law: " + law_name +
                                " (expected n, d, cmin, bcrit, nd or ns)");
  }

  json doc;
  doc["law"] = law_name;
  doc["constants"] = constants;
  doc["points"] = std::move(rows);
  emit(doc, format, out_path);
  return 0;
}

int run_plan(double budget, const std::string& mode_name, const Constants& c,
             const std::string& format, const std::string& out_path) {
  auto mode = parse_mode(mode_name);
  auto a = frontier::optimal_allocation(budget, c.k, mode);
  json doc = allocation_to_json(a);
  doc["mode"] = mode_name;
  emit(doc, format, out_path);
  return 0;
}

int run_frontier(double from, double to, int points, const std::string& mode_name,
                 const Constants& c, const std::string& format,
                 const std::string& out_path) {
  auto mode = parse_mode(mode_name);
  auto sweep = frontier::frontier_sweep(log_grid(from, to, points), c.k, mode);
  if (format == "csv") {
    std::ostringstream body;
    frontier::sweep_to_csv(sweep, body);
    emit_raw(body.str(), out_path);
    return 0;
  }
  json rows = json::array();
  for (const auto& a : sweep) rows.push_back(allocation_to_json(a));
  json doc;
  doc["mode"] = mode_name;
  doc["allocations"] = std::move(rows);
  emit(doc, format, out_path);
  return 0;
}

int run_intersect(const Constants& c, const std::string& format,
                  const std::string& out_path) {
  auto x = frontier::intersection_point(c.k);
  if (!x) {
    std::cerr << "error[NO_INTERSECTION] the data-limited and compute-frontier "
                 "loss laws have equal exponents and never cross\n";
    return 1;
  }
  json doc = {{"c_star_pf_days", x->c_star},
              {"n_star_params", x->n_star},
              {"d_star_tokens", x->d_star},
              {"l_star_nats", x->l_star}};
  emit(doc, format, out_path);
  return 0;
}

int run_synth(const std::string& n_grid, const std::string& d_grid, unsigned n_layer,
              double batch, std::int64_t min_steps, std::int64_t max_steps, int samples,
              std::int64_t warmup, double sigma, std::uint64_t seed, int truncated_run,
              int one_layer_run, const Constants& c, const std::string& out_path) {
  fit::SyntheticDesign design;
  design.n_grid = parse_grid_list(n_grid, "--n-grid");
  if (!d_grid.empty()) design.d_grid = parse_grid_list(d_grid, "--d-grid");
  design.n_layer = n_layer;
  design.batch_tokens = batch;
  design.min_steps = min_steps;
  design.max_steps = max_steps;
  design.samples_per_run = samples;
  design.warmup_steps = warmup;
  design.truncated_run = truncated_run;
  design.one_layer_run = one_layer_run;

  auto runs = fit::generate_synthetic_runs(c.k, design, sigma, seed);
  std::ostringstream body;
  fit::records_to_csv(runs.records, body);
  emit_raw(body.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scaling-law toolkit: parameter/FLOP accounting, law evaluation, "
               "run-log fitting and compute-optimal planning"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string preset = "appendix_a";
  std::string constants_path;
  std::string format = "auto";
  std::string out_path;
  app.add_option("--preset", preset, "constant preset: appendix_a, table_2 or table_3")
      ->capture_default_str();
  app.add_option("--constants", constants_path,
                 "JSON file overriding individual constants by symbol name")
      ->check(CLI::ExistingFile);
  app.add_option("--format", format, "output format: json, csv or table")
      ->check(CLI::IsMember({"auto", "json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write the report to this file instead of stdout");

  auto* count = app.add_subcommand("count", "parameter and FLOP accounting for a shape");
  std::string shape_path;
  double count_batch = 0.0, count_steps = 0.0;
  count->add_option("--shape", shape_path, "transformer shape JSON")
      ->required()
      ->check(CLI::ExistingFile);
  count->add_option("--batch-tokens", count_batch, "add training compute for this batch size");
  count->add_option("--steps", count_steps, "add training compute for this step count");

  auto* fit_cmd = app.add_subcommand("fit", "fit scaling laws to a run log");
  std::string runs_path, fronts_path;
  std::vector<std::string> law_names;
  fit_cmd->add_option("--runs", runs_path, "run-log CSV")->check(CLI::ExistingFile);
  fit_cmd->add_option("--fronts", fronts_path, "pareto front CSV for --law bcrit")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--law", law_names, "law family: n, d, c, cmin, nd, ns or bcrit")
      ->required();

  auto* predict = app.add_subcommand("predict", "evaluate a law over a grid");
  std::string predict_law, predict_var = "n";
  double predict_at = 0.0, predict_from = 0.0, predict_to = 0.0;
  int predict_points = 25;
  predict->add_option("--law", predict_law, "law family: n, d, cmin, bcrit, nd or ns")
      ->required();
  predict->add_option("--var", predict_var, "grid variable for the surfaces (n, d or s)")
      ->capture_default_str();
  predict->add_option("--at", predict_at, "fixed value of the surface's other variable");
  predict->add_option("--from", predict_from, "grid start")->required();
  predict->add_option("--to", predict_to, "grid end")->required();
  predict->add_option("--points", predict_points, "grid size")->capture_default_str();

  auto* plan = app.add_subcommand("plan", "compute-optimal allocation for one budget");
  double plan_budget = 0.0;
  std::string plan_mode = "derived";
  plan->add_option("--budget", plan_budget, "adjusted compute budget in PF-days")
      ->required();
  plan->add_option("--mode", plan_mode, "derived or empirical frontier")
      ->capture_default_str();

  auto* front = app.add_subcommand("frontier", "allocation sweep over a budget grid");
  double front_from = 0.0, front_to = 0.0;
  int front_points = 25;
  std::string front_mode = "derived";
  front->add_option("--from", front_from, "first budget in PF-days")->required();
  front->add_option("--to", front_to, "last budget in PF-days")->required();
  front->add_option("--points", front_points, "grid size")->capture_default_str();
  front->add_option("--mode", front_mode, "derived or empirical frontier")
      ->capture_default_str();

  auto* intersect = app.add_subcommand(
      "intersect", "budget where the data-limited and frontier loss laws cross");

  auto* synth = app.add_subcommand("synth", "generate a synthetic run log");
  std::string synth_n_grid, synth_d_grid;
  unsigned synth_layers = 12;
  double synth_batch = 524288.0, synth_sigma = 0.0;
  std::int64_t synth_min_steps = 64, synth_max_steps = 1 << 20, synth_warmup = 0;
  int synth_samples = 24, synth_truncated = -1, synth_one_layer = -1;
  std::uint64_t synth_seed = 0;
  synth->add_option("--n-grid", synth_n_grid, "comma-separated model sizes")->required();
  synth->add_option("--d-grid", synth_d_grid,
                    "comma-separated dataset sizes (omit for unlimited data)");
  synth->add_option("--n-layer", synth_layers, "layer count stamped on the runs")
      ->capture_default_str();
  synth->add_option("--batch-tokens", synth_batch, "training batch size in tokens")
      ->capture_default_str();
  synth->add_option("--min-steps", synth_min_steps, "first sampled step")
      ->capture_default_str();
  synth->add_option("--max-steps", synth_max_steps, "last sampled step")
      ->capture_default_str();
  synth->add_option("--samples", synth_samples, "log-spaced samples per run")
      ->capture_default_str();
  synth->add_option("--warmup", synth_warmup, "warmup steps stamped on the runs")
      ->capture_default_str();
  synth->add_option("--sigma", synth_sigma, "relative log-normal noise width")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "noise seed")->capture_default_str();
  synth->add_option("--truncate-run", synth_truncated,
                    "emit this run index cut short (unconverged)");
  synth->add_option("--one-layer-run", synth_one_layer,
                    "emit this run index with n_layer = 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[USAGE] " << e.what() << '\n';
    return 1;
  }

  try {
    Constants constants = build_constants(preset, constants_path);
    std::string fmt = resolve_format(format, !out_path.empty());
    if (count->parsed()) {
      return run_count(shape_path, count_batch, count_steps, fmt, out_path);
    }
    if (fit_cmd->parsed()) {
      return run_fit(runs_path, fronts_path, law_names, constants, fmt, out_path);
    }
    if (predict->parsed()) {
      return run_predict(predict_law, predict_var, predict_at, predict_from, predict_to,
                         predict_points, constants, fmt, out_path);
    }
    if (plan->parsed()) {
      return run_plan(plan_budget, plan_mode, constants, fmt, out_path);
    }
    if (front->parsed()) {
      return run_frontier(front_from, front_to, front_points, front_mode, constants, fmt,
                          out_path);
    }
    if (intersect->parsed()) {
      return run_intersect(constants, fmt, out_path);
    }
    if (synth->parsed()) {
      return run_synth(synth_n_grid, synth_d_grid, synth_layers, synth_batch,
                       synth_min_steps, synth_max_steps, synth_samples, synth_warmup,
                       synth_sigma, synth_seed, synth_truncated, synth_one_layer,
                       constants, out_path);
    }
  } catch (const scalekit::InfeasibleSizeRatio& e) {
    std::cerr << "error[INFEASIBLE] " << e.what()
              << " (minimum feasible ratio " << text::format_double(e.min_ratio) << ")\n";
    return 1;
  } catch (const scalekit::FitError& e) {
    std::cerr << "error[FIT_FAILED] " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error[BAD_JSON] " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error[DOMAIN] " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[BAD_INPUT] " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[INTERNAL] " << e.what() << '\n';
    return 1;
  }
  return 0;
}
