#include "scalekit/run_log.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scalekit/text.hpp"

namespace scalekit::fit {

namespace {

constexpr const char* kColumns[] = {
    "run_id",     "n_params",  "n_layer",        "batch_tokens", "step",
    "test_loss",  "train_loss", "dataset_tokens", "warmup_steps",
};

std::optional<std::int64_t> parse_count(std::string_view s) {
  auto v = text::parse_double(s);
  if (!v || !(*v >= 0.0) || *v != std::floor(*v) || *v > 9.007199254740992e15) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(*v);
}

// Loss change per decade of steps at the end of a run: ordinary least
// squares of loss on log10(step) over the final tenth of the recorded
// samples, never fewer than the last two. A fixed step-range window
// would usually hold a single sample on log-spaced logs.
std::optional<double> final_slope(std::vector<const RunRecord*>& recs) {
  std::sort(recs.begin(), recs.end(), [](const RunRecord* a, const RunRecord* b) {
    return a->step < b->step;
  });
  std::size_t count = std::max<std::size_t>(2, (recs.size() + 9) / 10);
  if (count > recs.size()) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = recs.size() - count; i < recs.size(); ++i) {
    double x = std::log10(static_cast<double>(recs[i]->step));
    double y = recs[i]->test_loss;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(count);
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace

IngestResult ingest_runs(std::istream& in) {
  IngestResult out;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> column_of;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;

    auto fields = text::split_csv(trimmed);
    if (!saw_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        column_of.emplace(fields[i], i);
      }
      for (const char* col : kColumns) {
        if (std::string_view(col) == "train_loss" ||
            std::string_view(col) == "dataset_tokens") {
          continue;
        }
        if (!column_of.count(col)) {
          throw std::invalid_argument(std::string("run log header missing column: ") + col);
        }
      }
      saw_header = true;
      continue;
    }

    auto reject = [&](const std::string& reason) {
      out.rejected.push_back({line_no, reason});
    };
    auto field = [&](const char* name) -> std::optional<std::string_view> {
      auto it = column_of.find(name);
      if (it == column_of.end() || it->second >= fields.size()) return std::nullopt;
      return std::string_view(fields[it->second]);
    };

    RunRecord rec;
    auto run_id = field("run_id");
    if (!run_id || run_id->empty()) {
      reject("empty run_id");
      continue;
    }
    rec.run_id = std::string(*run_id);

    bool ok = true;
    auto need_positive = [&](const char* name, double& slot) {
      auto raw = field(name);
      auto v = raw ? text::parse_double(*raw) : std::nullopt;
      if (!v || !std::isfinite(*v) || *v <= 0.0) {
        reject(std::string(name) + " must be a positive number");
        ok = false;
        return;
      }
      slot = *v;
    };
    need_positive("n_params", rec.n_params);
    if (!ok) continue;
    need_positive("batch_tokens", rec.batch_tokens);
    if (!ok) continue;
    need_positive("test_loss", rec.test_loss);
    if (!ok) continue;

    auto layer_raw = field("n_layer");
    auto layers = layer_raw ? parse_count(*layer_raw) : std::nullopt;
    if (!layers || *layers < 1) {
      reject("n_layer must be a positive integer");
      continue;
    }
    rec.n_layer = static_cast<std::uint32_t>(*layers);

    auto step_raw = field("step");
    auto step = step_raw ? parse_count(*step_raw) : std::nullopt;
    if (!step || *step < 1) {
      reject("step must be a positive integer");
      continue;
    }
    rec.step = *step;

    auto warm_raw = field("warmup_steps");
    auto warm = warm_raw ? parse_count(*warm_raw) : std::nullopt;
    if (!warm) {
      reject("warmup_steps must be a non-negative integer");
      continue;
    }
    rec.warmup_steps = *warm;

    auto train_raw = field("train_loss");
    if (train_raw && !train_raw->empty()) {
      auto v = text::parse_double(*train_raw);
      if (!v || !std::isfinite(*v) || *v <= 0.0) {
        reject("train_loss must be a positive number when present");
        continue;
      }
      rec.train_loss = *v;
    }
    auto data_raw = field("dataset_tokens");
    if (data_raw && !data_raw->empty()) {
      auto v = text::parse_double(*data_raw);
      if (!v || !std::isfinite(*v) || *v <= 0.0) {
        reject("dataset_tokens must be a positive number when present");
        continue;
      }
      rec.dataset_tokens = *v;
    }

    out.records.push_back(std::move(rec));
  }
  return out;
}

void records_to_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "run_id,n_params,n_layer,batch_tokens,step,test_loss,train_loss,"
         "dataset_tokens,warmup_steps\n";
  for (const auto& r : records) {
    out << r.run_id << ',' << text::format_double(r.n_params) << ',' << r.n_layer
        << ',' << text::format_double(r.batch_tokens) << ',' << r.step << ','
        << text::format_double(r.test_loss) << ',';
    if (r.train_loss) out << text::format_double(*r.train_loss);
    out << ',';
    if (r.dataset_tokens) out << text::format_double(*r.dataset_tokens);
    out << ',' << r.warmup_steps << '\n';
  }
}

ExclusionOutcome apply_exclusions(const std::vector<RunRecord>& records,
                                  const ExclusionPolicy& policy) {
  ExclusionOutcome out;

  std::map<std::string, std::vector<const RunRecord*>> by_run;
  for (const auto& r : records) by_run[r.run_id].push_back(&r);

  std::map<std::string, std::string> run_reason;
  if (policy.drop_non_converged) {
    for (auto& [id, recs] : by_run) {
      auto slope = final_slope(recs);
      if (slope && *slope < -policy.convergence_tol) {
        std::ostringstream reason;
        reason << "run not converged: final loss slope " << *slope
               << " nats/decade exceeds tolerance " << policy.convergence_tol;
        run_reason[id] = reason.str();
      }
    }
  }

  for (const auto& r : records) {
    if (policy.drop_one_layer && r.n_layer == 1) {
      out.excluded.push_back({r, "1-layer model excluded from this fit"});
      continue;
    }
    auto it = run_reason.find(r.run_id);
    if (it != run_reason.end()) {
      out.excluded.push_back({r, it->second});
      continue;
    }
    if (policy.drop_warmup_steps && r.step <= r.warmup_steps) {
      out.excluded.push_back({r, "step inside warmup period"});
      continue;
    }
    out.kept.push_back(r);
  }

  if (out.kept.size() < 2 && !records.empty()) {
    out.warnings.push_back("fewer than two records survive exclusions; fits are impossible");
  }
  return out;
}

}  // namespace scalekit::fit
