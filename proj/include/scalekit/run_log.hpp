#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scalekit::fit {

/// One logged observation from a training run. n_params counts
/// non-embedding weights; dataset_tokens is present only for runs on a
/// finite dataset.
struct RunRecord {
  std::string run_id;
  double n_params = 0.0;
  std::uint32_t n_layer = 0;
  double batch_tokens = 0.0;
  std::int64_t step = 0;
  double test_loss = 0.0;  // nats
  std::optional<double> train_loss;
  std::optional<double> dataset_tokens;
  std::int64_t warmup_steps = 0;

  bool operator==(const RunRecord&) const = default;
};

struct RejectedRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::string reason;
};

struct IngestResult {
  std::vector<RunRecord> records;
  std::vector<RejectedRow> rejected;
};

/// Reads comma-separated run logs. The header must contain the columns
/// run_id, n_params, n_layer, batch_tokens, step, test_loss and
/// warmup_steps; train_loss and dataset_tokens are optional and may be
/// left empty per row. Column order is free, unknown columns are
/// ignored. Malformed rows land in the rejection report instead of
/// aborting the whole ingest. A stream with no content at all yields an
/// empty result; a nonempty stream whose header lacks a mandatory
/// column throws std::invalid_argument.
IngestResult ingest_runs(std::istream& in);

// Inverse of ingest_runs, %.17g formatting so values survive the round
// trip bit for bit.
void records_to_csv(const std::vector<RunRecord>& records, std::ostream& out);

/// Which cleaning rules to apply before fitting. for_law() encodes the
/// per-family defaults: shallow 1-layer models and visibly unconverged
/// runs are dropped from the converged-loss fits, warmup steps are
/// dropped everywhere.
struct ExclusionPolicy {
  bool drop_one_layer = false;
  bool drop_non_converged = false;
  bool drop_warmup_steps = true;
  // A run counts as non-converged when its test loss still falls faster
  // than this over the final tenth of its recorded samples (at least the
  // last two), in nats per decade.
  double convergence_tol = 1e-3;
};

struct ExcludedRecord {
  RunRecord record;
  std::string reason;
};

struct ExclusionOutcome {
  std::vector<RunRecord> kept;
  std::vector<ExcludedRecord> excluded;
  std::vector<std::string> warnings;
};

ExclusionOutcome apply_exclusions(const std::vector<RunRecord>& records,
                                  const ExclusionPolicy& policy);

}  // namespace scalekit::fit
