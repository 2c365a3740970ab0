#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "miscale/fit.hpp"
#include "miscale/mi.hpp"
#include "miscale/sequence.hpp"

namespace miscale {

enum class TextUnit { unicode_char, byte };

TextUnit text_unit_from_string(const std::string& name);

/// Character-to-id map in first-occurrence order; ids are contiguous from 0.
class VocabMap {
 public:
  std::uint32_t id_for(std::uint32_t code_point);  // inserts when unseen
  std::uint32_t size() const { return static_cast<std::uint32_t>(code_points_.size()); }
  std::uint32_t code_point(std::uint32_t id) const { return code_points_.at(id); }

 private:
  std::unordered_map<std::uint32_t, std::uint32_t> ids_;
  std::vector<std::uint32_t> code_points_;
};

/// Encode text into a symbol sequence, extending the shared vocab in place.
/// unicode_char mode decodes UTF-8 (errors name the byte offset); byte mode
/// treats every byte as a symbol. The sequence's vocab_size is the vocab size
/// at return time; callers pooling several splits should reset it to the
/// union size afterwards.
SymbolSequence ingest_text(const std::string& bytes, TextUnit unit, VocabMap& vocab);

/// Decode back to text; round-trips ingest_text exactly.
std::string decode_text(const SymbolSequence& seq, const VocabMap& vocab, TextUnit unit);

/// Approximately geometric integer lag grid from min to max, deduplicated.
std::vector<std::uint64_t> log_lag_grid(std::uint64_t min, std::uint64_t max,
                                        int points_per_decade);

struct SplitAudit {
  std::string label;
  MICurve curve;
  FitResult powerlaw_fit;  // over tau in [50, 1000]
  bool fit_ok = false;
  std::string fit_note;
};

struct AuditReport {
  std::vector<SplitAudit> splits;  // front is the train split
  double divergence = 0.0;  // max over shared lags of |ln I_train - ln I_other|
  bool flag = false;        // true when divergence > ln 2
  std::vector<std::string> notes;
};

/// Compare the train split's MI profile against the other splits. All splits
/// must share one VocabMap (equal vocab_size). Lags exceeding a split's
/// length are omitted for that split and noted. Divergence only uses lags
/// where both estimates are positive.
AuditReport audit(const SymbolSequence& train,
                  const std::vector<std::pair<std::string, SymbolSequence>>& others,
                  const std::vector<std::uint64_t>& lags, Estimator estimator);

void write_audit_report(std::ostream& out, const AuditReport& report);

}  // namespace miscale
