#include "miscale/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "miscale/common.hpp"

namespace miscale {

TextUnit text_unit_from_string(const std::string& name) {
  if (name == "char" || name == "unicode_char") return TextUnit::unicode_char;
  if (name == "byte") return TextUnit::byte;
  throw usage_error("unknown text unit: " + name);
}

std::uint32_t VocabMap::id_for(std::uint32_t code_point) {
  auto [it, inserted] = ids_.try_emplace(code_point, size());
  if (inserted) code_points_.push_back(code_point);
  return it->second;
}

namespace {

// Minimal strict UTF-8 decoder; rejects overlong forms, surrogates and
// out-of-range scalars.
std::uint32_t decode_utf8(const std::string& bytes, std::size_t& pos) {
  const auto fail = [&pos](const char* why) {
    throw io_error(std::string("invalid UTF-8 at byte offset ") + std::to_string(pos) +
                   ": " + why);
  };
  const unsigned char b0 = static_cast<unsigned char>(bytes[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int extra = 0;
  std::uint32_t cp = 0, min_cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    extra = 1;
    cp = b0 & 0x1f;
    min_cp = 0x80;
  } else if ((b0 & 0xf0) == 0xe0) {
    extra = 2;
    cp = b0 & 0x0f;
    min_cp = 0x800;
  } else if ((b0 & 0xf8) == 0xf0) {
    extra = 3;
    cp = b0 & 0x07;
    min_cp = 0x10000;
  } else {
    fail("bad leading byte");
  }
  if (pos + extra >= bytes.size()) fail("truncated multibyte character");
  for (int i = 1; i <= extra; ++i) {
    const unsigned char b = static_cast<unsigned char>(bytes[pos + i]);
    if ((b & 0xc0) != 0x80) fail("bad continuation byte");
    cp = (cp << 6) | (b & 0x3f);
  }
  if (cp < min_cp) fail("overlong encoding");
  if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) fail("invalid scalar value");
  pos += extra + 1;
  return cp;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

}  // namespace

SymbolSequence ingest_text(const std::string& bytes, TextUnit unit, VocabMap& vocab) {
  if (bytes.empty()) throw io_error("ingest_text: empty input");
  SymbolSequence seq;
  if (unit == TextUnit::byte) {
    seq.symbols.reserve(bytes.size());
    for (char c : bytes) seq.symbols.push_back(vocab.id_for(static_cast<unsigned char>(c)));
  } else {
    std::size_t pos = 0;
    while (pos < bytes.size()) seq.symbols.push_back(vocab.id_for(decode_utf8(bytes, pos)));
  }
  seq.vocab_size = vocab.size();
  return seq;
}

std::string decode_text(const SymbolSequence& seq, const VocabMap& vocab, TextUnit unit) {
  std::string out;
  for (std::uint32_t id : seq.symbols) {
    const std::uint32_t cp = vocab.code_point(id);
    if (unit == TextUnit::byte)
      out.push_back(static_cast<char>(cp));
    else
      encode_utf8(cp, out);
  }
  return out;
}

std::vector<std::uint64_t> log_lag_grid(std::uint64_t min, std::uint64_t max,
                                        int points_per_decade) {
  if (min < 1 || min >= max) throw numeric_error("log_lag_grid: need 1 <= min < max");
  if (points_per_decade < 1) throw numeric_error("log_lag_grid: points_per_decade must be >= 1");
  const double lmin = std::log10(static_cast<double>(min));
  const double lmax = std::log10(static_cast<double>(max));
  const int steps = static_cast<int>(std::ceil((lmax - lmin) * points_per_decade - 1e-9));
  std::vector<std::uint64_t> lags;
  for (int k = 0; k <= steps; ++k) {
    const double v = std::pow(10.0, lmin + static_cast<double>(k) / points_per_decade);
    const std::uint64_t lag =
        std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(v)), min, max);
    if (lags.empty() || lag > lags.back()) lags.push_back(lag);
  }
  if (lags.back() != max) lags.push_back(max);
  return lags;
}

AuditReport audit(const SymbolSequence& train,
                  const std::vector<std::pair<std::string, SymbolSequence>>& others,
                  const std::vector<std::uint64_t>& lags, Estimator estimator) {
  train.validate();
  if (others.empty()) throw numeric_error("audit: need at least one comparison split");
  for (const auto& [label, seq] : others) {
    seq.validate();
    if (seq.vocab_size != train.vocab_size)
      throw numeric_error("audit: split '" + label + "' does not share the train vocab");
  }

  AuditReport report;
  const auto run_split = [&](const std::string& label, const SymbolSequence& seq) {
    SplitAudit split;
    split.label = label;
    std::vector<std::uint64_t> usable;
    for (std::uint64_t lag : lags)
      if (lag < seq.size()) usable.push_back(lag);
    if (usable.size() != lags.size())
      report.notes.push_back("split '" + label + "': " +
                             std::to_string(lags.size() - usable.size()) +
                             " lag(s) exceed the split length and were omitted");
    if (usable.empty()) throw numeric_error("audit: no usable lags for split '" + label + "'");
    Corpus corpus;
    corpus.vocab_size = train.vocab_size;
    corpus.label = label;
    corpus.sequences.push_back(seq);
    split.curve = auto_mi_curve(corpus, usable, estimator);

    // Paragraph-level fit window, with the audit threshold of 2e-3 nats.
    MICurve window;
    window.estimator_id = split.curve.estimator_id;
    for (const auto& p : split.curve.points)
      if (p.lag >= 50 && p.lag <= 1000) window.points.push_back(p);
    try {
      split.powerlaw_fit = fit_powerlaw(window, 2e-3);
      split.fit_ok = true;
    } catch (const numeric_error& e) {
      split.fit_note = e.what();
    }
    return split;
  };

  report.splits.push_back(run_split("train", train));
  for (const auto& [label, seq] : others) report.splits.push_back(run_split(label, seq));

  const auto& train_curve = report.splits.front().curve;
  double divergence = 0.0;
  bool any_shared = false;
  for (std::size_t s = 1; s < report.splits.size(); ++s) {
    for (const auto& p : report.splits[s].curve.points) {
      if (!(p.mi > 0.0)) continue;
      const auto it = std::find_if(train_curve.points.begin(), train_curve.points.end(),
                                   [&](const MIPoint& q) { return q.lag == p.lag; });
      if (it == train_curve.points.end() || !(it->mi > 0.0)) continue;
      any_shared = true;
      divergence = std::max(divergence, std::abs(std::log(it->mi) - std::log(p.mi)));
    }
  }
  if (!any_shared)
    throw numeric_error("audit: no shared lag with positive MI in both splits");
  report.divergence = divergence;
  report.flag = divergence > std::numbers::ln2;
  return report;
}

void write_audit_report(std::ostream& out, const AuditReport& report) {
  out << "splits " << report.splits.size() << '\n';
  out << "divergence " << report.divergence << '\n';
  out << "flag " << (report.flag ? "true" : "false") << '\n';
  for (const auto& split : report.splits) {
    out << "split " << split.label << '\n';
    out << "  points " << split.curve.points.size() << '\n';
    if (split.fit_ok) {
      out << "  powerlaw_A " << split.powerlaw_fit.amplitude << '\n';
      out << "  powerlaw_gamma " << split.powerlaw_fit.decay << '\n';
      out << "  powerlaw_ci95_gamma " << split.powerlaw_fit.ci95_decay << '\n';
      out << "  powerlaw_r_squared " << split.powerlaw_fit.r_squared << '\n';
    } else {
      out << "  powerlaw_fit_failed " << split.fit_note << '\n';
    }
  }
  for (const auto& note : report.notes) out << "note " << note << '\n';
}

}  // namespace miscale
