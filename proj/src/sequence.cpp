#include "miscale/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "miscale/common.hpp"

namespace miscale {

void SymbolSequence::validate() const {
  if (symbols.empty()) throw numeric_error("SymbolSequence: length must be >= 1");
  if (vocab_size == 0) throw numeric_error("SymbolSequence: vocab_size must be positive");
  for (std::uint32_t s : symbols) {
    if (s >= vocab_size)
      throw numeric_error("SymbolSequence: symbol id " + std::to_string(s) +
                          " >= vocab_size " + std::to_string(vocab_size));
  }
}

std::size_t Corpus::max_length() const {
  std::size_t m = 0;
  for (const auto& s : sequences) m = std::max(m, s.size());
  return m;
}

std::size_t Corpus::total_symbols() const {
  return std::accumulate(sequences.begin(), sequences.end(), std::size_t{0},
                         [](std::size_t a, const SymbolSequence& s) { return a + s.size(); });
}

void Corpus::validate() const {
  if (sequences.empty()) throw numeric_error("Corpus: must contain at least one sequence");
  for (const auto& s : sequences) {
    if (s.vocab_size != vocab_size)
      throw numeric_error("Corpus: sequence vocab_size mismatch");
    s.validate();
  }
}

Corpus read_corpus(std::istream& in, const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) throw io_error("corpus: empty input");
  const std::string prefix = "#vocab=";
  if (line.rfind(prefix, 0) != 0)
    throw io_error("corpus: first line must be '#vocab=V', got '" + line + "'");
  std::uint32_t vocab = 0;
  {
    const char* first = line.data() + prefix.size();
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, vocab);
    if (ec != std::errc{} || ptr != last || vocab == 0)
      throw io_error("corpus: invalid vocab size in header '" + line + "'");
  }
  Corpus corpus;
  corpus.vocab_size = vocab;
  corpus.label = label;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    SymbolSequence seq;
    seq.vocab_size = vocab;
    const char* p = line.data();
    const char* last = line.data() + line.size();
    while (p != last) {
      while (p != last && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == last) break;
      std::uint32_t v = 0;
      auto [ptr, ec] = std::from_chars(p, last, v);
      if (ec != std::errc{})
        throw io_error("corpus: bad symbol on line " + std::to_string(lineno));
      if (v >= vocab)
        throw io_error("corpus: symbol " + std::to_string(v) + " out of range on line " +
                       std::to_string(lineno));
      seq.symbols.push_back(v);
      p = ptr;
    }
    if (!seq.symbols.empty()) corpus.sequences.push_back(std::move(seq));
  }
  corpus.validate();
  return corpus;
}

Corpus read_corpus(const std::string& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open corpus file: " + path);
  return read_corpus(in, label.empty() ? path : label);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  corpus.validate();
  out << "#vocab=" << corpus.vocab_size << '\n';
  for (const auto& seq : corpus.sequences) {
    for (std::size_t i = 0; i < seq.symbols.size(); ++i) {
      if (i) out << ' ';
      out << seq.symbols[i];
    }
    out << '\n';
  }
}

void write_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write corpus file: " + path);
  write_corpus(out, corpus);
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace miscale
