#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace miscale {

/// An integer-coded sequence over the alphabet {0, ..., vocab_size-1}.
struct SymbolSequence {
  std::vector<std::uint32_t> symbols;
  std::uint32_t vocab_size = 0;

  std::size_t size() const { return symbols.size(); }
  void validate() const;  // throws numeric_error on invariant violation
};

/// A set of sequences sharing one alphabet.
struct Corpus {
  std::vector<SymbolSequence> sequences;
  std::uint32_t vocab_size = 0;
  std::string label;

  std::size_t max_length() const;
  std::size_t total_symbols() const;
  void validate() const;
};

// Corpus file format: first line "#vocab=V", then one sequence per line as
// space-separated integer ids.
Corpus read_corpus(const std::string& path, const std::string& label = "");
Corpus read_corpus(std::istream& in, const std::string& label = "");
void write_corpus(const std::string& path, const Corpus& corpus);
void write_corpus(std::ostream& out, const Corpus& corpus);

}  // namespace miscale
