#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mill/error.hpp"
#include "mill/types.hpp"

namespace mill {

using SymbolSeq = std::vector<std::string>;

inline constexpr std::string_view kSeparator = "#";

class SequenceError : public Error {
 public:
  enum class Kind { incomplete, trailing, unknown_symbol };
  SequenceError(Kind kind, std::size_t position, const std::string& message)
      : Error(ErrorCode::structure, message), kind_(kind), position_(position) {}
  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

SymbolSeq atomize(const Type& t);
// Types joined by the separator symbol.
SymbolSeq atomize_all(const std::vector<Type>& types);
Type deatomize(const SymbolSeq& s, const Vocabulary& vocab = Vocabulary::standard());
bool recognize(const SymbolSeq& s, const Vocabulary& vocab = Vocabulary::standard());

std::string join_symbols(const SymbolSeq& s);
SymbolSeq split_symbols(std::string_view text);

struct Merge {
  std::string left;
  std::string right;
  friend bool operator==(const Merge&, const Merge&) = default;
};

using MergeTable = std::vector<Merge>;

std::string merged_token(const Merge& m);
bool is_merged_token(std::string_view token);

// nullopt merges to exhaustion.
MergeTable learn_merges(const std::vector<SymbolSeq>& corpus, std::optional<std::size_t> n);
SymbolSeq apply_merges(SymbolSeq s, const MergeTable& table);
SymbolSeq revert_merges(SymbolSeq s, const MergeTable& table);

std::string write_merge_table(const MergeTable& table);
MergeTable read_merge_table(std::string_view text);

}  // namespace mill
