#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ndb {

// Lowercases ASCII letters, splits on any non-alphanumeric byte, keeps digit
// runs as tokens. No stemming or stopword removal: surface token overlap is
// part of the retrieval contract.
std::vector<std::string> tokenize(std::string_view text);

// Trims leading/trailing whitespace and collapses internal runs to one space.
// Answer comparison happens on this normal form; case is preserved.
std::string normalize_answer(std::string_view text);

// FNV-1a over bytes; stable across platforms (never std::hash).
std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 finalizer; used to derive sign bits and to mix bucket indices.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ndb
