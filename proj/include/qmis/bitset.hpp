#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "qmis/common.hpp"

namespace qmis {

// Packed bit vector over a fixed universe size.
class DynamicBitset {
 public:
  DynamicBitset() = default;
  explicit DynamicBitset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= (1ULL << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  void clear() { words_.assign(words_.size(), 0); }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::size_t and_count(const DynamicBitset& other) const {
    std::size_t c = 0;
    std::size_t k = words_.size() < other.words_.size() ? words_.size() : other.words_.size();
    for (std::size_t i = 0; i < k; ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return c;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const DynamicBitset& a, const DynamicBitset& b) {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Measurement outcome: n bits with cached Hamming weight.
struct BitString {
  DynamicBitset bits;
  std::uint32_t weight = 0;

  static BitString from_bits(DynamicBitset b) {
    BitString s;
    s.weight = static_cast<std::uint32_t>(b.count());
    s.bits = std::move(b);
    return s;
  }
};

// Vertex subset intended to be independent in its graph.
struct IndependentSet {
  DynamicBitset vertices;
  std::uint32_t size = 0;

  static IndependentSet from_bits(DynamicBitset b) {
    IndependentSet s;
    s.size = static_cast<std::uint32_t>(b.count());
    s.vertices = std::move(b);
    return s;
  }
};

}  // namespace qmis
