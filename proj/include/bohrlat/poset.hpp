#pragma once

// Materialized finite posets: order tables as bitsets, covers, bounds, and a
// brute-force search for order automorphisms. Only the order relation is
// consulted, never the structure of the elements.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "bohrlat/errors.hpp"

namespace bohrlat {

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int size) : size_(size), words_((size + 63) / 64, 0) {}

  int size() const { return size_; }
  void set(int i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend bool operator==(const Bitset&, const Bitset&) = default;

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        const int bit = std::countr_zero(w);
        f(static_cast<int>(k * 64 + bit));
        w &= w - 1;
      }
    }
  }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

class FinitePoset {
 public:
  /// Builds the order table from a predicate leq(i, j) on indices [0, size).
  template <typename Leq>
  static FinitePoset from_relation(int size, Leq&& leq) {
    FinitePoset p;
    p.size_ = size;
    p.up_.assign(size, Bitset(size));
    p.down_.assign(size, Bitset(size));
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) {
        if (i == j || leq(i, j)) {
          p.up_[i].set(j);
          p.down_[j].set(i);
        }
      }
    }
    p.compute_covers();
    return p;
  }

  int size() const { return size_; }
  bool leq(int i, int j) const { return up_[i].test(j); }
  bool less(int i, int j) const { return i != j && leq(i, j); }

  const Bitset& up_set(int i) const { return up_[i]; }
  const Bitset& down_set(int i) const { return down_[i]; }

  /// Elements covering i.
  const std::vector<int>& upper_covers(int i) const { return upper_covers_[i]; }
  /// Elements covered by i.
  const std::vector<int>& lower_covers(int i) const { return lower_covers_[i]; }

  /// j covers i: i < j with nothing strictly between.
  bool covers(int i, int j) const {
    const auto& c = upper_covers_[i];
    return std::find(c.begin(), c.end(), j) != c.end();
  }

  std::optional<int> bottom() const {
    for (int i = 0; i < size_; ++i)
      if (up_[i].count() == size_) return i;
    return std::nullopt;
  }

  std::optional<int> top() const {
    for (int i = 0; i < size_; ++i)
      if (down_[i].count() == size_) return i;
    return std::nullopt;
  }

  /// Covers of the bottom element; empty without a bottom.
  std::vector<int> atoms() const {
    const auto b = bottom();
    if (!b) return {};
    return upper_covers_[*b];
  }

  /// Least upper bound, if it exists.
  std::optional<int> join(int i, int j) const {
    const Bitset common = up_[i] & up_[j];
    std::optional<int> result;
    common.for_each([&](int u) {
      if (!result && up_[u] == common) result = u;
    });
    return result;
  }

  /// Greatest lower bound, if it exists.
  std::optional<int> meet(int i, int j) const {
    const Bitset common = down_[i] & down_[j];
    std::optional<int> result;
    common.for_each([&](int l) {
      if (!result && down_[l] == common) result = l;
    });
    return result;
  }

  /// All order automorphisms, found by backtracking over bijections that
  /// respect the order in both directions. Each result maps index i to
  /// result[i].
  std::vector<std::vector<int>> automorphisms() const {
    std::vector<int> order(size_);
    for (int i = 0; i < size_; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return down_[a].count() < down_[b].count();
    });
    std::vector<int> image(size_, -1);
    std::vector<bool> used(size_, false);
    std::vector<std::vector<int>> found;
    search(order, 0, image, used, found);
    return found;
  }

 private:
  void compute_covers() {
    upper_covers_.assign(size_, {});
    lower_covers_.assign(size_, {});
    for (int i = 0; i < size_; ++i) {
      Bitset strict = up_[i];
      strict.reset(i);
      strict.for_each([&](int j) {
        // j is minimal in the strict up-set of i.
        Bitset between = down_[j] & strict;
        if (between.count() == 1) {
          upper_covers_[i].push_back(j);
          lower_covers_[j].push_back(i);
        }
      });
    }
  }

  bool compatible(int a, int b) const {
    return up_[a].count() == up_[b].count() &&
           down_[a].count() == down_[b].count() &&
           upper_covers_[a].size() == upper_covers_[b].size() &&
           lower_covers_[a].size() == lower_covers_[b].size();
  }

  void search(const std::vector<int>& order, int depth, std::vector<int>& image,
              std::vector<bool>& used,
              std::vector<std::vector<int>>& found) const {
    if (depth == size_) {
      found.push_back(image);
      return;
    }
    const int x = order[depth];
    for (int y = 0; y < size_; ++y) {
      if (used[y] || !compatible(x, y)) continue;
      bool ok = true;
      for (int d = 0; d < depth && ok; ++d) {
        const int w = order[d], v = image[w];
        ok = leq(w, x) == leq(v, y) && leq(x, w) == leq(y, v);
      }
      if (!ok) continue;
      image[x] = y;
      used[y] = true;
      search(order, depth + 1, image, used, found);
      used[y] = false;
      image[x] = -1;
    }
  }

  int size_ = 0;
  std::vector<Bitset> up_, down_;
  std::vector<std::vector<int>> upper_covers_, lower_covers_;
};

}  // namespace bohrlat
