#pragma once

// Partition lattices of finite sets X = {0, ..., n-1}, ordered by
// refinement: p <= q iff every block of p lies inside a block of q. The
// bottom is all singletons, the top is {X}.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bohrlat/errors.hpp"
#include "bohrlat/poset.hpp"

namespace bohrlat {

inline constexpr int kMaxGround = 12;

/// A partition stored as its canonical restricted growth string: rgs[i] is
/// the block index of i, blocks numbered by first occurrence.
class Partition {
 public:
  Partition() = default;

  /// Validates that `rgs` is already canonical.
  static Partition from_rgs(std::span<const int> rgs) {
    check_size(static_cast<int>(rgs.size()));
    Partition p;
    p.n_ = static_cast<std::uint8_t>(rgs.size());
    int max_seen = -1;
    for (std::size_t i = 0; i < rgs.size(); ++i) {
      if (rgs[i] < 0 || rgs[i] > max_seen + 1) {
        throw PreconditionError("Partition: not a canonical restricted growth string");
      }
      max_seen = std::max(max_seen, rgs[i]);
      p.rgs_[i] = static_cast<std::uint8_t>(rgs[i]);
    }
    return p;
  }

  static Partition from_rgs(std::initializer_list<int> rgs) {
    return from_rgs(std::span<const int>(rgs.begin(), rgs.size()));
  }

  /// Canonicalizes an arbitrary block labeling (equal labels = same block).
  template <typename Label>
  static Partition from_labels(std::span<const Label> labels) {
    check_size(static_cast<int>(labels.size()));
    Partition p;
    p.n_ = static_cast<std::uint8_t>(labels.size());
    std::vector<Label> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto it = std::find(seen.begin(), seen.end(), labels[i]);
      if (it == seen.end()) {
        p.rgs_[i] = static_cast<std::uint8_t>(seen.size());
        seen.push_back(labels[i]);
      } else {
        p.rgs_[i] = static_cast<std::uint8_t>(it - seen.begin());
      }
    }
    return p;
  }

  /// Builds from explicit blocks, which must cover {0..n-1} disjointly.
  static Partition from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
    check_size(n);
    std::vector<int> labels(n, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (int x : blocks[b]) {
        if (x < 0 || x >= n) throw PreconditionError("Partition: element out of range");
        if (labels[x] != -1) throw PreconditionError("Partition: blocks overlap");
        labels[x] = static_cast<int>(b);
      }
    }
    for (int l : labels) {
      if (l == -1) throw PreconditionError("Partition: blocks do not cover the ground set");
    }
    return from_labels(std::span<const int>(labels));
  }

  static Partition bottom(int n) {
    check_size(n);
    Partition p;
    p.n_ = static_cast<std::uint8_t>(n);
    for (int i = 0; i < n; ++i) p.rgs_[i] = static_cast<std::uint8_t>(i);
    return p;
  }

  static Partition top(int n) {
    check_size(n);
    Partition p;
    p.n_ = static_cast<std::uint8_t>(n);
    return p;
  }

  int size() const { return n_; }
  int operator[](int i) const { return rgs_[i]; }

  std::vector<int> rgs() const { return {rgs_.begin(), rgs_.begin() + n_}; }

  int block_count() const {
    int m = -1;
    for (int i = 0; i < n_; ++i) m = std::max(m, static_cast<int>(rgs_[i]));
    return m + 1;
  }

  /// Blocks in order of first element; each block sorted.
  std::vector<std::vector<int>> blocks() const {
    std::vector<std::vector<int>> out(block_count());
    for (int i = 0; i < n_; ++i) out[rgs_[i]].push_back(i);
    return out;
  }

  bool same_block(int i, int j) const { return rgs_[i] == rgs_[j]; }

  /// RGS digits as a compact label, e.g. "0102".
  std::string to_string() const {
    static constexpr char kDigits[] = "0123456789ab";
    std::string s;
    for (int i = 0; i < n_; ++i) s += kDigits[rgs_[i]];
    return s;
  }

  std::uint64_t key() const {
    std::uint64_t k = n_;
    for (int i = 0; i < n_; ++i) k = (k << 4) | rgs_[i];
    return k;
  }

  friend auto operator<=>(const Partition&, const Partition&) = default;
  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  static void check_size(int n) {
    if (n < 1 || n > kMaxGround) {
      throw PreconditionError("Partition: ground set size must be in [1, " +
                              std::to_string(kMaxGround) + "]");
    }
  }

  std::uint8_t n_ = 0;
  std::array<std::uint8_t, kMaxGround> rgs_{};
};

namespace detail {

inline void require_same_ground(const Partition& p, const Partition& q,
                                const char* what) {
  if (p.size() != q.size()) {
    throw DimensionMismatch(std::string(what) + ": ground set sizes differ");
  }
}

inline int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace detail

/// All partitions of {0..n-1} in lexicographic RGS order.
inline std::vector<Partition> enumerate_partitions(int n) {
  if (n < 1 || n > kMaxGround) {
    throw PreconditionError("enumerate_partitions: n must be in [1, 12]");
  }
  std::vector<Partition> out;
  std::vector<int> rgs(n, 0), prefix_max(n, 0);
  // Odometer over restricted growth strings.
  while (true) {
    out.push_back(Partition::from_rgs(std::span<const int>(rgs)));
    int i = n - 1;
    while (i > 0 && rgs[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (int j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return out;
}

/// p refines q.
inline bool refines(const Partition& p, const Partition& q) {
  detail::require_same_ground(p, q, "refines");
  std::array<int, kMaxGround> target;
  target.fill(-1);
  for (int i = 0; i < p.size(); ++i) {
    int& t = target[p[i]];
    if (t == -1) {
      t = q[i];
    } else if (t != q[i]) {
      return false;
    }
  }
  return true;
}

/// Least upper bound: blocks of the transitive closure of both relations.
inline Partition join(const Partition& p, const Partition& q) {
  detail::require_same_ground(p, q, "join");
  const int n = p.size();
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::array<int, kMaxGround> first_p, first_q;
  first_p.fill(-1);
  first_q.fill(-1);
  for (int i = 0; i < n; ++i) {
    for (auto [first, label] : {std::pair{&first_p, p[i]}, std::pair{&first_q, q[i]}}) {
      int& f = (*first)[label];
      if (f == -1) {
        f = i;
      } else {
        parent[detail::find_root(parent, i)] = detail::find_root(parent, f);
      }
    }
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = detail::find_root(parent, i);
  return Partition::from_labels(std::span<const int>(labels));
}

/// Greatest lower bound: blockwise intersections.
inline Partition meet(const Partition& p, const Partition& q) {
  detail::require_same_ground(p, q, "meet");
  std::vector<int> labels(p.size());
  for (int i = 0; i < p.size(); ++i) labels[i] = p[i] * kMaxGround + q[i];
  return Partition::from_labels(std::span<const int>(labels));
}

/// pi_K: the block K plus singletons.
inline Partition single_block_partition(int n, const std::vector<int>& subset) {
  if (subset.empty()) throw PreconditionError("single_block_partition: K is empty");
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i + 1;
  for (int x : subset) {
    if (x < 0 || x >= n) throw PreconditionError("single_block_partition: element out of range");
    labels[x] = 0;
  }
  return Partition::from_labels(std::span<const int>(labels));
}

/// The n(n-1)/2 partitions pi_{x,y}.
inline std::vector<Partition> atoms(int n) {
  std::vector<Partition> out;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) out.push_back(single_block_partition(n, {x, y}));
  return out;
}

/// q covers p: q arises from p by merging exactly two blocks.
inline bool covers(const Partition& p, const Partition& q) {
  detail::require_same_ground(p, q, "covers");
  return refines(p, q) && p.block_count() == q.block_count() + 1;
}

/// Exactly one block has two or more elements.
inline bool is_F2_direct(const Partition& p) {
  int big = 0;
  for (const auto& b : p.blocks()) big += b.size() >= 2 ? 1 : 0;
  return big == 1;
}

/// { pi_{K(x)} : |K(x)| >= 2 }, one entry per non-singleton block.
inline std::vector<Partition> decompose_as_join(const Partition& p) {
  std::vector<Partition> out;
  for (const auto& b : p.blocks()) {
    if (b.size() >= 2) out.push_back(single_block_partition(p.size(), b));
  }
  return out;
}

inline std::uint64_t bell_number(int n) {
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.back();
}

/// All partitions of an n-set with their refinement order materialized.
class PartitionLattice {
 public:
  static constexpr int kMaxMaterialized = 8;
  static constexpr int kMaxOrderTable = 7;

  explicit PartitionLattice(int n) : n_(n) {
    if (n < 1 || n > kMaxMaterialized) {
      throw PreconditionError("PartitionLattice: n must be in [1, 8]");
    }
    elements_ = enumerate_partitions(n);
    for (int i = 0; i < size(); ++i) index_.emplace(elements_[i].key(), i);
    if (n <= kMaxOrderTable) {
      order_ = FinitePoset::from_relation(size(), [&](int i, int j) {
        return refines(elements_[i], elements_[j]);
      });
      has_order_ = true;
    }
  }

  int ground_size() const { return n_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<Partition>& elements() const { return elements_; }
  const Partition& operator[](int i) const { return elements_[i]; }

  int index_of(const Partition& p) const {
    auto it = index_.find(p.key());
    if (it == index_.end()) throw PreconditionError("PartitionLattice: element not in lattice");
    return it->second;
  }

  bool has_order() const { return has_order_; }

  const FinitePoset& order() const {
    if (!has_order_) throw PreconditionError("PartitionLattice: order table not built for n > 7");
    return order_;
  }

 private:
  int n_;
  std::vector<Partition> elements_;
  std::unordered_map<std::uint64_t, int> index_;
  FinitePoset order_;
  bool has_order_ = false;
};

/// Membership in the single-block class decided from the order alone:
/// p is an atom, or p covers exactly three atoms, or p has at least two atoms
/// below it and any two of them are linked through a third atom whose joins
/// with each cover three atoms.
inline bool is_F2_order_theoretic(const Partition& p, const PartitionLattice& lattice) {
  const FinitePoset& order = lattice.order();
  const int x = lattice.index_of(p);
  const std::vector<int> all_atoms = order.atoms();

  auto covers_three_atoms = [&](int y) {
    int c = 0;
    for (int a : all_atoms) c += order.covers(a, y) ? 1 : 0;
    return c == 3;
  };

  // cond1
  for (int a : all_atoms)
    if (a == x) return true;
  // cond2
  if (covers_three_atoms(x)) return true;
  // cond3, guarded
  std::vector<int> below;
  for (int a : all_atoms)
    if (order.leq(a, x)) below.push_back(a);
  if (below.size() < 2) return false;
  for (std::size_t i = 0; i < below.size(); ++i) {
    for (std::size_t j = i + 1; j < below.size(); ++j) {
      bool linked = false;
      for (int g : below) {
        const auto ag = order.join(below[i], g);
        const auto bg = order.join(below[j], g);
        if (ag && bg && covers_three_atoms(*ag) && covers_three_atoms(*bg)) {
          linked = true;
          break;
        }
      }
      if (!linked) return false;
    }
  }
  return true;
}

/// Image of p under a point map phi: x and y share a block of the result iff
/// phi^{-1}(x), phi^{-1}(y) share a block of p.
inline Partition push_forward(const Partition& p, const std::vector<int>& phi) {
  const int n = p.size();
  if (static_cast<int>(phi.size()) != n) throw DimensionMismatch("push_forward: size mismatch");
  std::vector<int> labels(n, -1);
  for (int x = 0; x < n; ++x) {
    if (phi[x] < 0 || phi[x] >= n || labels[phi[x]] != -1) {
      throw PreconditionError("push_forward: phi is not a bijection");
    }
    labels[phi[x]] = p[x];
  }
  return Partition::from_labels(std::span<const int>(labels));
}

}  // namespace bohrlat
