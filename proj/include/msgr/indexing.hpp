#pragma once

// Ordered-index bookkeeping shared by every module: symmetric metric pairs
// a<=b, nondecreasing derivative strings mu<=nu<=..., and the n(mu nu)
// multiplicities that appear when a symmetric object is stored once.

#include <algorithm>
#include <array>
#include <cstddef>

namespace msgr {

inline constexpr int kDim = 4;
inline constexpr int kMaxDerivOrder = 4;

/// n(ab) = 1 if a == b, 2 otherwise.
constexpr int n_mult(int a, int b) noexcept { return a == b ? 1 : 2; }

/// Number of nondecreasing index strings of length r over {0,1,2,3}.
constexpr int deriv_count(int r) noexcept {
  constexpr std::array<int, 7> counts{1, 4, 10, 20, 35, 56, 84};
  return counts[static_cast<std::size_t>(r)];
}

/// A nondecreasing index string mu1<=mu2<=...<=mur, r <= 4.
struct DerivString {
  int length = 0;
  std::array<int, kMaxDerivOrder> idx{};

  constexpr int operator[](int i) const { return idx[static_cast<std::size_t>(i)]; }

  /// Exponent vector: how many times each direction occurs.
  constexpr std::array<int, kDim> exponents() const {
    std::array<int, kDim> e{};
    for (int i = 0; i < length; ++i) ++e[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    return e;
  }

  /// Product of factorials of the exponents (the m! of a multi-index).
  constexpr int factorial_weight() const {
    int w = 1;
    for (int e : exponents()) {
      for (int k = 2; k <= e; ++k) w *= k;
    }
    return w;
  }

  /// Number of distinct orderings of the string; n(mu nu) for r = 2.
  constexpr int multiplicity() const {
    int num = 1;
    for (int k = 2; k <= length; ++k) num *= k;
    return num / factorial_weight();
  }

  constexpr DerivString with(int tau) const {
    DerivString s = *this;
    int pos = s.length;
    while (pos > 0 && s.idx[static_cast<std::size_t>(pos - 1)] > tau) {
      s.idx[static_cast<std::size_t>(pos)] = s.idx[static_cast<std::size_t>(pos - 1)];
      --pos;
    }
    s.idx[static_cast<std::size_t>(pos)] = tau;
    ++s.length;
    return s;
  }
};

namespace detail {

struct DerivTables {
  // strings[r][rank]
  std::array<std::array<DerivString, 35>, kMaxDerivOrder + 1> strings{};
  // rank[r][code], code = sum idx_i * 4^i over the sorted string
  std::array<std::array<int, 256>, kMaxDerivOrder + 1> rank{};
};

constexpr int deriv_code(const DerivString& s) {
  int code = 0;
  int scale = 1;
  for (int i = 0; i < s.length; ++i) {
    code += s[i] * scale;
    scale *= 4;
  }
  return code;
}

constexpr DerivTables make_deriv_tables() {
  DerivTables t{};
  for (auto& row : t.rank) row.fill(-1);
  for (int r = 0; r <= kMaxDerivOrder; ++r) {
    int count = 0;
    DerivString s{};
    s.length = r;
    // lexicographic enumeration of nondecreasing strings
    auto emit = [&](auto&& self, int pos, int lo) -> void {
      if (pos == r) {
        t.strings[static_cast<std::size_t>(r)][static_cast<std::size_t>(count)] = s;
        t.rank[static_cast<std::size_t>(r)][static_cast<std::size_t>(deriv_code(s))] = count;
        ++count;
        return;
      }
      for (int v = lo; v < kDim; ++v) {
        s.idx[static_cast<std::size_t>(pos)] = v;
        self(self, pos + 1, v);
      }
    };
    emit(emit, 0, 0);
  }
  return t;
}

inline constexpr DerivTables kDerivTables = make_deriv_tables();

}  // namespace detail

constexpr const DerivString& deriv_string(int r, int rank) {
  return detail::kDerivTables.strings[static_cast<std::size_t>(r)][static_cast<std::size_t>(rank)];
}

/// Rank of a nondecreasing string within the lexicographic enumeration.
constexpr int deriv_rank(const DerivString& s) {
  return detail::kDerivTables.rank[static_cast<std::size_t>(s.length)]
                                  [static_cast<std::size_t>(detail::deriv_code(s))];
}

/// Rank of an arbitrary (unsorted) index list.
template <class... I>
constexpr int deriv_rank_of(I... indices) {
  DerivString s{};
  for (int v : {static_cast<int>(indices)...}) s = s.with(v);
  return deriv_rank(s);
}

/// Symmetric pair index: (0,0),(0,1),(0,2),(0,3),(1,1),(1,2),...,(3,3).
constexpr int pair_index(int a, int b) { return deriv_rank_of(a, b); }

constexpr std::array<int, 2> pair_of(int p) {
  const auto& s = deriv_string(2, p);
  return {s[0], s[1]};
}

inline constexpr int kSymPairs = 10;

}  // namespace msgr
