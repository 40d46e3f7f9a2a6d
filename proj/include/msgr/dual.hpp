#pragma once

// Forward-mode tangent propagation. Dual<T, N> carries a value and N tangent
// components of type T; T may itself be a Dual, which gives exact second
// derivatives. A Dual whose tangent is identically zero is marked inactive
// and skips all tangent arithmetic, so seeding a few coordinates of a large
// jet only costs work along the paths that actually depend on them.

#include <array>
#include <cmath>
#include <concepts>
#include <type_traits>

namespace msgr {

template <class T, int N>
class Dual;

template <class T>
struct is_dual : std::false_type {};
template <class T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

inline double value_of(double x) noexcept { return x; }
inline double zero_like(double) noexcept { return 0.0; }

template <class T, int N>
class Dual {
 public:
  using value_type = T;
  static constexpr int width = N;

  Dual() : v_{} {}

  template <class S>
    requires std::is_arithmetic_v<S>
  Dual(S c) : v_(static_cast<double>(c)) {}  // NOLINT(google-explicit-constructor)

  Dual(const T& v)  // NOLINT(google-explicit-constructor)
    requires(!std::is_arithmetic_v<T>)
      : v_(v) {}

  const T& value() const noexcept { return v_; }
  bool live() const noexcept { return live_; }

  T tangent(int k) const { return live_ ? d_[static_cast<std::size_t>(k)] : T{}; }

  void set_tangent(int k, const T& t) {
    activate();
    d_[static_cast<std::size_t>(k)] = t;
  }

  Dual operator-() const {
    Dual r(-v_);
    if (live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = -d_[k];
    }
    return r;
  }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.v_ + b.v_);
    if (a.live_ && b.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] + b.d_[k];
    } else if (a.live_) {
      r.live_ = true;
      r.d_ = a.d_;
    } else if (b.live_) {
      r.live_ = true;
      r.d_ = b.d_;
    }
    return r;
  }

  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.v_ - b.v_);
    if (a.live_ && b.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] - b.d_[k];
    } else if (a.live_) {
      r.live_ = true;
      r.d_ = a.d_;
    } else if (b.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = -b.d_[k];
    }
    return r;
  }

  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v_ * b.v_);
    if (a.live_ && b.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] * b.v_ + a.v_ * b.d_[k];
    } else if (a.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] * b.v_;
    } else if (b.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.v_ * b.d_[k];
    }
    return r;
  }

  friend Dual operator/(const Dual& a, const Dual& b) {
    const T inv = T(1.0) / b.v_;
    Dual r(a.v_ * inv);
    if (a.live_ && b.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = (a.d_[k] - r.v_ * b.d_[k]) * inv;
    } else if (a.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] * inv;
    } else if (b.live_) {
      r.live_ = true;
      const T f = -r.v_ * inv;
      for (int k = 0; k < N; ++k) r.d_[k] = f * b.d_[k];
    }
    return r;
  }

  // Mixed operations with constants (plain numbers or the component type).
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator+(const Dual& a, const S& s) {
    Dual r = a;
    r.v_ = a.v_ + s;
    return r;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator+(const S& s, const Dual& a) {
    return a + s;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator-(const Dual& a, const S& s) {
    Dual r = a;
    r.v_ = a.v_ - s;
    return r;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator-(const S& s, const Dual& a) {
    Dual r = -a;
    r.v_ = s - a.v_;
    return r;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator*(const Dual& a, const S& s) {
    Dual r(a.v_ * s);
    if (a.live_) {
      r.live_ = true;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] * s;
    }
    return r;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator*(const S& s, const Dual& a) {
    return a * s;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator/(const Dual& a, const S& s) {
    const T inv = T(1.0) / T(s);
    return a * inv;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  friend Dual operator/(const S& s, const Dual& a) {
    return Dual(T(s)) / a;
  }

  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  Dual& operator+=(const S& s) {
    v_ = v_ + s;
    return *this;
  }
  template <class S>
    requires(!std::is_same_v<S, Dual> && std::is_convertible_v<S, T>)
  Dual& operator*=(const S& s) {
    return *this = *this * s;
  }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    Dual r(sqrt(a.v_));
    if (a.live_) {
      r.live_ = true;
      const T f = T(0.5) / r.v_;
      for (int k = 0; k < N; ++k) r.d_[k] = a.d_[k] * f;
    }
    return r;
  }

  friend Dual abs(const Dual& a) { return value_of(a.v_) < 0.0 ? -a : a; }

 private:
  void activate() {
    if (!live_) {
      live_ = true;
      d_.fill(T{});
    }
  }

  T v_;
  std::array<T, N> d_;
  bool live_ = false;
};

template <class T, int N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.value());
}

template <class T, int N>
Dual<T, N> zero_like(const Dual<T, N>&) {
  return Dual<T, N>{};
}

}  // namespace msgr
