// Forward-mode dual numbers with a dynamic number of directions.
// Nesting Dual<Dual<double>> tracks second derivatives, and so on.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace grm {

template <class T>
struct Dual {
    T a{};                  // value
    std::vector<T> b;       // partials, one per seeded direction

    Dual() = default;
    Dual(T value, std::size_t ndirs) : a(std::move(value)), b(ndirs) {}
    Dual(T value, std::vector<T> partials) : a(std::move(value)), b(std::move(partials)) {}
};

inline double leading(double x) { return x; }
template <class T>
double leading(const Dual<T>& d) { return leading(d.a); }

inline double zero_like(double) { return 0.0; }
template <class T>
Dual<T> zero_like(const Dual<T>& d) {
    Dual<T> z;
    z.a = zero_like(d.a);
    z.b.assign(d.b.size(), z.a);
    return z;
}

inline double constant_like(double, double c) { return c; }
template <class T>
Dual<T> constant_like(const Dual<T>& d, double c) {
    Dual<T> z;
    z.a = constant_like(d.a, c);
    auto zp = constant_like(d.a, 0.0);
    z.b.assign(d.b.size(), zp);
    return z;
}

template <class T>
Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) {
    Dual<T> r;
    r.a = x.a + y.a;
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = x.b[i] + y.b[i];
    return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) {
    Dual<T> r;
    r.a = x.a - y.a;
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = x.b[i] - y.b[i];
    return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& x) {
    Dual<T> r;
    r.a = -x.a;
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = -x.b[i];
    return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) {
    Dual<T> r;
    r.a = x.a * y.a;
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = x.b[i] * y.a + x.a * y.b[i];
    return r;
}

template <class T>
Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
    Dual<T> r;
    r.a = x.a / y.a;
    const T inv2 = constant_like(y.a, 1.0) / (y.a * y.a);
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i)
        r.b[i] = (x.b[i] * y.a - x.a * y.b[i]) * inv2;
    return r;
}

template <class T> Dual<T> operator+(const Dual<T>& x, double c) { auto y = constant_like(x, c); return x + y; }
template <class T> Dual<T> operator+(double c, const Dual<T>& x) { return x + c; }
template <class T> Dual<T> operator-(const Dual<T>& x, double c) { auto y = constant_like(x, c); return x - y; }
template <class T> Dual<T> operator-(double c, const Dual<T>& x) { auto y = constant_like(x, c); return y - x; }
template <class T> Dual<T> operator*(const Dual<T>& x, double c) { auto y = constant_like(x, c); return x * y; }
template <class T> Dual<T> operator*(double c, const Dual<T>& x) { return x * c; }
template <class T> Dual<T> operator/(const Dual<T>& x, double c) { auto y = constant_like(x, c); return x / y; }
template <class T> Dual<T> operator/(double c, const Dual<T>& x) { auto y = constant_like(x, c); return y / x; }

using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sin(const Dual<T>& x) {
    Dual<T> r;
    r.a = sin(x.a);
    const T c = cos(x.a);
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = c * x.b[i];
    return r;
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
    Dual<T> r;
    r.a = cos(x.a);
    const T s = -sin(x.a);
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = s * x.b[i];
    return r;
}

template <class T>
Dual<T> exp(const Dual<T>& x) {
    Dual<T> r;
    r.a = exp(x.a);
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = r.a * x.b[i];
    return r;
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
    Dual<T> r;
    r.a = sqrt(x.a);
    const T half_inv = constant_like(x.a, 0.5) / r.a;
    r.b.resize(x.b.size());
    for (std::size_t i = 0; i < x.b.size(); ++i) r.b[i] = half_inv * x.b[i];
    return r;
}

inline double pow_int(double x, int k) {
    if (k < 0) return 1.0 / pow_int(x, -k);
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

template <class T>
Dual<T> pow_int(const Dual<T>& x, int k) {
    if (k < 0) return constant_like(x, 1.0) / pow_int(x, -k);
    Dual<T> r = constant_like(x, 1.0);
    for (int i = 0; i < k; ++i) r = r * x;
    return r;
}

// Seed chart coordinates as directions 0..n-1 for one extra derivative order.
template <class D>
std::vector<Dual<D>> seed(const std::vector<D>& x) {
    const std::size_t n = x.size();
    std::vector<Dual<D>> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i].a = x[i];
        s[i].b.assign(n, zero_like(x[i]));
        s[i].b[i] = constant_like(x[i], 1.0);
    }
    return s;
}

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

}  // namespace grm
