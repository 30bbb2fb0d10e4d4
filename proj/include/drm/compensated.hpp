#pragma once

#include <cmath>

namespace drm {

/// Double-double accumulator (about 32 significant digits).
///
/// The price sums behind the least-squares normal equations cancel
/// catastrophically once the perturbation has decayed: t * sum(p^2) and
/// (sum p)^2 agree in their leading digits while their difference only grows
/// linearly in t. Holding the sums as unevaluated pairs keeps the difference
/// accurate to working precision.
class Compensated {
public:
    constexpr Compensated() = default;
    constexpr Compensated(double hi, double lo = 0.0) : hi_(hi), lo_(lo) {}

    double value() const { return hi_ + lo_; }
    double hi() const { return hi_; }
    double lo() const { return lo_; }

    Compensated& operator+=(double x)
    {
        auto [s, e] = two_sum(hi_, x);
        e += lo_;
        auto [h, l] = fast_two_sum(s, e);
        hi_ = h;
        lo_ = l;
        return *this;
    }

    Compensated& operator+=(const Compensated& other)
    {
        auto [s, e] = two_sum(hi_, other.hi_);
        auto [t, f] = two_sum(lo_, other.lo_);
        e += t;
        auto [h1, l1] = fast_two_sum(s, e);
        l1 += f;
        auto [h, l] = fast_two_sum(h1, l1);
        hi_ = h;
        lo_ = l;
        return *this;
    }

    /// Adds a*b with the product's rounding error retained.
    void add_product(double a, double b)
    {
        const double p = a * b;
        const double pe = std::fma(a, b, -p);
        *this += Compensated(p, pe);
    }

    friend Compensated operator+(Compensated a, const Compensated& b) { return a += b; }
    friend Compensated operator-(const Compensated& a) { return {-a.hi_, -a.lo_}; }
    friend Compensated operator-(Compensated a, const Compensated& b) { return a += -b; }

    friend Compensated operator*(const Compensated& a, const Compensated& b)
    {
        const double p = a.hi_ * b.hi_;
        double e = std::fma(a.hi_, b.hi_, -p);
        e += a.hi_ * b.lo_ + a.lo_ * b.hi_;
        auto [h, l] = fast_two_sum(p, e);
        return {h, l};
    }

    friend Compensated operator*(const Compensated& a, double b) { return a * Compensated(b); }

    friend bool operator==(const Compensated&, const Compensated&) = default;

private:
    struct Pair {
        double hi;
        double lo;
    };

    static Pair two_sum(double a, double b)
    {
        const double s = a + b;
        const double bb = s - a;
        const double e = (a - (s - bb)) + (b - bb);
        return {s, e};
    }

    static Pair fast_two_sum(double a, double b)
    {
        const double s = a + b;
        const double e = b - (s - a);
        return {s, e};
    }

    double hi_ = 0.0;
    double lo_ = 0.0;
};

} // namespace drm
