#ifndef NODALCERT_INTERVAL_HPP
#define NODALCERT_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nodalcert {

/// Closed interval [lo, hi] with outward rounding: every operation widens its
/// result by one ulp per endpoint (more for libm calls), so the true range of
/// the real-valued operation is always enclosed.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    constexpr Interval(double v) : lo(v), hi(v) {}
    constexpr Interval(double l, double h) : lo(l), hi(h) {}

    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    bool contains_zero() const noexcept { return lo <= 0.0 && 0.0 <= hi; }
    double width() const noexcept { return hi - lo; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    /// Mignitude: min |x| over the interval.
    double mig() const noexcept
    {
        if (contains_zero()) {
            return 0.0;
        }
        return std::min(std::abs(lo), std::abs(hi));
    }
    double mag() const noexcept { return std::max(std::abs(lo), std::abs(hi)); }
};

namespace interval_detail {

inline double down(double v, int ulps = 1)
{
    for (int i = 0; i < ulps; ++i) {
        v = std::nextafter(v, -std::numeric_limits<double>::infinity());
    }
    return v;
}

inline double up(double v, int ulps = 1)
{
    for (int i = 0; i < ulps; ++i) {
        v = std::nextafter(v, std::numeric_limits<double>::infinity());
    }
    return v;
}

inline Interval widen(double l, double h, int ulps = 1)
{
    return {down(l, ulps), up(h, ulps)};
}

} // namespace interval_detail

inline Interval operator+(Interval a, Interval b)
{
    return interval_detail::widen(a.lo + b.lo, a.hi + b.hi);
}

inline Interval operator-(Interval a, Interval b)
{
    return interval_detail::widen(a.lo - b.hi, a.hi - b.lo);
}

inline Interval operator-(Interval a)
{
    return {-a.hi, -a.lo};
}

inline Interval operator*(Interval a, Interval b)
{
    const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return interval_detail::widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

inline Interval sqr(Interval a)
{
    const double l = a.lo * a.lo;
    const double h = a.hi * a.hi;
    if (a.contains_zero()) {
        return {0.0, interval_detail::up(std::max(l, h))};
    }
    return interval_detail::widen(std::min(l, h), std::max(l, h));
}

inline Interval exp(Interval a)
{
    // libm exp is faithful to within a couple of ulps
    return {std::max(0.0, interval_detail::down(std::exp(a.lo), 4)),
            interval_detail::up(std::exp(a.hi), 4)};
}

inline Interval sqrt(Interval a)
{
    return {a.lo <= 0.0 ? 0.0 : interval_detail::down(std::sqrt(a.lo)),
            interval_detail::up(std::sqrt(std::max(0.0, a.hi)))};
}

namespace interval_detail {

// True when some t0 + k*2pi lies in [a, b], tested with a relative slack so
// that a rounding error can only enlarge the enclosure.
inline bool hits(double a, double b, double t0)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double slack = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    const double k = std::ceil((a - slack - t0) / two_pi);
    return t0 + k * two_pi <= b + slack;
}

// f is cos or sin; t_max and t_min are the phases of its maximum and minimum.
template <typename F>
Interval trig(Interval a, F f, double t_max, double t_min)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (!(a.width() < two_pi)) {
        return {-1.0, 1.0};
    }
    // libm cos/sin are accurate to about an ulp of the result after exact
    // argument reduction; the bound below is generous
    const double eps = 1e-15 + 4e-16 * std::max(std::abs(a.lo), std::abs(a.hi));
    const double fa = f(a.lo);
    const double fb = f(a.hi);
    double lo = std::min(fa, fb) - eps;
    double hi = std::max(fa, fb) + eps;
    if (hits(a.lo, a.hi, t_max)) {
        hi = 1.0;
    }
    if (hits(a.lo, a.hi, t_min)) {
        lo = -1.0;
    }
    return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

} // namespace interval_detail

inline Interval cos(Interval a)
{
    return interval_detail::trig(a, [](double t) { return std::cos(t); }, 0.0, std::numbers::pi);
}

inline Interval sin(Interval a)
{
    return interval_detail::trig(a, [](double t) { return std::sin(t); }, 0.5 * std::numbers::pi,
                                 1.5 * std::numbers::pi);
}

inline Interval hull(Interval a, Interval b)
{
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

} // namespace nodalcert

#endif
