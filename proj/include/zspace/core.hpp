#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zspace {

// Raised for parameter sets that violate a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised for malformed files and manifests.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ExtendedExponent {
public:
    ExtendedExponent() = default;
    ExtendedExponent(double v) : v_(v) {
        if (std::isnan(v) || !(v > 0.0))
            throw ValidationError("exponent must be positive or inf, got " + std::to_string(v));
    }

    static ExtendedExponent infinity() { return ExtendedExponent(kInf); }

    static ExtendedExponent parse(std::string_view s) {
        if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return infinity();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw ValidationError("cannot parse exponent '" + std::string(s) + "'");
        return ExtendedExponent(v);
    }

    bool is_infinite() const { return std::isinf(v_); }
    double value() const { return v_; }
    double inverse() const { return is_infinite() ? 0.0 : 1.0 / v_; }

    // p' = p/(p-1) on (1,inf), inf on (0,1], 1 at inf.
    ExtendedExponent conjugate() const {
        if (is_infinite()) return ExtendedExponent(1.0);
        if (v_ <= 1.0) return infinity();
        return ExtendedExponent(v_ / (v_ - 1.0));
    }

    friend bool operator==(const ExtendedExponent&, const ExtendedExponent&) = default;

private:
    double v_ = 1.0;
};

struct SpaceSpec {
    ExtendedExponent p, q, r;
    double beta = 0.0;

    friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

// Shortest round-trip is not enough for reports; always 17 significant digits.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format_exponent(const ExtendedExponent& e) { return format_real(e.value()); }

inline std::string format_spec(const SpaceSpec& s) {
    return "(" + format_exponent(s.p) + "," + format_exponent(s.q) + "," + format_exponent(s.r) + "," +
           format_real(s.beta) + ")";
}

// Neumaier compensated sum; order of add() calls fixes the result.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Weighted L^p reduction of nonnegative values; p = inf takes the max.
class LpReducer {
public:
    explicit LpReducer(ExtendedExponent p) : p_(p) {}

    void add(double v, double weight) {
        if (p_.is_infinite()) {
            if (weight > 0.0) max_ = std::max(max_, v);
        } else if (v != 0.0) {
            sum_.add(weight * std::pow(v, p_.value()));
        }
    }

    double value() const {
        if (p_.is_infinite()) return max_;
        double s = sum_.value();
        return s <= 0.0 ? 0.0 : std::pow(s, 1.0 / p_.value());
    }

private:
    ExtendedExponent p_;
    CompensatedSum sum_;
    double max_ = 0.0;
};

inline double relative_difference(double a, double b) {
    double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

// Largest integer m with m < x, treating values within 1e-9 of an integer as that integer.
inline long strict_floor_below(double x) {
    double rx = std::round(x);
    if (std::abs(x - rx) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long>(rx) - 1;
    return static_cast<long>(std::floor(x));
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace zspace
