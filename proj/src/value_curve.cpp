#include <mbsched/value_curve.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mbs {

ValueCurve::ValueCurve(double d_initial, double d_final, std::vector<CurvePoint> interior) {
    if (!(std::isfinite(d_initial) && std::isfinite(d_final))) {
        throw std::invalid_argument("value curve deadlines must be finite");
    }
    if (!(d_initial > 1.0)) {
        throw std::invalid_argument("value curve d_initial must be > 1, got " + std::to_string(d_initial));
    }
    if (!(d_final > d_initial)) {
        throw std::invalid_argument("value curve d_final must be > d_initial");
    }

    points_.reserve(interior.size() + 2);
    points_.push_back({d_initial, 1.0});
    for (auto const & p : interior) {
        if (!(p.factor >= 0.0 && p.factor <= 1.0)) {
            throw std::invalid_argument("value curve factor outside [0,1]: " + std::to_string(p.factor));
        }
        points_.push_back(p);
    }
    points_.push_back({d_final, 0.0});

    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i].slr > points_[i - 1].slr)) {
            throw std::invalid_argument("value curve slr coordinates must be strictly increasing within (d_initial, d_final)");
        }
        if (points_[i].factor > points_[i - 1].factor) {
            throw std::invalid_argument("value curve factors must be non-increasing");
        }
    }
}

double ValueCurve::factor(double slr) const {
    assert(slr > d_initial() && slr < d_final());
    // index of the last point with t <= slr
    auto const high = std::upper_bound(points_.begin(), points_.end(), slr,
        [](double s, CurvePoint const & p) { return s < p.slr; });
    auto const low = std::prev(high);
    if (high == points_.end()) {
        return low->factor;
    }
    double const frac = (slr - low->slr) / (high->slr - low->slr);
    return low->factor + frac * (high->factor - low->factor);
}

double ValueCurve::value(double vmax, double slr) const {
    assert(slr >= 1.0);
    if (slr <= d_initial()) {
        return vmax;
    }
    if (slr >= d_final()) {
        return 0.0;
    }
    return vmax * factor(slr);
}

double ValueCurve::remaining_area(double vmax, double from_slr) const {
    double start = std::max(from_slr, 1.0);
    if (start >= d_final()) {
        return 0.0;
    }

    double area = 0.0;
    if (start < d_initial()) {
        area += vmax * (d_initial() - start);
        start = d_initial();
    }

    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        auto const & a = points_[i];
        auto const & b = points_[i + 1];
        if (b.slr <= start) {
            continue;
        }
        double left_slr = a.slr;
        double left_factor = a.factor;
        if (a.slr < start) {
            left_slr = start;
            left_factor = a.factor + (start - a.slr) / (b.slr - a.slr) * (b.factor - a.factor);
        }
        area += 0.5 * (left_factor + b.factor) * (b.slr - left_slr) * vmax;
    }
    return area;
}

}  // namespace mbs
