#pragma once

#include <span>
#include <vector>

namespace mbs {

/// A point on a value curve: schedule length ratio against fraction of maximum value.
struct CurvePoint {
    double slr;
    double factor;

    bool operator==(CurvePoint const &) const = default;
};

/// Piecewise-linear, non-increasing value-vs-SLR curve.
///
/// The curve is flat at 1.0 up to the initial deadline, interpolates linearly
/// through the interior points, and is 0 from the final deadline onwards. The
/// anchors (d_initial, 1) and (d_final, 0) are stored in the point list, so
/// `points()` always has at least two entries.
class ValueCurve {
public:
    /// Throws std::invalid_argument unless 1 < d_initial < d_final, interior
    /// slr coordinates are strictly increasing inside (d_initial, d_final) and
    /// factors are in [0,1] and non-increasing.
    ValueCurve(double d_initial, double d_final, std::vector<CurvePoint> interior = {});

    double d_initial() const { return points_.front().slr; }
    double d_final() const { return points_.back().slr; }

    /// All points including both anchors.
    std::span<CurvePoint const> points() const { return points_; }

    /// Interior points only (what gets serialized).
    std::span<CurvePoint const> interior() const {
        return std::span<CurvePoint const>(points_).subspan(1, points_.size() - 2);
    }

    /// Interpolated fraction of value at `slr`; requires d_initial < slr < d_final.
    double factor(double slr) const;

    /// Value earned for finishing at `slr`, scaled by `vmax`. Requires slr >= 1.
    double value(double vmax, double slr) const;

    /// Exact area under the vmax-scaled curve from max(from_slr, 1) to d_final.
    double remaining_area(double vmax, double from_slr) const;

    bool operator==(ValueCurve const &) const = default;

private:
    std::vector<CurvePoint> points_;
};

}  // namespace mbs
