#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cogverify/types.hpp"

namespace cogverify {

/// A real interval with explicit open/closed ends; bounds may be infinite.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    bool contains(double v) const;
    /// Text form as accepted by parse_interval, e.g. "[-15,15]" or "(3,inf)".
    std::string to_string() const;
    bool operator==(const Interval&) const = default;
};

/// Parses "[a,b]", "(a,b]", "[a,b)", "(a,b)"; a and b may be -inf/inf.
Interval parse_interval(const std::string& text);

/// Contiguous, strictly increasing bins over a real axis.
class BinAxis {
public:
    BinAxis() = default;
    /// Throws InputError unless the bins are nonempty, nondegenerate, and tile
    /// a connected range with exactly one owner per shared edge.
    explicit BinAxis(std::vector<Interval> bins);

    /// Index of the bin containing v; values below/above the range clamp to the
    /// first/last bin.
    int locate(double v) const;
    std::size_t size() const { return bins_.size(); }
    const std::vector<Interval>& bins() const { return bins_; }
    bool operator==(const BinAxis&) const = default;

private:
    std::vector<Interval> bins_;
};

enum class AngleSign { LeftPositive, RightPositive };

struct QTable {
    BinAxis angle;     // degrees
    BinAxis distance;  // tiles
    std::vector<double> values;       // row-major: angle bin, then distance bin
    std::vector<std::uint8_t> confident;  // same shape; all 1 when no flags given

    double value(int a, int d) const { return values[index(a, d)]; }
    bool is_confident(int a, int d) const { return confident[index(a, d)] != 0; }
    std::size_t index(int a, int d) const {
        return static_cast<std::size_t>(a) * distance.size() + static_cast<std::size_t>(d);
    }
    bool operator==(const QTable&) const = default;
};

struct QCell {
    double value = 0.0;
    bool confident = true;
    int angle_bin = 0;
    int distance_bin = 0;
};

/// Nine tables, one per (objective, movement).
///
/// Table rows are keyed by angle in the table's own frame: with
/// AngleSign::LeftPositive, positive degrees mean "to the human's left"; with
/// RightPositive the table was recorded with the opposite sign.
class QTableSet {
public:
    QTableSet() = default;
    QTableSet(std::array<QTable, 9> tables, AngleSign sign);

    const QTable& table(Objective o, Movement m) const {
        return tables_[index_of(o) * 3 + index_of(m)];
    }
    AngleSign angle_sign() const { return sign_; }
    bool has_low_confidence() const;

    /// `angle` in radians in the table frame; dist >= 0.
    QCell lookup(Objective o, Movement m, double angle, double dist) const;
    /// `bearing` in radians, counterclockwise-positive (as from signed_angle).
    QCell lookup_bearing(Objective o, Movement m, double bearing, double dist) const;
    double to_table_frame(double bearing) const {
        return sign_ == AngleSign::LeftPositive ? bearing : -bearing;
    }

    bool operator==(const QTableSet&) const = default;

private:
    std::array<QTable, 9> tables_;
    AngleSign sign_ = AngleSign::LeftPositive;
};

/// Degrees, snapped to the nearest integer when within 1e-9 of it so that
/// exact bin edges are not missed through rounding of pi.
double to_degrees_snapped(double radians);

/// Builds a set with shared axes and values from a callback; all cells confident.
QTableSet make_qtables(const BinAxis& angle, const BinAxis& distance, AngleSign sign,
                       const std::function<double(Objective, Movement, int, int)>& value);

QTableSet parse_qtables(const std::string& text);
QTableSet load_qtables(const std::filesystem::path& path);
std::string serialize_qtables(const QTableSet& q);

}  // namespace cogverify
