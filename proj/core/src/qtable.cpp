#include "cogverify/qtable.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <regex>

#include "cogverify/scenario.hpp"
#include "yaml_util.hpp"

namespace cogverify {

using detail::yaml_as;
using detail::yaml_error;

namespace {

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double parse_bound(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError("malformed numeric bound '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw InputError("malformed numeric bound '" + s + "'");
    return v;
}

}  // namespace

bool Interval::contains(double v) const {
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
}

std::string Interval::to_string() const {
    return std::string(lo_closed ? "[" : "(") + format_number(lo) + "," + format_number(hi) +
           (hi_closed ? "]" : ")");
}

Interval parse_interval(const std::string& text) {
    static const std::regex re(R"(^\s*([\[(])\s*([^,\s]+)\s*,\s*([^\]\)\s]+)\s*([\])])\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw InputError("malformed interval '" + text + "'");
    Interval iv;
    iv.lo_closed = m[1] == "[";
    iv.lo = parse_bound(m[2]);
    iv.hi = parse_bound(m[3]);
    iv.hi_closed = m[4] == "]";
    if (std::isinf(iv.lo)) iv.lo_closed = false;
    if (std::isinf(iv.hi)) iv.hi_closed = false;
    return iv;
}

BinAxis::BinAxis(std::vector<Interval> bins) : bins_(std::move(bins)) {
    if (bins_.empty()) throw InputError("bin list is empty");
    for (std::size_t i = 0; i < bins_.size(); ++i) {
        const auto& b = bins_[i];
        if (!(b.lo < b.hi)) throw InputError("bin " + b.to_string() + " is empty or non-monotone");
        if (i == 0) continue;
        const auto& prev = bins_[i - 1];
        if (prev.hi != b.lo)
            throw InputError("bins " + prev.to_string() + " and " + b.to_string() +
                             " are not contiguous and increasing");
        if (prev.hi_closed == b.lo_closed)
            throw InputError("edge " + format_number(b.lo) + " must belong to exactly one of " +
                             prev.to_string() + " and " + b.to_string());
    }
}

int BinAxis::locate(double v) const {
    const auto n = static_cast<int>(bins_.size());
    for (int i = 0; i < n; ++i)
        if (bins_[static_cast<std::size_t>(i)].contains(v)) return i;
    // Above the range, or on an open outer edge.
    return v > bins_.front().lo ? n - 1 : 0;
}

QTableSet::QTableSet(std::array<QTable, 9> tables, AngleSign sign)
    : tables_(std::move(tables)), sign_(sign) {}

bool QTableSet::has_low_confidence() const {
    for (const auto& t : tables_)
        for (auto c : t.confident)
            if (!c) return true;
    return false;
}

double to_degrees_snapped(double radians) {
    const double deg = radians * 180.0 / std::numbers::pi;
    const double r = std::round(deg);
    return std::abs(deg - r) < 1e-9 ? r : deg;
}

QCell QTableSet::lookup(Objective o, Movement m, double angle, double dist) const {
    const QTable& t = table(o, m);
    QCell c;
    c.angle_bin = t.angle.locate(to_degrees_snapped(angle));
    double d = dist;
    const double rd = std::round(d);
    if (std::abs(d - rd) < 1e-9) d = rd;
    c.distance_bin = t.distance.locate(d);
    c.value = t.value(c.angle_bin, c.distance_bin);
    c.confident = t.is_confident(c.angle_bin, c.distance_bin);
    return c;
}

QCell QTableSet::lookup_bearing(Objective o, Movement m, double bearing, double dist) const {
    return lookup(o, m, to_table_frame(bearing), dist);
}

QTableSet make_qtables(const BinAxis& angle, const BinAxis& distance, AngleSign sign,
                       const std::function<double(Objective, Movement, int, int)>& value) {
    std::array<QTable, 9> tables;
    for (auto o : kObjectives)
        for (auto m : kMovements) {
            QTable& t = tables[index_of(o) * 3 + index_of(m)];
            t.angle = angle;
            t.distance = distance;
            t.values.resize(angle.size() * distance.size());
            t.confident.assign(t.values.size(), 1);
            for (std::size_t a = 0; a < angle.size(); ++a)
                for (std::size_t d = 0; d < distance.size(); ++d)
                    t.values[t.index(static_cast<int>(a), static_cast<int>(d))] =
                        value(o, m, static_cast<int>(a), static_cast<int>(d));
        }
    return QTableSet(std::move(tables), sign);
}

namespace {

BinAxis parse_axis(const YAML::Node& n, const std::string& what) {
    detail::require_sequence(n, what);
    std::vector<Interval> bins;
    for (const auto& b : n) {
        try {
            bins.push_back(parse_interval(yaml_as<std::string>(b, what)));
        } catch (const InputError& e) {
            if (e.line() > 0) throw;
            throw yaml_error(b, e.what());
        }
    }
    try {
        return BinAxis(std::move(bins));
    } catch (const InputError& e) {
        throw yaml_error(n, what + ": " + e.what());
    }
}

bool parse_bool(const YAML::Node& n) {
    if (n.IsScalar()) {
        const auto& s = n.Scalar();
        if (s == "1") return true;
        if (s == "0") return false;
    }
    return yaml_as<bool>(n, "confidence flag");
}

template <typename T, typename F>
std::vector<T> parse_matrix(const YAML::Node& n, std::size_t rows, std::size_t cols,
                            const std::string& what, F&& cell) {
    std::vector<T> out;
    out.reserve(rows * cols);
    if (n.IsScalar()) {
        out.assign(rows * cols, cell(n));
        return out;
    }
    detail::require_sequence(n, what, rows);
    for (const auto& row : n) {
        detail::require_sequence(row, what + " row", cols);
        for (const auto& c : row) out.push_back(cell(c));
    }
    return out;
}

AngleSign parse_sign(const YAML::Node& n) {
    const auto s = yaml_as<std::string>(n, "angle_sign");
    if (s == "left_positive") return AngleSign::LeftPositive;
    if (s == "right_positive") return AngleSign::RightPositive;
    throw yaml_error(n, "angle_sign must be 'left_positive' or 'right_positive'");
}

}  // namespace

QTableSet parse_qtables(const std::string& text) {
    const YAML::Node root = detail::yaml_parse(text);
    if (!root.IsMap()) throw InputError("q-table file must be a YAML map", 1, 1);
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (key != "angle_bins" && key != "distance_bins" && key != "tables" && key != "angle_sign")
            throw yaml_error(kv.first, "unknown section '" + key + "'");
    }

    const AngleSign sign = root["angle_sign"] ? parse_sign(root["angle_sign"]) : AngleSign::LeftPositive;
    std::optional<BinAxis> angle_default, dist_default;
    if (root["angle_bins"]) angle_default = parse_axis(root["angle_bins"], "angle_bins");
    if (root["distance_bins"]) dist_default = parse_axis(root["distance_bins"], "distance_bins");

    const auto tables = detail::require(root, "tables");
    if (!tables.IsMap()) throw yaml_error(tables, "tables must map objectives to movements");

    std::array<QTable, 9> out;
    std::array<bool, 9> seen{};
    for (const auto& okv : tables) {
        const auto oname = okv.first.as<std::string>();
        const auto o = parse_objective(oname);
        if (!o) throw yaml_error(okv.first, "unknown objective '" + oname + "'");
        if (!okv.second.IsMap()) throw yaml_error(okv.second, "objective block must be a map");
        for (const auto& mkv : okv.second) {
            const auto mname = mkv.first.as<std::string>();
            const auto m = parse_movement(mname);
            if (!m) throw yaml_error(mkv.first, "unknown movement '" + mname + "'");
            const auto& block = mkv.second;
            const std::string what = "table " + oname + " " + mname;
            if (!block.IsMap()) throw yaml_error(block, what + " must be a map");
            const std::size_t slot = index_of(*o) * 3 + index_of(*m);
            if (seen[slot]) throw yaml_error(mkv.first, "duplicate " + what);
            seen[slot] = true;

            QTable& t = out[slot];
            if (block["angle_bins"]) t.angle = parse_axis(block["angle_bins"], what + " angle_bins");
            else if (angle_default) t.angle = *angle_default;
            else throw yaml_error(block, what + " has no angle_bins");
            if (block["distance_bins"])
                t.distance = parse_axis(block["distance_bins"], what + " distance_bins");
            else if (dist_default) t.distance = *dist_default;
            else throw yaml_error(block, what + " has no distance_bins");

            const std::size_t rows = t.angle.size(), cols = t.distance.size();
            t.values = parse_matrix<double>(detail::require(block, "values"), rows, cols,
                                            what + " values", [&](const YAML::Node& c) {
                                                const double v = yaml_as<double>(c, what + " value");
                                                if (!std::isfinite(v))
                                                    throw yaml_error(c, what + " value must be finite");
                                                return v;
                                            });
            if (block["confidence"])
                t.confident = parse_matrix<std::uint8_t>(
                    block["confidence"], rows, cols, what + " confidence",
                    [](const YAML::Node& c) { return static_cast<std::uint8_t>(parse_bool(c)); });
            else
                t.confident.assign(rows * cols, 1);
        }
    }
    for (auto o : kObjectives)
        for (auto m : kMovements)
            if (!seen[index_of(o) * 3 + index_of(m)])
                throw InputError("missing table " + std::string(to_string(o)) + " " +
                                 std::string(to_string(m)));
    return QTableSet(std::move(out), sign);
}

QTableSet load_qtables(const std::filesystem::path& path) {
    return parse_qtables(read_text_file(path));
}

std::string serialize_qtables(const QTableSet& q) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    auto axis = [&](const BinAxis& a) {
        out << YAML::Flow << YAML::BeginSeq;
        for (const auto& b : a.bins()) out << YAML::DoubleQuoted << b.to_string();
        out << YAML::EndSeq;
    };
    out << YAML::BeginMap;
    out << YAML::Key << "angle_sign" << YAML::Value
        << (q.angle_sign() == AngleSign::LeftPositive ? "left_positive" : "right_positive");
    out << YAML::Key << "tables" << YAML::Value << YAML::BeginMap;
    for (auto o : kObjectives) {
        out << YAML::Key << std::string(to_string(o)) << YAML::Value << YAML::BeginMap;
        for (auto m : kMovements) {
            const QTable& t = q.table(o, m);
            out << YAML::Key << std::string(to_string(m)) << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "angle_bins" << YAML::Value;
            axis(t.angle);
            out << YAML::Key << "distance_bins" << YAML::Value;
            axis(t.distance);
            out << YAML::Key << "values" << YAML::Value << YAML::BeginSeq;
            for (std::size_t a = 0; a < t.angle.size(); ++a) {
                out << YAML::Flow << YAML::BeginSeq;
                for (std::size_t d = 0; d < t.distance.size(); ++d)
                    out << t.value(static_cast<int>(a), static_cast<int>(d));
                out << YAML::EndSeq;
            }
            out << YAML::EndSeq;
            out << YAML::Key << "confidence" << YAML::Value << YAML::BeginSeq;
            for (std::size_t a = 0; a < t.angle.size(); ++a) {
                out << YAML::Flow << YAML::BeginSeq;
                for (std::size_t d = 0; d < t.distance.size(); ++d)
                    out << t.is_confident(static_cast<int>(a), static_cast<int>(d));
                out << YAML::EndSeq;
            }
            out << YAML::EndSeq;
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace cogverify
