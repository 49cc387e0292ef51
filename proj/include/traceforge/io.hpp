#pragma once

/// @file io.hpp
/// @brief Text formats: curve corpora, surface families, fiber-rank files,
/// zero lists, and CSV / JSON emission of sum series.
///
/// Curve file, one curve per line, '#' starts a comment:
///     label : [a1,a2,a3,a4,a6]            optionally followed by  rank=R
/// Family file, polynomials as coefficient lists, constant term first:
///     label : [p1; p2; p3; p4; p6]        each p_i like  0,1  or  [0,1]
/// Rank file: lines "t r_t". Zero list: first line "r R", then "gamma mult".

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "traceforge/analytic_checks.hpp"
#include "traceforge/curve_model.hpp"
#include "traceforge/errors.hpp"
#include "traceforge/lseries_sums.hpp"
#include "traceforge/nagao_surface.hpp"

namespace traceforge::io {

struct CurveEntry {
    WeierstrassQ curve;
    std::optional<unsigned> rank;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

inline std::string_view strip_comment(std::string_view line)
{
    const auto hash = line.find('#');
    return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    for (;;) {
        const auto pos = s.find(sep);
        parts.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos)
            return parts;
        s.remove_prefix(pos + 1);
    }
}

[[noreturn]] inline void fail(std::size_t line_no, const std::string& what)
{
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

inline BigInt parse_bigint(std::string_view text, std::size_t line_no)
{
    text = trim(text);
    std::string_view digits = text;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+'))
        digits.remove_prefix(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos)
        fail(line_no, "not an integer: '" + std::string(text) + "'");
    return BigInt(std::string(text.front() == '+' ? text.substr(1) : text));
}

template <class T>
T parse_number(std::string_view text, std::size_t line_no)
{
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        fail(line_no, "bad number: '" + std::string(text) + "'");
    return value;
}

/// Splits "label : [body] tail" into its three parts.
inline void split_entry(std::string_view line, std::size_t line_no, std::string_view& label, std::string_view& body,
                        std::string_view& tail)
{
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
        fail(line_no, "expected 'label : [...]'");
    label = trim(line.substr(0, colon));
    std::string_view rest = trim(line.substr(colon + 1));
    if (rest.empty() || rest.front() != '[')
        fail(line_no, "expected '[' after ':'");
    int depth = 0;
    std::size_t close = std::string_view::npos;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == '[')
            ++depth;
        else if (rest[i] == ']' && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == std::string_view::npos)
        fail(line_no, "unbalanced brackets");
    body = rest.substr(1, close - 1);
    tail = trim(rest.substr(close + 1));
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        lines.push_back(std::move(line));
    return lines;
}

} // namespace detail

inline std::vector<CurveEntry> parse_curves(std::string_view text)
{
    std::vector<CurveEntry> out;
    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string_view line = detail::strip_comment(raw);
        if (line.empty())
            continue;
        std::string_view label, body, tail;
        detail::split_entry(line, line_no, label, body, tail);
        const auto fields = detail::split(body, ',');
        if (fields.size() != 5)
            detail::fail(line_no, "expected five coefficients");
        std::array<BigInt, 5> a;
        for (std::size_t i = 0; i < 5; ++i)
            a[i] = detail::parse_bigint(fields[i], line_no);
        std::optional<unsigned> rank;
        if (!tail.empty()) {
            if (!tail.starts_with("rank="))
                detail::fail(line_no, "unexpected trailing text '" + std::string(tail) + "'");
            rank = detail::parse_number<unsigned>(tail.substr(5), line_no);
        }
        out.push_back({WeierstrassQ(std::move(a), std::string(label)), rank});
    }
    return out;
}

inline std::vector<SurfaceFamily> parse_families(std::string_view text)
{
    std::vector<SurfaceFamily> out;
    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string_view line = detail::strip_comment(raw);
        if (line.empty())
            continue;
        std::string_view label, body, tail;
        detail::split_entry(line, line_no, label, body, tail);
        if (!tail.empty())
            detail::fail(line_no, "unexpected trailing text");
        const auto polys = detail::split(body, ';');
        if (polys.size() != 5)
            detail::fail(line_no, "expected five polynomials separated by ';'");
        std::array<Poly, 5> a;
        for (std::size_t i = 0; i < 5; ++i) {
            std::string_view p = polys[i];
            if (!p.empty() && p.front() == '[') {
                if (p.back() != ']')
                    detail::fail(line_no, "unbalanced polynomial brackets");
                p = detail::trim(p.substr(1, p.size() - 2));
            }
            std::vector<BigInt> coeffs;
            if (!p.empty())
                for (std::string_view c : detail::split(p, ','))
                    coeffs.push_back(detail::parse_bigint(c, line_no));
            a[i] = Poly(std::move(coeffs));
        }
        out.emplace_back(std::move(a), std::string(label));
    }
    return out;
}

inline RankFile parse_ranks(std::string_view text)
{
    RankFile out;
    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string_view line = detail::strip_comment(raw);
        if (line.empty())
            continue;
        std::istringstream fields{std::string(line)};
        std::string t, r, extra;
        if (!(fields >> t >> r) || (fields >> extra))
            detail::fail(line_no, "expected 't r_t'");
        const auto key = detail::parse_number<std::int64_t>(t, line_no);
        if (!out.ranks.emplace(key, detail::parse_number<unsigned>(r, line_no)).second)
            detail::fail(line_no, "duplicate t = " + t);
    }
    return out;
}

inline ZeroList parse_zeros(std::string_view text)
{
    ZeroList out;
    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    bool have_header = false;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string_view line = detail::strip_comment(raw);
        if (line.empty())
            continue;
        std::istringstream fields{std::string(line)};
        std::string first, second, extra;
        if (!(fields >> first >> second) || (fields >> extra))
            detail::fail(line_no, "expected two fields");
        if (!have_header) {
            if (first != "r")
                detail::fail(line_no, "zero list must start with 'r <order>'");
            out.central = detail::parse_number<unsigned>(second, line_no);
            have_header = true;
            continue;
        }
        out.ordinates.push_back(detail::parse_number<double>(first, line_no));
        out.multiplicities.push_back(detail::parse_number<unsigned>(second, line_no));
    }
    if (!have_header)
        throw Error(ErrorCode::ParseError, "zero list has no 'r' line");
    out.validate();
    return out;
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::vector<CurveEntry> read_curves(const std::filesystem::path& p) { return parse_curves(read_text(p)); }
inline std::vector<SurfaceFamily> read_families(const std::filesystem::path& p) { return parse_families(read_text(p)); }
inline RankFile read_ranks(const std::filesystem::path& p) { return parse_ranks(read_text(p)); }
inline ZeroList read_zeros(const std::filesystem::path& p) { return parse_zeros(read_text(p)); }

/// Shortest round-trip decimal: 17 significant digits.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string series_csv(const SumSeries& series)
{
    std::string out = "x,value\n";
    for (const auto& [x, v] : series.checkpoints)
        out += format_double(x) + "," + format_double(v) + "\n";
    return out;
}

inline nlohmann::ordered_json series_json(const SumSeries& series)
{
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(series.kind));
    j["label"] = series.label;
    auto& pts = j["checkpoints"] = nlohmann::ordered_json::array();
    for (const auto& [x, v] : series.checkpoints)
        pts.push_back({x, v});
    return j;
}

/// Machine-readable error record, one JSON object per line.
inline std::string error_record(const Error& e, std::string_view context = {})
{
    nlohmann::ordered_json j;
    j["error"] = std::string(to_string(e.code()));
    j["message"] = e.what();
    if (!context.empty())
        j["context"] = std::string(context);
    return j.dump();
}

inline void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "short write to " + path.string());
}

/// Grid format: "geom:START:STOP:PER_DECADE" or "list:x1,x2,...".
/// An empty spec means the default geometric grid 2 * 10^(k/8) up to stop.
inline std::vector<double> parse_grid(std::string_view spec, double stop)
{
    spec = detail::trim(spec);
    if (spec.empty())
        return geometric_grid(2.0, stop, 8);
    if (spec.starts_with("list:")) {
        std::vector<double> xs;
        for (std::string_view v : detail::split(spec.substr(5), ','))
            xs.push_back(detail::parse_number<double>(v, 0));
        return xs;
    }
    if (spec.starts_with("geom:")) {
        const auto parts = detail::split(spec.substr(5), ':');
        if (parts.size() != 3)
            throw Error(ErrorCode::ParseError, "grid must be geom:START:STOP:PER_DECADE");
        return geometric_grid(detail::parse_number<double>(parts[0], 0), detail::parse_number<double>(parts[1], 0),
                              detail::parse_number<unsigned>(parts[2], 0));
    }
    throw Error(ErrorCode::ParseError, "unknown grid spec '" + std::string(spec) + "'");
}

} // namespace traceforge::io
