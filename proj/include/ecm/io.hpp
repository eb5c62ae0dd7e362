#ifndef ECM_IO_HPP
#define ECM_IO_HPP

// JSON emission with a fixed float format (17 significant digits), so the
// same run always produces byte-identical reports.

#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecm/critical.hpp"
#include "ecm/elliptic.hpp"

namespace ecm
{

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

inline std::string format_double(double v)
{
    if (!std::isfinite(v))
        return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail
{

inline void write_json(std::string& out, const json& j, int indent, int depth)
{
    const auto newline = [&](int d) {
        if (indent < 0)
            return;
        out += '\n';
        out.append(std::size_t(indent * d), ' ');
    };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            write_json(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i)
                out += ',';
            newline(depth + 1);
            write_json(out, j[i], indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

} // namespace detail

/// Serializes with every float printed as %.17g; indent < 0 gives one line.
inline std::string dump(const json& j, int indent = 2)
{
    std::string out;
    detail::write_json(out, j, indent, 0);
    return out;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const std::vector<cplx>& v)
{
    json a = json::array();
    for (const auto& z : v)
        a.push_back(to_json(z));
    return a;
}

inline json to_json(const CriticalReport& r)
{
    json j;
    j["point"] = to_json(r.point);
    if (r.p)
        j["p"] = to_json(*r.p);
    j["grad_norm"] = r.grad_norm;
    j["hessian_det"] = to_json(r.hessian_det);
    j["in_F"] = r.in_F;
    j["iterations"] = r.iterations;
    return j;
}

inline json to_json(const PathPoint& pt)
{
    json j;
    j["p"] = to_json(pt.p);
    j["t"] = to_json(pt.t);
    j["grad_norm"] = pt.grad_norm;
    j["hess_det"] = to_json(pt.hess_det);
    return j;
}

/// One JSON object per line.
inline void write_jsonl(std::ostream& os, const std::vector<json>& rows)
{
    for (const auto& r : rows)
        os << dump(r, -1) << '\n';
}

} // namespace ecm

#endif
