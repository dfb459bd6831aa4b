#include "normgeo/json_io.hpp"

#include "normgeo/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace normgeo {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InputError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw InputError("trailing characters in number '" + s + "'");
    return v;
}

namespace {

// indent < 0 selects the single-line form.
void dump(const Json& j, int indent, std::string& out) {
    const bool flat = indent < 0;
    const std::string nl = flat ? "" : "\n";
    const std::string sep = flat ? "," : ",\n";
    const std::string pad(flat ? 0 : static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(flat ? 0 : static_cast<std::size_t>(indent + 1) * 2, ' ');
    const int next = flat ? -1 : indent + 1;
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{" + nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
            if (!first) out += sep;
            first = false;
            out += pad_in + Json(it.key()).dump() + (flat ? ":" : ": ");
            dump(it.value(), next, out);
        }
        out += nl + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[" + nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += sep;
            out += pad_in;
            dump(j[i], next, out);
        }
        out += nl + pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_double(x) : "null";
        return;
    }
    default: out += j.dump(); return;
    }
}

}  // namespace

std::string canonical_dump(const Json& j) {
    std::string out;
    dump(j, 0, out);
    out += "\n";
    return out;
}

std::string canonical_line(const Json& j) {
    std::string out;
    dump(j, -1, out);
    out += "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw InputError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace normgeo
