#include "gof/eventfile.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "gof/error.hpp"

namespace gof {

Sample read_events(std::istream& in, const std::string& source) {
    std::vector<double> coords;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::size_t columns = 0;
        const char* p = line.c_str();
        for (;;) {
            while (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r') ++p;
            if (*p == '\0') break;
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            const bool separator_follows =
                *end == '\0' || *end == ' ' || *end == '\t' || *end == ',' || *end == '\r';
            if (end == p || !separator_follows) {
                throw ParseError(source + ":" + std::to_string(lineno) + ": cannot parse value");
            }
            if (!std::isfinite(v)) {
                throw ParseError(source + ":" + std::to_string(lineno) + ": non-finite value");
            }
            coords.push_back(v);
            ++columns;
            p = end;
        }
        if (dim == 0) {
            dim = columns;
        } else if (columns != dim) {
            throw ParseError(source + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(dim) + " columns, found " + std::to_string(columns));
        }
    }
    if (dim == 0) {
        throw ParseError(source + ": no observations");
    }
    return Sample(dim, std::move(coords));
}

Sample read_event_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open event file " + path.string());
    }
    return read_events(in, path.string());
}

void write_events(std::ostream& out, const Sample& sample) {
    char buf[40];
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto p = sample.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", p[k]);
            out << (k ? " " : "") << buf;
        }
        out << '\n';
    }
}

void write_event_file(const std::filesystem::path& path, const Sample& sample) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot write event file " + path.string());
    }
    write_events(out, sample);
}

}  // namespace gof
