#include "gca/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "gca/error.hpp"

namespace gca {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
    if (is_missing(v)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

TimeSeries parse_csv(const std::string& text, const std::string& name, const std::string& unit,
                     const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::map<Year, double> rows;
    std::map<Year, std::size_t> first_line;

    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            std::string h = line;
            h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
            if (h != "year,value") parse_fail(source, lineno, "expected header 'year,value', got '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            parse_fail(source, lineno, "expected two comma-separated fields");
        }
        const std::string ys = trim(line.substr(0, comma));
        const std::string vs = trim(line.substr(comma + 1));

        Year year = 0;
        auto [yp, yec] = std::from_chars(ys.data(), ys.data() + ys.size(), year);
        if (yec != std::errc() || yp != ys.data() + ys.size()) parse_fail(source, lineno, "bad year '" + ys + "'");

        double value = kMissing;
        if (vs != "NA") {
            const char* begin = vs.data();
            if (!vs.empty() && vs.front() == '+') ++begin;
            auto [vp, vec] = std::from_chars(begin, vs.data() + vs.size(), value);
            if (vec != std::errc() || vp != vs.data() + vs.size() || vs.empty()) {
                parse_fail(source, lineno, "bad value '" + vs + "'");
            }
        }
        if (rows.count(year)) {
            throw Error(ErrorCode::DuplicateYear, source + ":" + std::to_string(lineno) + ": year " +
                                                      std::to_string(year) + " already given on line " +
                                                      std::to_string(first_line[year]));
        }
        rows[year] = value;
        first_line[year] = lineno;
    }
    if (!header_seen) parse_fail(source, lineno == 0 ? 1 : lineno, "missing header 'year,value'");

    std::vector<Year> years;
    std::vector<double> values;
    for (const auto& [y, v] : rows) {
        years.push_back(y);
        values.push_back(v);
    }
    return TimeSeries(name, unit, std::move(years), std::move(values));
}

TimeSeries load_csv(const std::filesystem::path& path, const std::string& name, const std::string& unit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), name.empty() ? path.stem().string() : name, unit, path.string());
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "year,value\n";
    const auto years = series.years();
    const auto values = series.values();
    for (std::size_t i = 0; i < years.size(); ++i) out << years[i] << ',' << format_double(values[i]) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace gca
