#include "isoprofile/report.hpp"

#include "isoprofile/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace isoprofile {

void VerificationReport::add(const std::string& name, bool passed, double measured,
                             double tolerance, const std::string& detail)
{
    checks_.push_back({name, passed, measured, tolerance, detail});
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix)
{
    for (const auto& c : other.checks_) {
        CheckResult copy = c;
        if (!prefix.empty())
            copy.name = prefix + "/" + copy.name;
        checks_.push_back(std::move(copy));
    }
    if (!other.data_.empty()) {
        const std::string key = prefix.empty() ? other.title_ : prefix;
        data_[key] = other.data_;
    }
}

bool VerificationReport::all_passed() const { return failures() == 0; }

std::size_t VerificationReport::failures() const
{
    std::size_t n = 0;
    for (const auto& c : checks_)
        if (!c.passed)
            ++n;
    return n;
}

Json VerificationReport::to_json() const
{
    Json j = Json::object();
    j["title"] = title_;
    j["passed"] = all_passed();
    j["failures"] = failures();
    Json list = Json::array();
    for (const auto& c : checks_) {
        Json e = Json::object();
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["measured"] = json_number(c.measured);
        e["tolerance"] = json_number(c.tolerance);
        if (!c.detail.empty())
            e["detail"] = c.detail;
        list.push_back(std::move(e));
    }
    j["checks"] = std::move(list);
    if (!data_.empty())
        j["data"] = data_;
    return j;
}

Json json_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from_json(const Json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf" || s == "+inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
    }
    throw ParseError("expected a number, got " + j.dump());
}

std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos)
        s += ".0";
    return s;
}

namespace {

void write(const Json& j, std::string& out, int indent, int depth)
{
    auto newline = [&](int d) {
        if (indent < 0)
            return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::object: {
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
            out += Json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            write(it.value(), out, indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            write(e, out, indent, depth + 1);
        }
        newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent)
{
    std::string out;
    write(j, out, indent, 0);
    out += '\n';
    return out;
}

}  // namespace isoprofile
