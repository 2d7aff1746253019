#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace isoprofile {

using Json = nlohmann::ordered_json;

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

class VerificationReport {
public:
    explicit VerificationReport(std::string title = {}) : title_(std::move(title)) {}

    void add(CheckResult check) { checks_.push_back(std::move(check)); }
    void add(const std::string& name, bool passed, double measured = 0.0, double tolerance = 0.0,
             const std::string& detail = {});
    // appends the other report's checks, names prefixed with "<prefix>/"
    void merge(const VerificationReport& other, const std::string& prefix = {});

    const std::string& title() const { return title_; }
    const std::vector<CheckResult>& checks() const { return checks_; }
    bool all_passed() const;
    std::size_t failures() const;

    // free-form payload (intervals, margins, ...) emitted next to the checks
    Json& data() { return data_; }
    const Json& data() const { return data_; }

    Json to_json() const;

private:
    std::string title_;
    std::vector<CheckResult> checks_;
    Json data_ = Json::object();
};

// JSON has no inf/nan; those become strings
Json json_number(double x);
double number_from_json(const Json& j);

// deterministic serializer: floats with 17 significant digits
std::string dump_json(const Json& j, int indent = 2);

std::string format_double(double x);

}  // namespace isoprofile
