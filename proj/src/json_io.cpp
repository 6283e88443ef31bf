#include "freeconv/json_io.hpp"

#include "freeconv/errors.hpp"
#include "freeconv/parser.hpp"

namespace freeconv {

namespace {
using nlohmann::json;

json entries_json(const std::map<Word, Scalar>& values) {
    json entries = json::array();
    for (const auto& [w, v] : values)
        entries.push_back({{"word", format_word(w)}, {"value", v.str()}});
    return entries;
}

std::map<Word, Scalar> entries_from_json(const json& j) {
    std::map<Word, Scalar> values;
    for (const auto& e : j.at("entries")) {
        Word w = parse_word(e.at("word").get<std::string>());
        values[w] = parse_scalar(e.at("value").get<std::string>());
    }
    return values;
}

int order_from_json(const json& j, const std::map<Word, Scalar>& values) {
    if (j.contains("order")) return j.at("order").get<int>();
    int m = 0;
    for (const auto& [w, v] : values) m = std::max(m, int(w.size()));
    return m;
}

void check_kind(const json& j, const char* kind) {
    if (j.contains("kind") && j.at("kind").get<std::string>() != kind)
        throw argument_error(std::string("spec table kind mismatch: expected ") + kind);
}
}  // namespace

json spec_to_json(const CumulantSpec& spec) {
    return {{"kind", "cumulant"}, {"order", spec.max_order}, {"entries", entries_json(spec.values)}};
}

json spec_to_json(const LogCumulantSpec& spec) {
    return {{"kind", "logcumulant"},
            {"order", spec.max_order},
            {"entries", entries_json(spec.values)}};
}

json spec_to_json(const MomentFunctional& spec) {
    return {{"kind", "moment"}, {"order", spec.max_order}, {"entries", entries_json(spec.values)}};
}

CumulantSpec cumulant_spec_from_json(const json& j) {
    check_kind(j, "cumulant");
    CumulantSpec s;
    s.values = entries_from_json(j);
    s.max_order = order_from_json(j, s.values);
    return s;
}

LogCumulantSpec logcumulant_spec_from_json(const json& j) {
    check_kind(j, "logcumulant");
    LogCumulantSpec s;
    s.values = entries_from_json(j);
    s.max_order = order_from_json(j, s.values);
    return s;
}

MomentFunctional moment_functional_from_json(const json& j) {
    check_kind(j, "moment");
    MomentFunctional s;
    s.values = entries_from_json(j);
    s.max_order = order_from_json(j, s.values);
    return s;
}

Scalar parse_scalar(const std::string& text) {
    Element e = parse_expression(text);
    if (e.is_zero()) return Scalar();
    if (e.term_count() != 1 || !e.terms().begin()->first.outer.empty() ||
        !e.terms().begin()->first.traces.empty())
        throw argument_error("expected a scalar expression: " + text);
    return e.terms().begin()->second;
}

}  // namespace freeconv
