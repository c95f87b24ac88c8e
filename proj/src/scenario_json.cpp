#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tailbound/scenarios.hpp"

namespace tailbound {

using nlohmann::json;
using nlohmann::ordered_json;

ScenarioError::ScenarioError(Kind kind, std::string message, std::string field, std::size_t line,
                             std::size_t column, ViolationReport report)
    : std::runtime_error(std::move(message)),
      kind_(kind),
      field_(std::move(field)),
      line_(line),
      column_(column),
      report_(std::move(report)) {}

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
    throw ScenarioError(ScenarioError::Kind::schema, "schema error at '" + field + "': " + what, field);
}

// Typed access to one JSON object with unknown-key rejection.
class Obj {
public:
    Obj(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) schema_error(where(), "expected an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, _] : j.items())
            if (!ok.count(key)) schema_error(field(key), "unknown key");
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const char* key) const {
        if (!has(key)) schema_error(field(key), "required key missing");
        return j_.at(key);
    }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double num(const char* key) const {
        const auto& v = at(key);
        if (!v.is_number()) schema_error(field(key), "expected a number");
        return v.get<double>();
    }
    std::optional<double> opt_num(const char* key) const {
        if (!has(key)) return std::nullopt;
        return num(key);
    }
    std::uint64_t count(const char* key) const {
        const auto& v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            schema_error(field(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }
    std::string str(const char* key) const {
        const auto& v = at(key);
        if (!v.is_string()) schema_error(field(key), "expected a string");
        return v.get<std::string>();
    }
    std::string opt_str(const char* key) const { return has(key) ? str(key) : std::string{}; }
    bool flag(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_boolean()) schema_error(field(key), "expected true or false");
        return v.get<bool>();
    }
    std::vector<double> nums(const char* key) const {
        const auto& v = at(key);
        if (!v.is_array()) schema_error(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) schema_error(field(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

private:
    std::string where() const { return path_.empty() ? "<document>" : path_; }
    const json& j_;
    std::string path_;
};

template <typename F>
auto parse_enum(const Obj& o, const char* key, F parse) {
    const auto text = o.str(key);
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        schema_error(o.field(key), e.what());
    }
}

MomentProfile read_profile(const json& j) {
    Obj o(j, "profile", {"mean", "variance", "support_lo", "support_hi", "nonnegative"});
    return MomentProfile{o.num("mean"), o.opt_num("variance"), o.opt_num("support_lo"), o.opt_num("support_hi"),
                         o.flag("nonnegative", false)};
}

BoundedVar read_var(const json& j, const std::string& path) {
    Obj o(j, path, {"lo", "hi", "mean", "variance"});
    return BoundedVar{o.num("lo"), o.num("hi"), o.opt_num("mean"), o.opt_num("variance")};
}

Distribution read_distribution(const json& j, const std::string& path) {
    const Obj probe(j, path, {"type", "p", "lo", "hi", "x1", "x2", "values", "weights"});
    const auto type = probe.str("type");
    if (type == "bernoulli") {
        Obj o(j, path, {"type", "p"});
        return Bernoulli{o.num("p")};
    }
    if (type == "uniform") {
        Obj o(j, path, {"type", "lo", "hi"});
        return Uniform{o.num("lo"), o.num("hi")};
    }
    if (type == "two-point") {
        Obj o(j, path, {"type", "x1", "p", "x2"});
        return TwoPoint{o.num("x1"), o.num("p"), o.num("x2")};
    }
    if (type == "categorical") {
        Obj o(j, path, {"type", "values", "weights"});
        return Categorical{o.nums("values"), o.nums("weights")};
    }
    schema_error(probe.field("type"), "unknown distribution '" + type + "' (bernoulli|uniform|two-point|categorical)");
}

SamplerSpec read_sampler(const json& j, const std::string& path) {
    Obj o(j, path, {"distribution", "n", "aggregate"});
    SamplerSpec s;
    s.dist = read_distribution(o.at("distribution"), o.field("distribution"));
    s.n = o.count("n");
    const auto& agg = o.at("aggregate");
    const auto agg_path = o.field("aggregate");
    if (agg.is_string()) {
        const auto name = agg.get<std::string>();
        if (name == "sum") s.aggregate = AggregateKind::sum;
        else if (name == "mean") s.aggregate = AggregateKind::mean;
        else if (name == "max") s.aggregate = AggregateKind::max;
        else schema_error(agg_path, "unknown aggregate '" + name + "' (sum|mean|max|{custom, params})");
        return s;
    }
    Obj a(agg, agg_path, {"custom", "params"});
    std::map<std::string, std::vector<double>> params;
    if (a.has("params")) {
        const auto& p = a.at("params");
        if (!p.is_object()) schema_error(a.field("params"), "expected an object");
        for (const auto& [key, value] : p.items()) {
            const auto field = a.field("params") + "." + key;
            if (value.is_number()) {
                params[key] = {value.get<double>()};
            } else if (value.is_array() && std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_number(); })) {
                params[key] = value.get<std::vector<double>>();
            } else {
                schema_error(field, "expected a number or an array of numbers");
            }
        }
    }
    s.aggregate = AggregateKind::custom;
    try {
        s.custom = make_custom_aggregate(a.str("custom"), params, s.dist, s.n);
    } catch (const std::invalid_argument& e) {
        schema_error(a.field("custom"), e.what());
    }
    return s;
}

Scenario from_json(const json& j) {
    Obj o(j, "", {"name", "description", "kind", "profile", "vars", "identical_vars", "differences", "mgf", "query",
                  "applicable", "oracle", "expected"});
    Scenario s;
    s.name = o.str("name");
    s.description = o.opt_str("description");
    s.kind = parse_enum(o, "kind", parse_scenario_kind);

    if (o.has("profile")) s.profile = read_profile(o.at("profile"));

    if (o.has("vars") && o.has("identical_vars")) schema_error("vars", "give either vars or identical_vars, not both");
    if (o.has("vars")) {
        const auto& arr = o.at("vars");
        if (!arr.is_array()) schema_error("vars", "expected an array");
        BoundedSumSpec spec;
        for (std::size_t i = 0; i < arr.size(); ++i) spec.vars.push_back(read_var(arr[i], "vars[" + std::to_string(i) + "]"));
        s.sum = std::move(spec);
    }
    if (o.has("identical_vars")) {
        Obj iv(o.at("identical_vars"), "identical_vars", {"n", "lo", "hi", "mean", "variance"});
        s.sum = BoundedSumSpec::identical(iv.count("n"), BoundedVar{iv.num("lo"), iv.num("hi"), iv.opt_num("mean"),
                                                                     iv.opt_num("variance")});
    }

    if (o.has("differences")) {
        const auto& d = o.at("differences");
        Obj probe(d, "differences", {"c", "n", "c_each"});
        if (probe.has("c")) {
            Obj dc(d, "differences", {"c"});
            s.differences = MartingaleDifferenceSpec{dc.nums("c")};
        } else {
            Obj du(d, "differences", {"n", "c_each"});
            s.differences = MartingaleDifferenceSpec::uniform(du.count("n"), du.num("c_each"));
        }
    }

    if (o.has("mgf")) {
        const auto& m = o.at("mgf");
        Obj probe(m, "mgf", {"family", "n", "p", "np", "value"});
        const auto family = probe.str("family");
        if (family == "binomial") {
            Obj b(m, "mgf", {"family", "n", "p"});
            s.mgf = BinomialMgf{b.count("n"), b.num("p")};
        } else if (family == "bernoulli-ebound") {
            Obj b(m, "mgf", {"family", "np"});
            s.mgf = BernoulliEboundMgf{b.num("np")};
        } else if (family == "constant") {
            Obj b(m, "mgf", {"family", "value"});
            s.mgf = ConstantMgf{b.num("value")};
        } else {
            schema_error("mgf.family", "unknown family '" + family + "' (binomial|bernoulli-ebound|constant)");
        }
    }

    {
        Obj q(o.at("query"), "query", {"direction", "threshold_kind", "threshold"});
        s.query.direction = parse_enum(q, "direction", parse_direction);
        s.query.threshold_kind = parse_enum(q, "threshold_kind", parse_threshold_kind);
        s.query.threshold = q.num("threshold");
    }

    const auto& app = o.at("applicable");
    if (!app.is_array()) schema_error("applicable", "expected an array of method names");
    for (std::size_t i = 0; i < app.size(); ++i) {
        if (!app[i].is_string()) schema_error("applicable[" + std::to_string(i) + "]", "expected a string");
        s.applicable.push_back(app[i].get<std::string>());
    }

    if (o.has("oracle")) {
        Obj orc(o.at("oracle"), "oracle", {"exact_binomial", "sampler"});
        if (orc.has("exact_binomial") == orc.has("sampler"))
            schema_error("oracle", "give exactly one of exact_binomial or sampler");
        if (orc.has("exact_binomial")) {
            Obj e(orc.at("exact_binomial"), "oracle.exact_binomial", {"n", "p"});
            s.oracle = ExactBinomialOracle{e.count("n"), e.num("p")};
        } else {
            s.oracle = read_sampler(orc.at("sampler"), "oracle.sampler");
        }
    }

    if (o.has("expected")) {
        const auto& arr = o.at("expected");
        if (!arr.is_array()) schema_error("expected", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Obj e(arr[i], "expected[" + std::to_string(i) + "]", {"method", "value", "tolerance", "relative", "note"});
            s.expected.push_back(ExpectedValue{e.str("method"), e.num("value"), e.opt_num("tolerance").value_or(1e-9),
                                               e.flag("relative", false), e.opt_str("note")});
        }
    }
    return s;
}

void line_column(std::string_view text, std::size_t offset, std::size_t& line, std::size_t& column) {
    line = 1;
    column = 1;
    offset = std::min(offset, text.size());
    for (std::size_t i = 0; i + 1 < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

ordered_json distribution_json(const Distribution& d) {
    ordered_json j;
    if (const auto* b = std::get_if<Bernoulli>(&d)) {
        j["type"] = "bernoulli";
        j["p"] = b->p;
    } else if (const auto* u = std::get_if<Uniform>(&d)) {
        j["type"] = "uniform";
        j["lo"] = u->lo;
        j["hi"] = u->hi;
    } else if (const auto* t = std::get_if<TwoPoint>(&d)) {
        j["type"] = "two-point";
        j["x1"] = t->x1;
        j["p"] = t->p;
        j["x2"] = t->x2;
    } else {
        const auto& c = std::get<Categorical>(d);
        j["type"] = "categorical";
        j["values"] = c.values;
        j["weights"] = c.weights;
    }
    return j;
}

ordered_json var_json(const BoundedVar& v) {
    ordered_json j;
    j["lo"] = v.lo;
    j["hi"] = v.hi;
    if (v.mean) j["mean"] = *v.mean;
    if (v.variance) j["variance"] = *v.variance;
    return j;
}

}  // namespace

Scenario load_scenario(std::string_view document) {
    json j;
    try {
        j = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 0;
        std::size_t column = 0;
        line_column(document, e.byte, line, column);
        throw ScenarioError(ScenarioError::Kind::parse,
                            "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                                ": " + e.what(),
                            {}, line, column);
    }
    Scenario s = from_json(j);
    if (auto report = check(s); !report.empty()) {
        auto message = "invalid scenario '" + s.name + "': " + format_report(report);
        auto first = report.front().field;
        throw ScenarioError(ScenarioError::Kind::invariant, std::move(message), std::move(first), 0, 0,
                            std::move(report));
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(ScenarioError::Kind::parse, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["kind"] = std::string(to_string(s.kind));

    if (s.profile) {
        ordered_json p;
        p["mean"] = s.profile->mean;
        if (s.profile->variance) p["variance"] = *s.profile->variance;
        if (s.profile->support_lo) p["support_lo"] = *s.profile->support_lo;
        if (s.profile->support_hi) p["support_hi"] = *s.profile->support_hi;
        p["nonnegative"] = s.profile->nonnegative;
        j["profile"] = p;
    }
    if (s.sum) {
        const auto& vars = s.sum->vars;
        const bool same = vars.size() > 1 && std::all_of(vars.begin(), vars.end(), [&](const BoundedVar& v) { return v == vars.front(); });
        if (same) {
            ordered_json iv;
            iv["n"] = vars.size();
            const auto first = var_json(vars.front());
            for (const auto& [k, v] : first.items()) iv[k] = v;
            j["identical_vars"] = iv;
        } else {
            ordered_json arr = ordered_json::array();
            for (const auto& v : vars) arr.push_back(var_json(v));
            j["vars"] = arr;
        }
    }
    if (s.differences) {
        const auto& c = s.differences->c;
        ordered_json d;
        if (c.size() > 1 && std::all_of(c.begin(), c.end(), [&](double x) { return x == c.front(); })) {
            d["n"] = c.size();
            d["c_each"] = c.front();
        } else {
            d["c"] = c;
        }
        j["differences"] = d;
    }
    if (s.mgf) {
        ordered_json m;
        if (const auto* b = std::get_if<BinomialMgf>(&*s.mgf)) {
            m["family"] = "binomial";
            m["n"] = b->n;
            m["p"] = b->p;
        } else if (const auto* e = std::get_if<BernoulliEboundMgf>(&*s.mgf)) {
            m["family"] = "bernoulli-ebound";
            m["np"] = e->np;
        } else {
            m["family"] = "constant";
            m["value"] = std::get<ConstantMgf>(*s.mgf).value;
        }
        j["mgf"] = m;
    }

    ordered_json q;
    q["direction"] = std::string(to_string(s.query.direction));
    q["threshold_kind"] = std::string(to_string(s.query.threshold_kind));
    q["threshold"] = s.query.threshold;
    j["query"] = q;
    j["applicable"] = s.applicable;

    if (s.oracle) {
        ordered_json orc;
        if (const auto* e = std::get_if<ExactBinomialOracle>(&*s.oracle)) {
            orc["exact_binomial"] = {{"n", e->n}, {"p", e->p}};
        } else {
            const auto& sp = std::get<SamplerSpec>(*s.oracle);
            ordered_json smp;
            smp["distribution"] = distribution_json(sp.dist);
            smp["n"] = sp.n;
            switch (sp.aggregate) {
                case AggregateKind::sum: smp["aggregate"] = "sum"; break;
                case AggregateKind::mean: smp["aggregate"] = "mean"; break;
                case AggregateKind::max: smp["aggregate"] = "max"; break;
                case AggregateKind::custom: {
                    ordered_json a;
                    a["custom"] = sp.custom->name;
                    if (!sp.custom->params.empty()) {
                        ordered_json params;
                        for (const auto& [k, v] : sp.custom->params) params[k] = v;
                        a["params"] = params;
                    }
                    smp["aggregate"] = a;
                    break;
                }
            }
            orc["sampler"] = smp;
        }
        j["oracle"] = orc;
    }

    if (!s.expected.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& e : s.expected) {
            ordered_json x;
            x["method"] = e.method;
            x["value"] = e.value;
            x["tolerance"] = e.tolerance;
            if (e.relative) x["relative"] = true;
            if (!e.note.empty()) x["note"] = e.note;
            arr.push_back(x);
        }
        j["expected"] = arr;
    }
    return j.dump(2) + "\n";
}

}  // namespace tailbound
