#include "tailbound/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tailbound {

namespace {

constexpr const char* kSchemaVersion = "1";

std::string fmt_short(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

// Numbers go through fmt17 so that JSON and CSV print the same digits.
std::string jnum(double x) {
    if (!std::isfinite(x)) return quote(fmt17(x));
    return fmt17(x);
}

std::string jopt(const std::optional<double>& x) { return x ? jnum(*x) : "null"; }

std::string csv_opt(const std::optional<double>& x) { return x ? fmt17(*x) : std::string{}; }

std::string jbool(bool b) { return b ? "true" : "false"; }

// Minimal ordered writer for one flat-ish JSON document.
class JsonOut {
public:
    JsonOut& open(const char* key = nullptr) { return raw_open(key, '{'); }
    JsonOut& open_array(const char* key) { return raw_open(key, '['); }
    JsonOut& close() {
        const char bracket = stack_.back();
        stack_.pop_back();
        first_ = false;
        out_ << '\n' << indent() << (bracket == '{' ? '}' : ']');
        return *this;
    }
    JsonOut& field(const char* key, const std::string& json_value) {
        sep();
        out_ << quote(key) << ": " << json_value;
        return *this;
    }
    JsonOut& item(const std::string& json_value) {
        sep();
        out_ << json_value;
        return *this;
    }
    std::string str() const { return out_.str() + "\n"; }

private:
    JsonOut& raw_open(const char* key, char bracket) {
        if (!stack_.empty()) sep();
        if (key != nullptr) out_ << quote(key) << ": ";
        out_ << bracket;
        stack_.push_back(bracket);
        first_ = true;
        return *this;
    }
    void sep() {
        if (!first_) out_ << ',';
        out_ << '\n' << indent();
        first_ = false;
    }
    std::string indent() const { return std::string(2 * stack_.size(), ' '); }

    std::ostringstream out_;
    std::vector<char> stack_;
    bool first_{true};
};

void bound_fields(JsonOut& j, const BoundResult& r) {
    j.field("method", quote(r.method))
        .field("value", jnum(r.value))
        .field("log_value", jnum(r.log_value))
        .field("raw_log_value", jnum(r.raw_log_value))
        .field("clamped", jbool(r.clamped))
        .field("optimal_param", jopt(r.optimal_param));
}

const char* kBoundHeader = "method,value,log_value,raw_log_value,clamped,optimal_param";

std::string bound_csv(const BoundResult& r) {
    return csv_field(r.method) + "," + fmt17(r.value) + "," + fmt17(r.log_value) + "," + fmt17(r.raw_log_value) +
           "," + (r.clamped ? "true" : "false") + "," + csv_opt(r.optimal_param);
}

std::string bound_human_line(const BoundResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %-13s %-13s %s%s", r.method.c_str(), fmt_short(r.value).c_str(),
                  fmt_short(r.log_value).c_str(), r.optimal_param ? fmt_short(*r.optimal_param).c_str() : "-",
                  r.clamped ? "  (clamped to 1)" : "");
    return buf;
}

std::string oracle_name(const Scenario& s) {
    if (!s.oracle) return "none";
    return std::holds_alternative<ExactBinomialOracle>(*s.oracle) ? "exact-binomial" : "monte-carlo";
}

}  // namespace

Format parse_format(std::string_view s) {
    if (s == "human") return Format::human;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("unknown format '" + std::string(s) + "' (human|csv|json)");
}

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_bound(const BoundResult& r, Format f) {
    switch (f) {
        case Format::human: {
            std::string out = r.method + ": " + fmt_short(r.value) + "  (log " + fmt_short(r.log_value) + ")";
            if (r.clamped) out += "  clamped, raw log " + fmt_short(r.raw_log_value);
            if (r.optimal_param) out += "  param " + fmt_short(*r.optimal_param);
            return out + "\n";
        }
        case Format::csv: return std::string(kBoundHeader) + "\n" + bound_csv(r) + "\n";
        case Format::json: {
            JsonOut j;
            j.open().field("schema_version", quote(kSchemaVersion)).field("kind", quote("bound")).open("result");
            bound_fields(j, r);
            j.close().close();
            return j.str();
        }
    }
    return {};
}

std::string render_comparison(const ComparisonTable& t, Format f) {
    switch (f) {
        case Format::human: {
            std::ostringstream o;
            o << "scenario " << t.scenario << "\n\n";
            char head[256];
            std::snprintf(head, sizeof head, "%-28s %-13s %-13s %s", "method", "value", "log value", "param");
            o << head << "\n";
            for (const auto& r : t.rows) o << bound_human_line(r) << "\n";
            if (t.exact_oracle) {
                o << "\nexact tail probability: " << fmt_short(*t.exact_oracle) << "  (log "
                  << fmt_short(std::log(*t.exact_oracle)) << ")\n";
            }
            if (!t.omitted.empty()) {
                o << "\nomitted:\n";
                for (const auto& m : t.omitted)
                    o << "  " << m.method << (m.error ? "  ERROR: " : ": ") << m.reason << "\n";
            }
            if (!t.regression.empty()) {
                o << "\nregression:\n";
                for (const auto& r : t.regression) {
                    o << "  " << (r.pass ? "ok   " : "FAIL ") << r.method << "  expected " << fmt_short(r.expected)
                      << "  got " << fmt_short(r.actual) << "  tol " << fmt_short(r.tolerance)
                      << (r.relative ? " (relative)" : "") << "\n";
                    if (!r.note.empty()) o << "       " << r.note << "\n";
                }
            }
            return o.str();
        }
        case Format::csv: {
            std::string out = "scenario,kind," + std::string(kBoundHeader) + ",note\n";
            const auto sc = csv_field(t.scenario);
            for (const auto& r : t.rows) out += sc + ",bound," + bound_csv(r) + ",\n";
            if (t.exact_oracle)
                out += sc + ",oracle,exact_binomial," + fmt17(*t.exact_oracle) + "," + fmt17(std::log(*t.exact_oracle)) +
                       ",,,,\n";
            for (const auto& m : t.omitted)
                out += sc + "," + (m.error ? "error" : "omitted") + "," + csv_field(m.method) + ",,,,,," +
                       csv_field(m.reason) + "\n";
            return out;
        }
        case Format::json: {
            JsonOut j;
            j.open().field("schema_version", quote(kSchemaVersion)).field("kind", quote("comparison"));
            j.field("scenario", quote(t.scenario)).open_array("rows");
            for (const auto& r : t.rows) {
                j.open();
                bound_fields(j, r);
                j.close();
            }
            j.close();
            j.field("exact_oracle", jopt(t.exact_oracle));
            j.open_array("omitted");
            for (const auto& m : t.omitted) {
                j.open().field("method", quote(m.method)).field("reason", quote(m.reason)).field("error", jbool(m.error));
                j.close();
            }
            j.close().open_array("regression");
            for (const auto& r : t.regression) {
                j.open()
                    .field("method", quote(r.method))
                    .field("expected", jnum(r.expected))
                    .field("actual", jnum(r.actual))
                    .field("tolerance", jnum(r.tolerance))
                    .field("relative", jbool(r.relative))
                    .field("pass", jbool(r.pass));
                if (!r.note.empty()) j.field("note", quote(r.note));
                j.close();
            }
            j.close().close();
            return j.str();
        }
    }
    return {};
}

std::string render_soundness(const SoundnessReport& r, Format f) {
    const std::string oracle = r.exact ? "exact-binomial" : "monte-carlo";
    switch (f) {
        case Format::human: {
            std::ostringstream o;
            o << "scenario " << r.scenario << "  oracle " << oracle << "\n";
            if (r.exact) {
                o << "exact tail probability " << fmt_short(r.oracle_point) << "\n\n";
            } else {
                o << "estimate " << fmt_short(r.oracle_point) << "  99% CI [" << fmt_short(r.ci_lo) << ", "
                  << fmt_short(r.ci_hi) << "]  samples " << r.samples << "  seed " << r.seed << "\n\n";
            }
            for (const auto& row : r.rows) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "  %s %-28s bound %s", row.pass ? "pass" : "FAIL", row.method.c_str(),
                              fmt_short(row.bound).c_str());
                o << buf << "\n";
            }
            for (const auto& m : r.omitted) o << "  ERROR " << m.method << ": " << m.reason << "\n";
            o << "\n" << (r.passed() ? "sound" : "UNSOUND") << "\n";
            return o.str();
        }
        case Format::csv: {
            std::string out = "scenario,method,bound,oracle,oracle_point,ci_lo,ci_hi,samples,seed,pass\n";
            for (const auto& row : r.rows)
                out += csv_field(r.scenario) + "," + csv_field(row.method) + "," + fmt17(row.bound) + "," + oracle + "," +
                       fmt17(r.oracle_point) + "," + fmt17(r.ci_lo) + "," + fmt17(r.ci_hi) + "," +
                       std::to_string(r.samples) + "," + std::to_string(r.seed) + "," + (row.pass ? "true" : "false") +
                       "\n";
            return out;
        }
        case Format::json: {
            JsonOut j;
            j.open()
                .field("schema_version", quote(kSchemaVersion))
                .field("kind", quote("soundness"))
                .field("scenario", quote(r.scenario))
                .field("oracle", quote(oracle))
                .field("oracle_point", jnum(r.oracle_point))
                .field("ci_lo", jnum(r.ci_lo))
                .field("ci_hi", jnum(r.ci_hi))
                .field("samples", std::to_string(r.samples))
                .field("seed", std::to_string(r.seed))
                .field("passed", jbool(r.passed()))
                .open_array("rows");
            for (const auto& row : r.rows) {
                j.open().field("method", quote(row.method)).field("bound", jnum(row.bound)).field("pass", jbool(row.pass));
                j.close();
            }
            j.close().open_array("errors");
            for (const auto& m : r.omitted) {
                j.open().field("method", quote(m.method)).field("reason", quote(m.reason));
                j.close();
            }
            j.close().close();
            return j.str();
        }
    }
    return {};
}

std::string render_sample_size(const SampleSizeResult& r, Format f) {
    switch (f) {
        case Format::human:
            return "n = " + std::to_string(r.n) + "  (alpha " + fmt_short(r.alpha) + ", half-width " +
                   fmt_short(r.half_width) + ", achieved alpha " + fmt_short(r.achieved_alpha) + ")\n";
        case Format::csv:
            return "alpha,half_width,n,achieved_alpha\n" + fmt17(r.alpha) + "," + fmt17(r.half_width) + "," +
                   std::to_string(r.n) + "," + fmt17(r.achieved_alpha) + "\n";
        case Format::json: {
            JsonOut j;
            j.open()
                .field("schema_version", quote(kSchemaVersion))
                .field("kind", quote("sample_size"))
                .field("alpha", jnum(r.alpha))
                .field("half_width", jnum(r.half_width))
                .field("n", std::to_string(r.n))
                .field("achieved_alpha", jnum(r.achieved_alpha))
                .close();
            return j.str();
        }
    }
    return {};
}

std::string render_catalog(const std::vector<Scenario>& catalog, Format f) {
    switch (f) {
        case Format::human: {
            std::ostringstream o;
            for (const auto& s : catalog) {
                char buf[512];
                std::snprintf(buf, sizeof buf, "%-18s %-19s %-15s %s", s.name.c_str(), std::string(to_string(s.kind)).c_str(),
                              oracle_name(s).c_str(), s.description.c_str());
                o << buf << "\n";
            }
            return o.str();
        }
        case Format::csv: {
            std::string out = "name,kind,oracle,methods,description\n";
            for (const auto& s : catalog) {
                std::string methods;
                for (const auto& m : s.applicable) methods += (methods.empty() ? "" : ";") + m;
                out += csv_field(s.name) + "," + std::string(to_string(s.kind)) + "," + oracle_name(s) + "," +
                       csv_field(methods) + "," + csv_field(s.description) + "\n";
            }
            return out;
        }
        case Format::json: {
            JsonOut j;
            j.open().field("schema_version", quote(kSchemaVersion)).field("kind", quote("catalog")).open_array("scenarios");
            for (const auto& s : catalog) {
                j.open()
                    .field("name", quote(s.name))
                    .field("kind", quote(std::string(to_string(s.kind))))
                    .field("oracle", quote(oracle_name(s)))
                    .open_array("methods");
                for (const auto& m : s.applicable) j.item(quote(m));
                j.close().field("description", quote(s.description)).close();
            }
            j.close().close();
            return j.str();
        }
    }
    return {};
}

}  // namespace tailbound
