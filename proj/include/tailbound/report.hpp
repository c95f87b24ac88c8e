// report.hpp
//
// Human, CSV and JSON renderings of bound results, comparison tables,
// soundness reports and sample sizes. Machine formats print every number
// with 17 significant digits; non-finite values become "inf", "-inf", "nan".
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tailbound/scenarios.hpp"

namespace tailbound {

enum class Format { human, csv, json };

Format parse_format(std::string_view s);

/// %.17g, or inf/-inf/nan.
std::string fmt17(double x);

struct SampleSizeResult {
    double alpha{0.0};
    double half_width{0.0};
    std::uint64_t n{0};
    double achieved_alpha{0.0};  // 2 exp(-2 n t^2) at the returned n
};

std::string render_bound(const BoundResult& r, Format f);
std::string render_comparison(const ComparisonTable& t, Format f);
std::string render_soundness(const SoundnessReport& r, Format f);
std::string render_sample_size(const SampleSizeResult& r, Format f);
std::string render_catalog(const std::vector<Scenario>& catalog, Format f);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

}  // namespace tailbound
