// io.hpp — CSV and JSON emission.  CSV floats are printed with 9 significant
// digits in scientific notation so files diff stably at tolerance-relevant
// precision; all output is byte-deterministic for identical inputs.

#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "tp2a/core.hpp"
#include "tp2a/correlations.hpp"
#include "tp2a/validation.hpp"

namespace tp2a {

using json = nlohmann::ordered_json;

inline std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Correlation maps.

inline void write_map_csv(std::ostream& os, const CorrelationMap& m) {
    os << "axis1,axis2,value\n";
    for (std::size_t i = 0; i < m.axis1.size(); ++i)
        for (std::size_t j = 0; j < m.axis2.size(); ++j)
            os << format_sci(m.axis1[i]) << ',' << format_sci(m.axis2[j]) << ','
               << format_sci(m.at(i, j)) << '\n';
}

inline json map_envelope(const CorrelationMap& m) {
    json j;
    j["kind"] = "correlation_map";
    j["state"] = m.state_tag;
    j["normalization"] = m.normalization_tag;
    j["axis1"] = m.axis1;
    j["axis2"] = m.axis2;
    j["values"] = m.values;
    return j;
}

// ---------------------------------------------------------------------------
// Probability records.

inline json prob_record(const ProbabilityResult& r) {
    json j;
    j["method"] = method_name(r.method);
    j["value"] = r.value;
    j["time"] = r.time;
    j["regime_flags"] = r.regime_flags;
    if (r.error_estimate)
        j["error_estimate"] = *r.error_estimate;
    else
        j["error_estimate"] = nullptr;
    return j;
}

inline void write_prob_csv(std::ostream& os, const std::vector<ProbabilityResult>& rs) {
    os << "method,value,time,error_estimate,regime_flags\n";
    for (const auto& r : rs) {
        os << method_name(r.method) << ',' << format_sci(r.value) << ','
           << format_sci(r.time) << ','
           << (r.error_estimate ? format_sci(*r.error_estimate) : std::string())
           << ',';
        for (std::size_t i = 0; i < r.regime_flags.size(); ++i)
            os << (i ? "|" : "") << r.regime_flags[i];
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepRow {
    double value = 0.0;
    double closed = 0.0;
    double quadrature = 0.0;
};

inline void write_sweep_csv(std::ostream& os, const std::string& variable,
                            const std::vector<SweepRow>& rows) {
    (void)variable;
    os << "variable,value_closed,value_quadrature,ratio\n";
    for (const auto& r : rows) {
        const double ratio = r.closed != 0.0 ? r.quadrature / r.closed : 0.0;
        os << format_sci(r.value) << ',' << format_sci(r.closed) << ','
           << format_sci(r.quadrature) << ',' << format_sci(ratio) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Certificates.

inline json certificate_json(const Certificate& c) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["value"] = c.value;
    j["reference"] = c.reference;
    j["tolerance"] = c.tolerance;
    j["detail"] = c.detail;
    j["grid"] = c.grid_provenance;
    return j;
}

inline json delta_check_json(const std::string& fn_name, double t,
                             const DeltaCheckResult& r, double threshold) {
    json j;
    j["name"] = "delta_check[" + fn_name + "]";
    j["t"] = t;
    j["integral_re"] = r.integral.real();
    j["integral_im"] = r.integral.imag();
    j["target_re"] = r.target.real();
    j["target_im"] = r.target.imag();
    j["deviation"] = r.deviation;
    j["pass"] = r.deviation <= threshold;
    return j;
}

}  // namespace tp2a
