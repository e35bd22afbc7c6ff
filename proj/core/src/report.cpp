#include "gcm/report.hpp"

#include "gcm/io.hpp"
#include "json_util.hpp"

#include <cstdlib>
#include <ctime>
#include <sstream>

namespace gcm::report {

namespace {

using detail::expect_keys;
using detail::get_as;
using detail::json;
using detail::matrix_from;
using detail::matrix_json;
using detail::number;
using detail::number_from;
using detail::schema_error;

json vector_json(const std::vector<mc::CoordinateDiagnostics>& diags) {
    json out = json::array();
    for (const auto& d : diags) {
        out.push_back({{"ks_distance", number(d.ks_distance)},
                       {"mean", number(d.mean)},
                       {"variance", number(d.variance)},
                       {"skewness", number(d.skewness)},
                       {"excess_kurtosis", number(d.excess_kurtosis)}});
    }
    return out;
}

std::vector<mc::CoordinateDiagnostics> diagnostics_from(const json& j, std::string_view where) {
    if (!j.is_array()) {
        schema_error(where, "expected an array");
    }
    std::vector<mc::CoordinateDiagnostics> out;
    for (const json& d : j) {
        expect_keys(d, {"ks_distance", "mean", "variance", "skewness", "excess_kurtosis"}, {}, where);
        out.push_back({number_from(d.at("ks_distance"), where), number_from(d.at("mean"), where),
                       number_from(d.at("variance"), where), number_from(d.at("skewness"), where),
                       number_from(d.at("excess_kurtosis"), where)});
    }
    return out;
}

json cell_json(const mc::McCell& c) {
    return json{
        {"r", c.r},
        {"n", c.n},
        {"successes", c.successes},
        {"failures", c.failures},
        {"truth_gamma", matrix_json(c.truth_gamma)},
        {"mean_gamma", matrix_json(c.mean_gamma)},
        {"bias", matrix_json(c.bias)},
        {"bias_se", matrix_json(c.bias_se)},
        {"bias_flagged", c.bias_flagged},
        {"median_sigma_err", number(c.median_sigma_err)},
        {"mean_sigma_err", number(c.mean_sigma_err)},
        {"median_gamma_err", number(c.median_gamma_err)},
        {"mean_gamma_err", number(c.mean_gamma_err)},
        {"median_h_gap", number(c.median_h_gap)},
        {"mean_h_gap", number(c.mean_h_gap)},
        {"empirical_cov", matrix_json(c.empirical_cov)},
        {"theory_cov", matrix_json(c.theory_cov)},
        {"relative_frobenius", number(c.relative_frobenius)},
        {"true_whitened", vector_json(c.true_whitened)},
        {"plugin_whitened", vector_json(c.plugin_whitened)},
        {"rejection_rate", number(c.rejection_rate)},
        {"power", c.power ? number(*c.power) : json(nullptr)},
    };
}

mc::McCell cell_from(const json& j) {
    constexpr std::string_view where = "results.cells[]";
    expect_keys(j,
                {"r", "n", "successes", "failures", "truth_gamma", "mean_gamma", "bias", "bias_se",
                 "bias_flagged", "median_sigma_err", "mean_sigma_err", "median_gamma_err",
                 "mean_gamma_err", "median_h_gap", "mean_h_gap", "empirical_cov", "theory_cov",
                 "relative_frobenius", "true_whitened", "plugin_whitened", "rejection_rate", "power"},
                {}, where);
    mc::McCell c;
    c.r = get_as<int>(j.at("r"), where);
    c.n = get_as<int>(j.at("n"), where);
    c.successes = get_as<int>(j.at("successes"), where);
    c.failures = get_as<int>(j.at("failures"), where);
    c.truth_gamma = matrix_from(j.at("truth_gamma"), where);
    c.mean_gamma = matrix_from(j.at("mean_gamma"), where);
    c.bias = matrix_from(j.at("bias"), where);
    c.bias_se = matrix_from(j.at("bias_se"), where);
    c.bias_flagged = get_as<bool>(j.at("bias_flagged"), where);
    c.median_sigma_err = number_from(j.at("median_sigma_err"), where);
    c.mean_sigma_err = number_from(j.at("mean_sigma_err"), where);
    c.median_gamma_err = number_from(j.at("median_gamma_err"), where);
    c.mean_gamma_err = number_from(j.at("mean_gamma_err"), where);
    c.median_h_gap = number_from(j.at("median_h_gap"), where);
    c.mean_h_gap = number_from(j.at("mean_h_gap"), where);
    c.empirical_cov = matrix_from(j.at("empirical_cov"), where);
    c.theory_cov = matrix_from(j.at("theory_cov"), where);
    c.relative_frobenius = number_from(j.at("relative_frobenius"), where);
    c.true_whitened = diagnostics_from(j.at("true_whitened"), where);
    c.plugin_whitened = diagnostics_from(j.at("plugin_whitened"), where);
    c.rejection_rate = number_from(j.at("rejection_rate"), where);
    if (!j.at("power").is_null()) {
        c.power = number_from(j.at("power"), where);
    }
    return c;
}

json meta_json(const Meta& meta) {
    return json{{"version", meta.version},
                {"seed", meta.seed ? json(*meta.seed) : json(nullptr)},
                {"timestamp", meta.timestamp}};
}

Meta meta_from(const json& j) {
    expect_keys(j, {"version", "seed", "timestamp"}, {}, "meta");
    Meta meta;
    meta.version = get_as<std::string>(j.at("version"), "meta.version");
    if (!j.at("seed").is_null()) {
        meta.seed = get_as<std::uint64_t>(j.at("seed"), "meta.seed");
    }
    meta.timestamp = get_as<std::string>(j.at("timestamp"), "meta.timestamp");
    return meta;
}

json errors_json(const std::vector<ErrorEntry>& errors) {
    json out = json::array();
    for (const auto& e : errors) {
        out.push_back({{"kind", e.kind}, {"message", e.message}});
    }
    return out;
}

std::vector<ErrorEntry> errors_from(const json& j) {
    if (!j.is_array()) {
        schema_error("errors", "expected an array");
    }
    std::vector<ErrorEntry> out;
    for (const json& e : j) {
        expect_keys(e, {"kind", "message"}, {}, "errors[]");
        out.push_back({get_as<std::string>(e.at("kind"), "errors[].kind"),
                       get_as<std::string>(e.at("message"), "errors[].message")});
    }
    return out;
}

json checked_document(std::string_view json_text) {
    json doc = detail::parse_json(json_text, "report");
    expect_keys(doc, {"meta", "inputs", "results", "errors"}, {}, "report");
    meta_from(doc.at("meta"));
    errors_from(doc.at("errors"));
    return doc;
}

std::string csv_line(std::initializer_list<std::string> fields) {
    std::string line;
    bool first = true;
    for (const auto& f : fields) {
        if (!first) line += ',';
        line += f;
        first = false;
    }
    return line + "\n";
}

using io::format_double;

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size()) {
        throw Error(ErrorKind::Parse, "replicates:" + std::to_string(line) + ": bad number '" + field + "'");
    }
    return v;
}

}  // namespace

std::string deterministic_timestamp() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm utc{};
    gmtime_r(&t, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

void validate_report_schema(std::string_view json_text) {
    checked_document(json_text);
}

std::string make_report(const Meta& meta, std::string_view inputs_json,
                        std::string_view results_json, const std::vector<ErrorEntry>& errors,
                        int indent) {
    const json doc = {
        {"meta", meta_json(meta)},
        {"inputs", detail::parse_json(inputs_json, "inputs")},
        {"results", detail::parse_json(results_json, "results")},
        {"errors", errors_json(errors)},
    };
    return doc.dump(indent) + "\n";
}

std::string mc_report_json(const mc::McReport& report, const ExperimentConfig& config,
                           const Meta& meta, int indent) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back(cell_json(c));
    }
    const json results = {
        {"kind", std::string(mc::to_string(report.kind))},
        {"thresholds",
         {{"bias_se_multiple", report.thresholds.bias_se_multiple},
          {"covariance_band", report.thresholds.covariance_band},
          {"ks_critical", number(report.thresholds.ks_critical)}}},
        {"cells", cells},
    };
    const json doc = {
        {"meta", meta_json(meta)},
        {"inputs", detail::experiment_config_json(config)},
        {"results", results},
        {"errors", json::array()},
    };
    return doc.dump(indent) + "\n";
}

McDocument parse_mc_report_json(std::string_view json_text) {
    const json doc = checked_document(json_text);
    McDocument out;
    out.meta = meta_from(doc.at("meta"));
    out.errors = errors_from(doc.at("errors"));
    out.config = detail::experiment_config_from(doc.at("inputs"));

    const json& results = doc.at("results");
    expect_keys(results, {"kind", "thresholds", "cells"}, {}, "results");
    out.report.kind = mc::parse_mc_kind(get_as<std::string>(results.at("kind"), "results.kind"));
    out.report.config = out.config.mc;
    const json& th = results.at("thresholds");
    expect_keys(th, {"bias_se_multiple", "covariance_band", "ks_critical"}, {}, "results.thresholds");
    out.report.thresholds.bias_se_multiple = number_from(th.at("bias_se_multiple"), "results.thresholds");
    out.report.thresholds.covariance_band = number_from(th.at("covariance_band"), "results.thresholds");
    out.report.thresholds.ks_critical = number_from(th.at("ks_critical"), "results.thresholds");
    if (!results.at("cells").is_array()) {
        schema_error("results.cells", "expected an array");
    }
    for (const json& c : results.at("cells")) {
        out.report.cells.push_back(cell_from(c));
    }
    return out;
}

std::string consistency_table(const mc::McReport& report) {
    std::string out = "n,median_sigma_err,median_gamma_err,h_gap\n";
    for (const auto& c : report.cells) {
        out += csv_line({std::to_string(c.n), format_double(c.median_sigma_err),
                         format_double(c.median_gamma_err), format_double(c.median_h_gap)});
    }
    return out;
}

std::string normality_table(const mc::McReport& report) {
    std::string out = "coordinate,ks_distance,mean,variance,skewness,ex_kurtosis\n";
    for (const auto& c : report.cells) {
        for (std::size_t i = 0; i < c.true_whitened.size(); ++i) {
            const auto& d = c.true_whitened[i];
            out += csv_line({std::to_string(i), format_double(d.ks_distance), format_double(d.mean),
                             format_double(d.variance), format_double(d.skewness),
                             format_double(d.excess_kurtosis)});
        }
    }
    return out;
}

std::string covariance_match_table(const mc::McReport& report) {
    std::string out = "relative_frobenius\n";
    for (const auto& c : report.cells) {
        out += csv_line({format_double(c.relative_frobenius)});
    }
    return out;
}

std::string level_table(const mc::McReport& report) {
    std::string out = "alpha,rejection_rate,n_replicates\n";
    for (const auto& c : report.cells) {
        out += csv_line({format_double(report.config.alpha), format_double(c.rejection_rate),
                         std::to_string(c.successes)});
    }
    return out;
}

std::string unbiasedness_table(const mc::McReport& report) {
    std::string out = "n,coordinate,mean_gamma,truth,bias,se,flagged\n";
    for (const auto& c : report.cells) {
        const Vector mean = vec_t(c.mean_gamma);
        const Vector truth = vec_t(c.truth_gamma);
        const Vector bias = vec_t(c.bias);
        const Vector se = vec_t(c.bias_se);
        for (Eigen::Index i = 0; i < mean.size(); ++i) {
            const bool flagged = !(std::abs(bias(i)) <= report.thresholds.bias_se_multiple * se(i));
            out += csv_line({std::to_string(c.n), std::to_string(i), format_double(mean(i)),
                             format_double(truth(i)), format_double(bias(i)), format_double(se(i)),
                             flagged ? "1" : "0"});
        }
    }
    return out;
}

std::string replicates_table(const mc::ReplicateTable& records) {
    Eigen::Index gamma_dim = 0, z_true_dim = 0, z_plugin_dim = 0;
    for (const auto& cell : records) {
        for (const auto& rec : cell) {
            if (rec.ok) {
                gamma_dim = rec.gamma.size();
                z_true_dim = rec.z_true.size();
                z_plugin_dim = rec.z_plugin.size();
                break;
            }
        }
        if (gamma_dim > 0) break;
    }
    std::ostringstream out;
    out << "size_index,replicate,ok,failure,sigma_err,gamma_err,h_gap,chi_sq,p_value,alt_p_value";
    for (Eigen::Index i = 0; i < gamma_dim; ++i) out << ",gamma_" << i;
    for (Eigen::Index i = 0; i < z_true_dim; ++i) out << ",z_true_" << i;
    for (Eigen::Index i = 0; i < z_plugin_dim; ++i) out << ",z_plugin_" << i;
    out << '\n';

    auto emit_vector = [&](const Vector& v, Eigen::Index dim, bool ok) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            out << ',';
            if (ok) out << format_double(v(i));
        }
    };
    for (std::size_t k = 0; k < records.size(); ++k) {
        for (std::size_t i = 0; i < records[k].size(); ++i) {
            const auto& rec = records[k][i];
            out << k << ',' << i << ',' << (rec.ok ? 1 : 0) << ',' << rec.failure;
            if (rec.ok) {
                out << ',' << format_double(rec.sigma_err) << ',' << format_double(rec.gamma_err)
                    << ',' << format_double(rec.h_gap) << ',' << format_double(rec.chi_sq) << ','
                    << format_double(rec.p_value) << ','
                    << (rec.alt_p_value ? format_double(*rec.alt_p_value) : std::string());
            } else {
                out << ",,,,,,";
            }
            emit_vector(rec.gamma, gamma_dim, rec.ok);
            emit_vector(rec.z_true, z_true_dim, rec.ok);
            emit_vector(rec.z_plugin, z_plugin_dim, rec.ok);
            out << '\n';
        }
    }
    return out.str();
}

mc::ReplicateTable parse_replicates_table(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Parse, "replicates: missing header");
    }
    const auto header = split(line);
    constexpr std::size_t kFixed = 10;
    if (header.size() < kFixed || header[0] != "size_index") {
        throw Error(ErrorKind::Parse, "replicates: unexpected header");
    }
    Eigen::Index gamma_dim = 0, z_true_dim = 0, z_plugin_dim = 0;
    for (std::size_t c = kFixed; c < header.size(); ++c) {
        if (header[c].rfind("gamma_", 0) == 0) ++gamma_dim;
        else if (header[c].rfind("z_true_", 0) == 0) ++z_true_dim;
        else if (header[c].rfind("z_plugin_", 0) == 0) ++z_plugin_dim;
        else throw Error(ErrorKind::Parse, "replicates: unknown column '" + header[c] + "'");
    }

    mc::ReplicateTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) {
            throw Error(ErrorKind::Parse, "replicates:" + std::to_string(line_no) + ": wrong field count");
        }
        const auto k = static_cast<std::size_t>(parse_number(f[0], line_no));
        const auto i = static_cast<std::size_t>(parse_number(f[1], line_no));
        if (k == table.size()) table.emplace_back();
        if (k + 1 != table.size() || i != table[k].size()) {
            throw Error(ErrorKind::Parse, "replicates:" + std::to_string(line_no) + ": rows out of order");
        }
        mc::ReplicateRecord rec;
        rec.ok = f[2] == "1";
        rec.failure = f[3];
        if (rec.ok) {
            rec.sigma_err = parse_number(f[4], line_no);
            rec.gamma_err = parse_number(f[5], line_no);
            rec.h_gap = parse_number(f[6], line_no);
            rec.chi_sq = parse_number(f[7], line_no);
            rec.p_value = parse_number(f[8], line_no);
            if (!f[9].empty()) rec.alt_p_value = parse_number(f[9], line_no);
            std::size_t col = kFixed;
            auto read_vector = [&](Eigen::Index dim) {
                Vector v(dim);
                for (Eigen::Index d = 0; d < dim; ++d) v(d) = parse_number(f[col++], line_no);
                return v;
            };
            rec.gamma = read_vector(gamma_dim);
            rec.z_true = read_vector(z_true_dim);
            rec.z_plugin = read_vector(z_plugin_dim);
        }
        table[k].push_back(std::move(rec));
    }
    return table;
}

}  // namespace gcm::report
