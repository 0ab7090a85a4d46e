#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "impactrank/analysis.hpp"
#include "impactrank/csv.hpp"
#include "impactrank/error.hpp"
#include "impactrank/features.hpp"
#include "impactrank/percentile.hpp"
#include "impactrank/predict.hpp"
#include "impactrank/stationarity.hpp"

// Plot-ready artifact emission: every CLI subcommand funnels through the
// functions here so tests can exercise the exact file surfaces.

namespace impactrank {

inline std::string json_sibling_path(const std::string& csv_path) {
    const auto dot = csv_path.find_last_of('.');
    if (dot == std::string::npos || csv_path.find('/', dot) != std::string::npos)
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

// ---------------------------------------------------------------------------
// Percentile series CSV: entity_id, age, percentile, n_benchmark.
// ---------------------------------------------------------------------------

inline void write_series_csv(const SeriesSet& set, const std::string& path) {
    CsvWriter w(path);
    w.row({"entity_id", "age", "percentile", "n_benchmark"});
    for (const auto& [id, series] : set.by_entity)
        for (const auto& [age, value] : series.values)
            w.row({id, std::to_string(age), csv_num(value),
                   std::to_string(series.benchmark_size.at(age))});
}

inline SeriesSet read_series_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.empty()) throw ParseError("empty percentile file: " + path);
    SeriesSet set;
    set.benchmark_label = "from:" + path;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 4) throw ParseError("expected 4 columns in " + path, i + 1);
        try {
            auto& series = set.by_entity[r[0]];
            series.entity_id = r[0];
            const int age = std::stoi(r[1]);
            series.values[age] = std::stod(r[2]);
            series.benchmark_size[age] = std::stoi(r[3]);
        } catch (const std::exception&) {
            throw ParseError("malformed percentile row", i + 1);
        }
    }
    return set;
}

// ---------------------------------------------------------------------------
// Stability: correlation matrix CSV plus a JSON report with the per-pair
// regression fits of late-age on early-age percentiles.
// ---------------------------------------------------------------------------

inline void write_stability_outputs(const SeriesSet& series, const std::vector<int>& t1_list,
                                    const std::vector<int>& t2_list, const std::string& csv_path) {
    const AgePairMatrix matrix = stability_matrix(series, t1_list, t2_list);

    CsvWriter w(csv_path);
    w.row({"t1", "t2", "pearson", "n"});
    for (const auto& [key, value] : matrix.cells)
        w.row({std::to_string(key.first), std::to_string(key.second), csv_num(value),
               std::to_string(matrix.n_entities)});

    // Fits of value(t2) on value(t1) over the same complete-series entities.
    std::vector<int> all_ages;
    for (int t : t1_list) all_ages.push_back(t);
    for (int t : t2_list) all_ages.push_back(t);
    std::sort(all_ages.begin(), all_ages.end());
    all_ages.erase(std::unique(all_ages.begin(), all_ages.end()), all_ages.end());
    std::vector<const PercentileSeries*> complete;
    for (const auto& [id, s] : series.by_entity)
        if (s.has_ages(all_ages)) complete.push_back(&s);

    nlohmann::json fits = nlohmann::json::array();
    for (const auto& [key, corr] : matrix.cells) {
        std::vector<double> x, y;
        for (const auto* s : complete) {
            x.push_back(s->values.at(key.first));
            y.push_back(s->values.at(key.second));
        }
        nlohmann::json f;
        f["t1"] = key.first;
        f["t2"] = key.second;
        f["pearson"] = corr;
        try {
            const OlsFit fit = ols_fit(x, y);
            f["slope"] = fit.slope;
            f["intercept"] = fit.intercept;
            f["slope_se"] = fit.slope_se;
            f["r2"] = fit.r2;
        } catch (const DegenerateInputError&) {
            f["slope"] = nullptr;
        }
        fits.push_back(std::move(f));
    }
    nlohmann::json report;
    report["benchmark"] = series.benchmark_label;
    report["metric"] = series.metric_label;
    report["n_entities"] = matrix.n_entities;
    report["fits"] = std::move(fits);
    std::ofstream out(json_sibling_path(csv_path), std::ios::binary);
    out << report.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Agreement: per-age class-agreement fractions for two or three indicator
// series, with pairwise Wilcoxon comparisons in the JSON report.
// ---------------------------------------------------------------------------

namespace detail {

inline std::map<std::string, double> series_at_age(const SeriesSet& set, int age) {
    std::map<std::string, double> out;
    for (const auto& [id, s] : set.by_entity) {
        auto it = s.values.find(age);
        if (it != s.values.end()) out[id] = it->second;
    }
    return out;
}

inline nlohmann::json table_json(const AgreementResult& r) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& row : r.table) {
        nlohmann::json jr = nlohmann::json::array();
        for (std::size_t v : row) jr.push_back(v);
        t.push_back(std::move(jr));
    }
    return t;
}

/// Paired values over the entity intersection, in entity-id order.
inline std::pair<std::vector<double>, std::vector<double>> paired_values(
    const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    std::vector<double> x, y;
    for (const auto& [id, va] : a) {
        auto it = b.find(id);
        if (it == b.end()) continue;
        x.push_back(va);
        y.push_back(it->second);
    }
    return {std::move(x), std::move(y)};
}

}  // namespace detail

inline void write_agreement_outputs(const std::vector<const SeriesSet*>& series,
                                    const std::vector<std::string>& labels,
                                    const std::vector<int>& ages, const std::string& csv_path) {
    if (series.size() < 2 || series.size() > 3)
        throw DomainError("agreement needs two or three percentile files");

    CsvWriter w(csv_path);
    w.row({"age", "pair", "fraction", "n"});
    nlohmann::json by_age = nlohmann::json::object();
    for (int age : ages) {
        std::vector<std::map<std::string, double>> maps;
        for (const auto* s : series) maps.push_back(detail::series_at_age(*s, age));
        bool any_empty = false;
        for (const auto& m : maps)
            if (m.empty()) any_empty = true;
        if (any_empty) continue;

        nlohmann::json entry;
        const auto emit_pair = [&](std::size_t i, std::size_t j) {
            const std::string pair = labels[i] + ":" + labels[j];
            AgreementResult r;
            try {
                r = agreement(maps[i], maps[j]);
            } catch (const DegenerateInputError&) {
                return;
            }
            w.row({std::to_string(age), pair, csv_num(r.fraction), std::to_string(r.n)});
            nlohmann::json pj;
            pj["fraction"] = r.fraction;
            pj["n"] = r.n;
            pj["table"] = detail::table_json(r);
            const auto [x, y] = detail::paired_values(maps[i], maps[j]);
            const WilcoxonResult wres = wilcoxon_signed_rank(x, y);
            pj["wilcoxon_p"] = wres.p_value;
            pj["wilcoxon_statistic"] = wres.statistic;
            pj["wilcoxon_degenerate"] = wres.degenerate;
            entry[pair] = std::move(pj);
        };
        emit_pair(0, 1);
        if (series.size() == 3) {
            emit_pair(0, 2);
            emit_pair(1, 2);
            try {
                const ThreeWayAgreement r3 = agreement(maps[0], maps[1], maps[2]);
                w.row({std::to_string(age), "all", csv_num(r3.fraction), std::to_string(r3.n)});
                entry["all"] = {{"fraction", r3.fraction}, {"n", r3.n}};
            } catch (const DegenerateInputError&) {
            }
        }
        by_age[std::to_string(age)] = std::move(entry);
    }
    nlohmann::json report;
    report["labels"] = labels;
    report["by_age"] = std::move(by_age);
    std::ofstream out(json_sibling_path(csv_path), std::ios::binary);
    out << report.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Stationarity: ADF and KPSS on each entity's level series and, optionally,
// its differenced series. CSV columns: entity_id, test, series, statistic,
// reject. Series shorter than the tests' minimum length are skipped.
// ---------------------------------------------------------------------------

inline void write_stationarity_csv(const SeriesSet& set, int difference_from, int adf_lags,
                                   const std::string& csv_path) {
    CsvWriter w(csv_path);
    w.row({"entity_id", "test", "series", "statistic", "reject"});
    std::size_t adf_level_reject = 0, adf_level_n = 0, kpss_level_reject = 0, kpss_level_n = 0;
    std::size_t adf_diff_reject = 0, adf_diff_n = 0, kpss_diff_reject = 0, kpss_diff_n = 0;

    const auto emit = [&](const std::string& id, const char* which,
                          const std::vector<double>& x, std::size_t& a_rej, std::size_t& a_n,
                          std::size_t& k_rej, std::size_t& k_n) {
        if (x.size() < 10) return;
        try {
            const auto a = adf_test(x, adf_lags);
            w.row({id, "adf", which, csv_num(a.statistic), a.reject_null ? "1" : "0"});
            ++a_n;
            if (a.reject_null) ++a_rej;
        } catch (const DegenerateInputError&) {
        }
        const auto k = kpss_test(x);
        w.row({id, "kpss", which, csv_num(k.statistic), k.reject_null ? "1" : "0"});
        ++k_n;
        if (k.reject_null) ++k_rej;
    };

    for (const auto& [id, series] : set.by_entity) {
        std::vector<double> level;
        for (const auto& [age, v] : series.values) level.push_back(v);
        emit(id, "level", level, adf_level_reject, adf_level_n, kpss_level_reject, kpss_level_n);
        if (difference_from > 0 && series.values.count(difference_from)) {
            std::vector<double> diff;
            for (const auto& [t2, v] : difference(series, difference_from)) diff.push_back(v);
            emit(id, "diff", diff, adf_diff_reject, adf_diff_n, kpss_diff_reject, kpss_diff_n);
        }
    }

    nlohmann::json report;
    const auto frac = [](std::size_t rej, std::size_t n) {
        return n ? static_cast<double>(rej) / static_cast<double>(n) : 0.0;
    };
    report["adf_level_rejection_rate"] = frac(adf_level_reject, adf_level_n);
    report["kpss_level_rejection_rate"] = frac(kpss_level_reject, kpss_level_n);
    report["adf_diff_rejection_rate"] = frac(adf_diff_reject, adf_diff_n);
    report["kpss_diff_rejection_rate"] = frac(kpss_diff_reject, kpss_diff_n);
    report["n_level"] = adf_level_n;
    report["n_diff"] = adf_diff_n;
    std::ofstream out(json_sibling_path(csv_path), std::ios::binary);
    out << report.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Feature matrices and prediction results.
// ---------------------------------------------------------------------------

inline void write_features_csv(const FeatureMatrix& m, const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> header = {"entity_id"};
    if (!m.row_owner.empty()) header.push_back("owner_scholar_id");
    for (const auto& c : m.column_names) header.push_back(c);
    header.push_back(m.target_name);
    w.row(header);
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
        std::vector<std::string> row = {m.row_ids[i]};
        if (!m.row_owner.empty()) row.push_back(m.row_owner[i]);
        for (double v : m.rows[i]) row.push_back(csv_num(v));
        row.push_back(csv_num(m.target[i]));
        w.row(row);
    }
}

inline void write_results_csv(const std::vector<FitResult>& results, const std::string& path) {
    CsvWriter w(path);
    w.row({"model", "t1", "t2", "r2", "rmse", "medse", "mae", "n_train", "n_test"});
    for (const auto& r : results)
        w.row({model_name(r.model), std::to_string(r.t1), std::to_string(r.t2), csv_num(r.err.r2),
               csv_num(r.err.rmse), csv_num(r.err.medse), csv_num(r.err.mae),
               std::to_string(r.n_train), std::to_string(r.n_test)});
}

/// Per-model task table mirrored into JSON for downstream plotting.
inline void write_report_json(const std::string& results_csv, const std::string& out_path) {
    const auto rows = read_csv_file(results_csv);
    if (rows.empty() || rows[0].size() < 9)
        throw ParseError("unexpected results layout in " + results_csv);
    nlohmann::json models = nlohmann::json::object();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        nlohmann::json task;
        try {
            task["t1"] = std::stoi(r[1]);
            task["t2"] = std::stoi(r[2]);
            task["r2"] = std::stod(r[3]);
            task["rmse"] = std::stod(r[4]);
            task["medse"] = std::stod(r[5]);
            task["mae"] = std::stod(r[6]);
            task["n_train"] = std::stoul(r[7]);
            task["n_test"] = std::stoul(r[8]);
        } catch (const std::exception&) {
            throw ParseError("malformed results row", i + 1);
        }
        models[r[0]].push_back(std::move(task));
    }
    nlohmann::json report;
    report["models"] = std::move(models);
    std::ofstream out(out_path, std::ios::binary);
    if (!out.good()) throw Error("cannot open for writing: " + out_path);
    out << report.dump(2) << '\n';
}

}  // namespace impactrank
