// impact-rank: rank-percentile impact indicators from citation histories.
//
// Subcommands wire the library into reproducible pipelines:
//   ingest       read a JSONL or CSV-triple dataset into a validated corpus
//   synth        generate a synthetic corpus (optionally with the A/B/C careers)
//   percentile   rank percentile series for publications or scholars
//   stability    age-pair correlation matrix and regression fits
//   agreement    class agreement and Wilcoxon comparison of indicator series
//   stationarity ADF and KPSS tests on level and differenced series
//   features     prediction feature matrices
//   predict      baseline / markov / penalized regressions over the task grid
//   report       JSON summary of a results table
//
// Every output file gets a .manifest.json sibling recording the command line,
// input hashes, and seed. Identical inputs reproduce outputs byte for byte.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "impactrank/io.hpp"
#include "impactrank/manifest.hpp"
#include "impactrank/parallel.hpp"
#include "impactrank/pipeline.hpp"
#include "impactrank/synth.hpp"

namespace {

using namespace impactrank;

std::vector<int> parse_age_list(const std::string& text) {
    std::vector<int> ages;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        const auto dots = token.find("..");
        if (dots != std::string::npos) {
            const int lo = std::stoi(token.substr(0, dots));
            const int hi = std::stoi(token.substr(dots + 2));
            for (int t = lo; t <= hi; ++t) ages.push_back(t);
        } else {
            ages.push_back(std::stoi(token));
        }
    }
    if (ages.empty()) throw DomainError("empty age list: '" + text + "'");
    return ages;
}

BenchmarkSpec parse_benchmark(const std::string& name, std::optional<int> cohort_career,
                              std::optional<int> cohort_pub) {
    BenchmarkSpec spec;
    if (name == "all") {
        spec = BenchmarkSpec::all();
    } else if (name == "tenured") {
        spec = BenchmarkSpec::tenured();
    } else if (name == "biology") {
        spec = BenchmarkSpec::field({"biology", "genetic", "neuroscience", "cell"});
    } else if (name.rfind("field:", 0) == 0) {
        std::vector<std::string> keywords;
        std::stringstream ss(name.substr(6));
        std::string kw;
        while (std::getline(ss, kw, ','))
            if (!kw.empty()) keywords.push_back(kw);
        if (keywords.empty()) throw DomainError("empty field keyword list");
        spec = BenchmarkSpec::field(std::move(keywords));
    } else {
        throw DomainError("unknown benchmark: " + name);
    }
    if (cohort_career && cohort_pub)
        throw DomainError("choose one cohort restriction, not both");
    if (cohort_career) spec = spec.with_cohort(CohortFilter::Key::career_start, *cohort_career);
    if (cohort_pub) spec = spec.with_cohort(CohortFilter::Key::pub_year, *cohort_pub);
    return spec;
}

MetricSpec parse_metric(const std::string& name, const std::string& target) {
    if (name == "citations")
        return target == "pub" ? MetricSpec::publication_citations() : MetricSpec::scholar_citations();
    if (name == "h-index") return MetricSpec::scholar_h_index();
    if (name == "g-index") return MetricSpec::scholar_g_index();
    const auto dash = name.find('-');
    if (dash == std::string::npos) throw DomainError("unknown metric: " + name);
    const std::string window = name.substr(0, dash);
    const std::string agg_name = name.substr(dash + 1);
    Aggregator agg;
    if (agg_name == "sum") agg = Aggregator::sum;
    else if (agg_name == "median") agg = Aggregator::median;
    else throw DomainError("unknown aggregator in metric: " + name);
    if (window == "pmax") return MetricSpec::p_aggregate(PercentileWindow::max, 5, agg);
    if (window == "pmean") return MetricSpec::p_aggregate(PercentileWindow::mean, 5, agg);
    if (window == "pmedian") return MetricSpec::p_aggregate(PercentileWindow::median, 5, agg);
    if (window.size() > 1 && window[0] == 'p') {
        const int k = std::stoi(window.substr(1));
        return MetricSpec::p_aggregate(PercentileWindow::fixed_age, k, agg);
    }
    throw DomainError("unknown metric: " + name);
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

struct ManifestScope {
    RunManifest manifest;
    std::string primary_out;

    ManifestScope(int argc, char** argv, const std::string& out, std::uint64_t seed)
        : primary_out(out) {
        manifest.command_line = join_args(argc, argv);
        manifest.config_hash = hash_hex(fnv1a64(manifest.command_line));
        manifest.seed = seed;
        manifest.started_at = now_iso8601_utc();
        manifest.outputs.push_back(out);
    }

    void add_output(const std::string& path) { manifest.outputs.push_back(path); }

    void finish() {
        manifest.finished_at = now_iso8601_utc();
        manifest.write(primary_out + ".manifest.json");
    }
};

/// Percentile runs cache their CSV under $IMPACT_RANK_CACHE keyed by the
/// corpus hash and the run parameters.
std::optional<std::string> cache_path_for(const std::string& corpus_hash, const std::string& key) {
    const char* dir = std::getenv("IMPACT_RANK_CACHE");
    if (!dir || !*dir) return std::nullopt;
    std::filesystem::create_directories(dir);
    return std::string(dir) + "/" + corpus_hash + "-" + hash_hex(fnv1a64(key)) + ".csv";
}

int run(int argc, char** argv) {
    CLI::App app{"rank-percentile impact indicators for publications and scholars"};
    app.require_subcommand(1);
    unsigned jobs = default_jobs();
    app.add_option("--jobs", jobs, "worker threads for parallel stages (1 = fully serial)");

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "read and validate a dataset");
    std::string in_path, in_format = "jsonl", out_path;
    int end_year = 0;
    ingest->add_option("--input", in_path, "JSONL file or CSV-triple directory")->required();
    ingest->add_option("--format", in_format, "jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    ingest->add_option("--end-year", end_year, "last calendar year with complete citation data");
    ingest->add_option("--out", out_path, "validated corpus file")->required();

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    SynthConfig synth_cfg;
    bool inject_abc = false;
    int cohort_year = 1990;
    std::string synth_out;
    synth->add_option("--scholars", synth_cfg.n_scholars, "number of scholars");
    synth->add_option("--span", synth_cfg.career_span, "career span in years");
    synth->add_option("--rate", synth_cfg.pubs_per_year, "publications per scholar-year");
    synth->add_option("--mu", synth_cfg.lognormal_mu, "lognormal location of lifetime citations");
    synth->add_option("--sigma", synth_cfg.lognormal_sigma, "lognormal scale");
    synth->add_option("--decay", synth_cfg.decay, "geometric aging factor in (0,1)");
    synth->add_option("--noise", synth_cfg.yearly_noise_sigma, "yearly multiplicative noise");
    synth->add_option("--inflation", synth_cfg.yearly_inflation, "yearly citation inflation rate");
    synth->add_option("--first-cohort", synth_cfg.first_cohort, "first career-start year");
    synth->add_option("--cohorts", synth_cfg.n_cohorts, "number of career-start cohorts");
    synth->add_option("--tenured-frac", synth_cfg.tenured_fraction, "tenured fraction");
    synth->add_option("--seed", synth_cfg.seed, "generator seed");
    synth->add_flag("--inject-abc", inject_abc, "add the three artificial careers");
    synth->add_option("--cohort-year", cohort_year, "cohort for the artificial careers");
    synth->add_option("--out", synth_out, "corpus output file")->required();

    // shared corpus/benchmark options for the analysis subcommands
    std::string corpus_path, benchmark = "all";
    std::optional<int> cohort_career, cohort_pub;
    const auto add_corpus_opts = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", corpus_path, "corpus file from ingest or synth")->required();
        cmd->add_option("--benchmark", benchmark, "all|tenured|biology|field:kw1,kw2,...");
        cmd->add_option("--cohort-career", cohort_career, "restrict to one career-start year");
        cmd->add_option("--cohort-pub", cohort_pub, "restrict to one publication year");
    };

    // --- percentile ---
    auto* percentile = app.add_subcommand("percentile", "rank percentile series");
    std::string metric_name = "p5-sum", target = "scholar", ages_text = "1..30", pct_out;
    int future_t1 = 0;
    std::uint64_t seed = 42;
    add_corpus_opts(percentile);
    percentile->add_option("--metric", metric_name,
                           "p5-sum|p5-median|p10-sum|pmax-sum|pmean-sum|pmedian-sum|citations|"
                           "h-index|g-index");
    percentile->add_option("--target", target, "scholar|pub")
        ->check(CLI::IsMember({"scholar", "pub"}));
    percentile->add_option("--ages", ages_text, "age list, e.g. 1..30 or 5,10,15");
    percentile->add_option("--future-t1", future_t1,
                           "emit future-works percentiles conditioned on this age");
    percentile->add_option("--out", pct_out, "percentile CSV")->required();

    // --- stability ---
    auto* stability = app.add_subcommand("stability", "age-pair correlation matrix");
    std::string stab_pct, stab_t1 = "5,10,15,20,25", stab_t2 = "6..30", stab_out;
    stability->add_option("--percentiles", stab_pct, "percentile CSV")->required();
    stability->add_option("--t1", stab_t1, "early ages");
    stability->add_option("--t2", stab_t2, "late ages");
    stability->add_option("--out", stab_out, "matrix CSV (JSON report written alongside)")
        ->required();

    // --- agreement ---
    auto* agree = app.add_subcommand("agreement", "indicator class agreement");
    std::string agree_a, agree_b, agree_c, agree_ages = "1..30", agree_out;
    agree->add_option("--a", agree_a, "first percentile CSV")->required();
    agree->add_option("--b", agree_b, "second percentile CSV")->required();
    agree->add_option("--c", agree_c, "optional third percentile CSV");
    agree->add_option("--ages", agree_ages, "ages to compare");
    agree->add_option("--out", agree_out, "agreement CSV (JSON report written alongside)")
        ->required();

    // --- stationarity ---
    auto* stationarity = app.add_subcommand("stationarity", "ADF and KPSS tests per series");
    std::string stat_pct, stat_out;
    int difference_from = 0, adf_lags = 1;
    stationarity->add_option("--percentiles", stat_pct, "percentile CSV")->required();
    stationarity->add_option("--difference-from", difference_from,
                             "also test series differenced from this age");
    stationarity->add_option("--adf-lags", adf_lags, "lagged differences in the ADF regression");
    stationarity->add_option("--out", stat_out, "stationarity CSV")->required();

    // --- features ---
    auto* features = app.add_subcommand("features", "prediction feature matrix");
    std::string task_text = "pub";
    int f_t1 = 5, f_t2 = 10;
    std::string feat_out;
    add_corpus_opts(features);
    features->add_option("--task", task_text, "pub|scholar|future")
        ->check(CLI::IsMember({"pub", "scholar", "future"}));
    features->add_option("--t1", f_t1, "feature age");
    features->add_option("--t2", f_t2, "target age");
    features->add_option("--out", feat_out, "feature CSV")->required();

    // --- predict ---
    auto* predict = app.add_subcommand("predict", "fit and evaluate the task grid");
    std::string models_text = "baseline,markov", pred_out;
    add_corpus_opts(predict);
    predict->add_option("--task", task_text, "pub|scholar|future")
        ->check(CLI::IsMember({"pub", "scholar", "future"}));
    predict->add_option("--models", models_text, "baseline,markov,ridge,lasso,enet");
    predict->add_option("--seed", seed, "split and cross-validation seed");
    predict->add_option("--out", pred_out, "results CSV")->required();

    // --- report ---
    auto* report = app.add_subcommand("report", "JSON summary of a results table");
    std::string results_path, report_out;
    report->add_option("--results", results_path, "results CSV from predict")->required();
    report->add_option("--out", report_out, "report JSON")->required();

    // parent options such as --jobs may appear after the subcommand name
    for (CLI::App* sub : app.get_subcommands(std::function<bool(CLI::App*)>()))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    const auto load = [&](const std::string& path) {
        return load_corpus(path, end_year > 0 ? std::optional<int>(end_year) : std::nullopt);
    };
    const auto task_of = [&]() {
        if (task_text == "pub") return PredictionTask::publication;
        if (task_text == "scholar") return PredictionTask::scholar;
        return PredictionTask::future_works;
    };

    if (*ingest) {
        ManifestScope scope(argc, argv, out_path, 0);
        const Corpus corpus = in_format == "jsonl"
                                  ? ingest_jsonl_file(in_path, end_year > 0
                                                                   ? std::optional<int>(end_year)
                                                                   : std::nullopt)
                                  : ingest_csv_dir(in_path, end_year > 0
                                                                ? std::optional<int>(end_year)
                                                                : std::nullopt);
        save_corpus(corpus, out_path);
        scope.manifest.corpus_hash = hash_file(out_path);
        scope.finish();
        std::cerr << "ingested " << corpus.scholars().size() << " scholars, "
                  << corpus.publications().size() << " publications (end year "
                  << corpus.end_year() << ")\n";
        return 0;
    }

    if (*synth) {
        ManifestScope scope(argc, argv, synth_out, synth_cfg.seed);
        Corpus corpus = generate(synth_cfg);
        if (inject_abc) corpus = inject_artificial_scholars(corpus, cohort_year, synth_cfg.decay);
        save_corpus(corpus, synth_out);
        scope.manifest.corpus_hash = hash_file(synth_out);
        scope.finish();
        std::cerr << "generated " << corpus.scholars().size() << " scholars, "
                  << corpus.publications().size() << " publications (end year "
                  << corpus.end_year() << ")\n";
        return 0;
    }

    if (*percentile) {
        ManifestScope scope(argc, argv, pct_out, seed);
        scope.manifest.corpus_hash = hash_file(corpus_path);
        const std::string cache_key = benchmark + "|" + metric_name + "|" + target + "|" +
                                      ages_text + "|future=" + std::to_string(future_t1) +
                                      "|career=" +
                                      (cohort_career ? std::to_string(*cohort_career) : "-") +
                                      "|pub=" + (cohort_pub ? std::to_string(*cohort_pub) : "-");
        const auto cached = cache_path_for(scope.manifest.corpus_hash, cache_key);
        if (cached && std::filesystem::exists(*cached)) {
            std::filesystem::copy_file(*cached, pct_out,
                                       std::filesystem::copy_options::overwrite_existing);
            scope.finish();
            return 0;
        }
        const Corpus corpus = load(corpus_path);
        const BenchmarkSpec bench = parse_benchmark(benchmark, cohort_career, cohort_pub);
        const std::vector<int> ages = parse_age_list(ages_text);
        SeriesSet set;
        if (future_t1 > 0) {
            std::vector<int> t2_ages;
            for (int t : ages)
                if (t > future_t1) t2_ages.push_back(t);
            set = future_works_percentile_series(corpus, bench, future_t1, t2_ages, jobs);
        } else if (target == "pub") {
            set = publication_percentile_series(corpus, bench, ages, jobs);
        } else {
            set = scholar_percentile_series(corpus, bench, parse_metric(metric_name, target),
                                            ages, jobs);
        }
        write_series_csv(set, pct_out);
        if (cached)
            std::filesystem::copy_file(pct_out, *cached,
                                       std::filesystem::copy_options::overwrite_existing);
        scope.finish();
        return 0;
    }

    if (*stability) {
        ManifestScope scope(argc, argv, stab_out, seed);
        const SeriesSet set = read_series_csv(stab_pct);
        write_stability_outputs(set, parse_age_list(stab_t1), parse_age_list(stab_t2), stab_out);
        scope.add_output(json_sibling_path(stab_out));
        scope.finish();
        return 0;
    }

    if (*agree) {
        ManifestScope scope(argc, argv, agree_out, seed);
        std::vector<SeriesSet> sets;
        std::vector<std::string> labels;
        sets.push_back(read_series_csv(agree_a));
        labels.push_back("a");
        sets.push_back(read_series_csv(agree_b));
        labels.push_back("b");
        if (!agree_c.empty()) {
            sets.push_back(read_series_csv(agree_c));
            labels.push_back("c");
        }
        std::vector<const SeriesSet*> ptrs;
        for (const auto& s : sets) ptrs.push_back(&s);
        write_agreement_outputs(ptrs, labels, parse_age_list(agree_ages), agree_out);
        scope.add_output(json_sibling_path(agree_out));
        scope.finish();
        return 0;
    }

    if (*stationarity) {
        ManifestScope scope(argc, argv, stat_out, seed);
        const SeriesSet set = read_series_csv(stat_pct);
        write_stationarity_csv(set, difference_from, adf_lags, stat_out);
        scope.add_output(json_sibling_path(stat_out));
        scope.finish();
        return 0;
    }

    if (*features) {
        ManifestScope scope(argc, argv, feat_out, seed);
        scope.manifest.corpus_hash = hash_file(corpus_path);
        const Corpus corpus = load(corpus_path);
        const FeatureMatrix m = assemble(
            corpus, parse_benchmark(benchmark, cohort_career, cohort_pub), task_of(), f_t1, f_t2);
        write_features_csv(m, feat_out);
        scope.finish();
        std::cerr << "wrote " << m.n_rows() << " rows x " << m.n_cols() << " features\n";
        return 0;
    }

    if (*predict) {
        ManifestScope scope(argc, argv, pred_out, seed);
        scope.manifest.corpus_hash = hash_file(corpus_path);
        const Corpus corpus = load(corpus_path);
        std::vector<ModelKind> models;
        std::stringstream ss(models_text);
        std::string token;
        while (std::getline(ss, token, ','))
            if (!token.empty()) models.push_back(parse_model(token));
        if (models.empty()) throw DomainError("no models requested");
        const auto results =
            run_grid(corpus, parse_benchmark(benchmark, cohort_career, cohort_pub), task_of(),
                     models, seed, {}, jobs);
        write_results_csv(results, pred_out);
        scope.finish();
        std::cerr << "wrote " << results.size() << " fit results\n";
        return 0;
    }

    if (*report) {
        ManifestScope scope(argc, argv, report_out, seed);
        write_report_json(results_path, report_out);
        scope.finish();
        return 0;
    }

    std::cerr << app.help();
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const impactrank::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
