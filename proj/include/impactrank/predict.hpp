#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "impactrank/analysis.hpp"
#include "impactrank/error.hpp"
#include "impactrank/features.hpp"
#include "impactrank/mathutil.hpp"
#include "impactrank/parallel.hpp"

namespace impactrank {

enum class ModelKind { baseline, markov, ridge, lasso, enet };

inline std::string model_name(ModelKind k) {
    switch (k) {
        case ModelKind::baseline: return "baseline";
        case ModelKind::markov: return "markov";
        case ModelKind::ridge: return "ridge";
        case ModelKind::lasso: return "lasso";
        case ModelKind::enet: return "enet";
    }
    return "?";
}

inline ModelKind parse_model(const std::string& s) {
    if (s == "baseline") return ModelKind::baseline;
    if (s == "markov") return ModelKind::markov;
    if (s == "ridge") return ModelKind::ridge;
    if (s == "lasso") return ModelKind::lasso;
    if (s == "enet") return ModelKind::enet;
    throw DomainError("unknown model: " + s);
}

struct ModelSpec {
    ModelKind kind = ModelKind::baseline;
    int n_lambda = 50;                     // geometric penalty-strength grid
    double lambda_min_ratio = 1e-4;
    std::vector<double> enet_mixing = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int cv_folds = 10;
    double tol = 1e-7;
    int max_sweeps = 10000;
};

// ---------------------------------------------------------------------------
// Train/test split.
// ---------------------------------------------------------------------------

struct SplitIndices {
    std::vector<std::size_t> train, test;
};

/// Reproducible partition of ids at the given train ratio. Ids are shuffled
/// with a hand-rolled Fisher-Yates so the same seed yields the same partition
/// on every platform; the returned set holds the test ids.
inline std::set<std::string> split_ids(std::vector<std::string> ids, double train_ratio,
                                       std::uint64_t seed) {
    if (ids.size() < 10) throw DomainError("split: need at least 10 rows");
    std::sort(ids.begin(), ids.end());
    Rng rng = make_rng(seed);
    shuffle_inplace(ids, rng);
    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(train_ratio * static_cast<double>(ids.size())));
    std::set<std::string> test;
    for (std::size_t i = n_train; i < ids.size(); ++i) test.insert(ids[i]);
    return test;
}

inline SplitIndices split(const FeatureMatrix& m, double train_ratio, std::uint64_t seed) {
    const auto test_ids = split_ids(m.row_ids, train_ratio, seed);
    SplitIndices s;
    for (std::size_t i = 0; i < m.row_ids.size(); ++i) {
        if (test_ids.count(m.row_ids[i])) s.test.push_back(i);
        else s.train.push_back(i);
    }
    return s;
}

/// Partition rows of a matrix against a pre-drawn test-id set, so one split
/// is shared by every (t1, t2) task of a target kind.
inline SplitIndices split_against(const FeatureMatrix& m, const std::set<std::string>& test_ids) {
    SplitIndices s;
    for (std::size_t i = 0; i < m.row_ids.size(); ++i) {
        if (test_ids.count(m.row_ids[i])) s.test.push_back(i);
        else s.train.push_back(i);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Models. All models fit the differenced target; level predictions add the
// predicted delta back onto the autoregressive value.
// ---------------------------------------------------------------------------

struct TrainedModel {
    ModelKind kind = ModelKind::baseline;
    double intercept = 0.0;
    std::vector<std::size_t> feature_cols;  // indices into FeatureMatrix columns
    std::vector<double> coef;               // aligned with feature_cols, original scale
    double lambda = 0.0;
    double alpha = 0.0;                     // L1 share for penalized fits
    bool delta_dropped = false;             // markov collinearity fallback
    std::vector<double> objective_history;  // penalized fits: objective per sweep

    double predict_delta(const std::vector<double>& row) const {
        double v = intercept;
        for (std::size_t k = 0; k < feature_cols.size(); ++k) v += coef[k] * row[feature_cols[k]];
        return v;
    }
};

/// Simple linear regression of the differenced target on the autoregressive
/// feature.
inline TrainedModel fit_baseline(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
    if (rows.size() < 3) throw DegenerateInputError("fit_baseline: too few rows");
    const std::size_t xc = m.col(m.autoregressive_col);
    std::vector<double> x, y;
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (std::size_t r : rows) {
        x.push_back(m.rows[r][xc]);
        y.push_back(m.target[r]);
    }
    const OlsFit f = ols_fit(x, y);
    TrainedModel model;
    model.kind = ModelKind::baseline;
    model.intercept = f.intercept;
    model.feature_cols = {xc};
    model.coef = {f.slope};
    return model;
}

/// Adds the two-age change of the autoregressive feature as a second
/// regressor. A rank-deficient design falls back to the baseline fit with
/// delta_dropped set.
inline TrainedModel fit_markov(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
    if (rows.size() < 4) throw DegenerateInputError("fit_markov: too few rows");
    const std::size_t xc = m.col(m.autoregressive_col);
    const std::size_t dc = m.col(m.delta_col);
    std::vector<std::vector<double>> cols(3, std::vector<double>(rows.size()));
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        cols[0][i] = 1.0;
        cols[1][i] = m.rows[rows[i]][xc];
        cols[2][i] = m.rows[rows[i]][dc];
        y[i] = m.target[rows[i]];
    }
    TrainedModel model;
    model.kind = ModelKind::markov;
    try {
        const LsqFit f = least_squares(cols, y);
        model.intercept = f.coef[0];
        model.feature_cols = {xc, dc};
        model.coef = {f.coef[1], f.coef[2]};
    } catch (const DegenerateInputError&) {
        model = fit_baseline(m, rows);
        model.kind = ModelKind::markov;
        model.delta_dropped = true;
    }
    return model;
}

namespace detail {

struct Standardized {
    std::vector<std::size_t> cols;   // matrix columns kept (nonzero train variance)
    std::vector<double> mean, sd;    // train statistics per kept column
    std::vector<std::vector<double>> x;  // standardized columns
    std::vector<double> y;           // centered target
    double y_mean = 0.0;
};

inline Standardized standardize(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
    Standardized s;
    const std::size_t n = rows.size();
    s.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.y[i] = m.target[rows[i]];
    s.y_mean = mean(s.y);
    for (auto& v : s.y) v -= s.y_mean;
    for (std::size_t c = 0; c < m.n_cols(); ++c) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = m.rows[rows[i]][c];
        const double mu = mean(col);
        double var = 0.0;
        for (double v : col) var += (v - mu) * (v - mu);
        var /= static_cast<double>(n);
        if (var <= 0.0) continue;  // constant on train: unusable after scaling
        const double sd = std::sqrt(var);
        for (auto& v : col) v = (v - mu) / sd;
        // Exactly duplicated predictors (ratio features can be proportional
        // to their numerators) leave the model space unchanged but stall
        // coordinate descent on the equal-split direction; keep the first.
        bool duplicate = false;
        for (const auto& kept : s.x) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += kept[i] * col[i];
            if (std::fabs(dot) >= static_cast<double>(n) * (1.0 - 1e-10)) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        s.cols.push_back(c);
        s.mean.push_back(mu);
        s.sd.push_back(sd);
        s.x.push_back(std::move(col));
    }
    return s;
}

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

struct CdResult {
    std::vector<double> beta;  // standardized scale
    std::vector<double> objective_history;
};

/// Coordinate descent for (1/2n)||y - X b||^2 + lambda [alpha |b|_1 +
/// (1-alpha)/2 |b|_2^2] on standardized columns (unit variance). Stops when
/// no coefficient moves more than tol in one sweep.
inline CdResult coordinate_descent(const std::vector<std::vector<double>>& x,
                                   const std::vector<double>& y, double lambda, double alpha,
                                   double tol, int max_sweeps,
                                   const std::vector<double>* warm_start = nullptr) {
    const std::size_t p = x.size();
    const std::size_t n = y.size();
    const double nd = static_cast<double>(n);
    CdResult res;
    res.beta.assign(p, 0.0);
    if (warm_start && warm_start->size() == p) res.beta = *warm_start;

    std::vector<double> residual = y;
    for (std::size_t j = 0; j < p; ++j)
        if (res.beta[j] != 0.0)
            for (std::size_t i = 0; i < n; ++i) residual[i] -= res.beta[j] * x[j][i];

    const auto objective = [&]() {
        double sse = 0.0;
        for (double r : residual) sse += r * r;
        double l1 = 0.0, l2 = 0.0;
        for (double b : res.beta) {
            l1 += std::fabs(b);
            l2 += b * b;
        }
        return sse / (2.0 * nd) + lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * l2);
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += x[j][i] * residual[i];
            rho = rho / nd + res.beta[j];  // columns have unit variance
            const double updated = soft_threshold(rho, lambda * alpha) / (1.0 + lambda * (1.0 - alpha));
            const double change = updated - res.beta[j];
            if (change != 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= change * x[j][i];
                res.beta[j] = updated;
                max_change = std::max(max_change, std::fabs(change));
            }
        }
        res.objective_history.push_back(objective());
        if (max_change < tol) return res;
    }
    throw ConvergenceError("coordinate descent did not converge after " +
                           std::to_string(max_sweeps) + " sweeps (lambda=" +
                           std::to_string(lambda) + ", alpha=" + std::to_string(alpha) + ")");
}

}  // namespace detail

namespace detail {

inline TrainedModel model_from_standardized(const Standardized& s, const CdResult& cd,
                                            ModelKind kind, double alpha, double lambda) {
    TrainedModel model;
    model.kind = kind;
    model.lambda = lambda;
    model.alpha = alpha;
    model.objective_history = cd.objective_history;
    model.feature_cols = s.cols;
    model.coef.resize(s.cols.size());
    double adjust = 0.0;
    for (std::size_t k = 0; k < s.cols.size(); ++k) {
        model.coef[k] = cd.beta[k] / s.sd[k];
        adjust += model.coef[k] * s.mean[k];
    }
    model.intercept = s.y_mean - adjust;
    return model;
}

}  // namespace detail

/// Penalized fit at a fixed penalty. alpha is the L1 share: 0 is ridge,
/// 1 is lasso. Columns are standardized with statistics from the given rows
/// only; reported coefficients are mapped back to the original scale.
inline TrainedModel fit_penalized_at(const FeatureMatrix& m, const std::vector<std::size_t>& rows,
                                     ModelKind kind, double alpha, double lambda,
                                     const ModelSpec& spec = {}) {
    if (rows.size() < 3) throw DegenerateInputError("fit_penalized: too few rows");
    const auto s = detail::standardize(m, rows);
    if (s.cols.empty()) throw DegenerateInputError("fit_penalized: all features constant");
    const auto cd =
        detail::coordinate_descent(s.x, s.y, lambda, alpha, spec.tol, spec.max_sweeps);
    return detail::model_from_standardized(s, cd, kind, alpha, lambda);
}

namespace detail {

inline double lambda_max(const Standardized& s, double alpha) {
    const double nd = static_cast<double>(s.y.size());
    double m = 0.0;
    for (const auto& col : s.x) {
        double dot = 0.0;
        for (std::size_t i = 0; i < col.size(); ++i) dot += col[i] * s.y[i];
        m = std::max(m, std::fabs(dot) / nd);
    }
    return m / std::max(alpha, 1e-3);
}

inline std::vector<double> lambda_path(double lmax, const ModelSpec& spec) {
    std::vector<double> lambdas(static_cast<std::size_t>(spec.n_lambda));
    const double ratio = std::pow(spec.lambda_min_ratio, 1.0 / (spec.n_lambda - 1));
    double l = lmax;
    for (auto& v : lambdas) {
        v = l;
        l *= ratio;
    }
    return lambdas;
}

}  // namespace detail

/// Penalized fit with the penalty strength (and mixing, for the elastic net)
/// chosen by k-fold cross-validation over a geometric grid. Each fold walks
/// the penalty path from strong to weak with warm starts, which keeps the
/// solver fast on correlated features.
inline TrainedModel fit_penalized(const FeatureMatrix& m, const std::vector<std::size_t>& rows,
                                  ModelKind kind, std::uint64_t seed, const ModelSpec& spec = {}) {
    std::vector<double> alphas;
    switch (kind) {
        case ModelKind::ridge: alphas = {0.0}; break;
        case ModelKind::lasso: alphas = {1.0}; break;
        case ModelKind::enet: alphas = spec.enet_mixing; break;
        default: throw DomainError("fit_penalized: not a penalized model kind");
    }

    const int folds = std::min<int>(spec.cv_folds, static_cast<int>(rows.size()));
    if (folds < 2) throw DegenerateInputError("fit_penalized: too few rows for cross-validation");

    // deterministic fold assignment
    std::vector<std::size_t> positions(rows.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    Rng rng = make_rng(derive_seed(seed, "cv-folds"));
    shuffle_inplace(positions, rng);
    std::vector<int> fold_of(rows.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        fold_of[positions[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

    const auto grid_anchor = detail::standardize(m, rows);
    if (grid_anchor.cols.empty())
        throw DegenerateInputError("fit_penalized: all features constant");

    // When the smallest training fold has no more rows than features, the
    // weak end of the path approaches an interpolating fit and coordinate
    // descent crawls; shorten the path the way reference lasso
    // implementations do for p >= n.
    ModelSpec eff = spec;
    const std::size_t fold_n =
        rows.size() - (rows.size() + static_cast<std::size_t>(folds) - 1) /
                          static_cast<std::size_t>(folds);
    if (fold_n <= grid_anchor.cols.size())
        eff.lambda_min_ratio = std::max(spec.lambda_min_ratio, 1e-2);

    struct FoldData {
        detail::Standardized s;
        std::vector<std::size_t> val_rows;
    };
    std::vector<FoldData> fold_data;
    for (int f = 0; f < folds; ++f) {
        FoldData fd;
        std::vector<std::size_t> fit_rows;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (fold_of[i] == f) fd.val_rows.push_back(rows[i]);
            else fit_rows.push_back(rows[i]);
        }
        if (fit_rows.size() < 3 || fd.val_rows.empty()) continue;
        fd.s = detail::standardize(m, fit_rows);
        if (fd.s.cols.empty()) continue;
        fold_data.push_back(std::move(fd));
    }
    if (fold_data.empty())
        throw DegenerateInputError("fit_penalized: no usable cross-validation folds");

    double best_mse = std::numeric_limits<double>::infinity();
    double best_alpha = alphas.front(), best_lambda = 0.0;
    for (double alpha : alphas) {
        const auto lambdas = detail::lambda_path(detail::lambda_max(grid_anchor, alpha), eff);
        std::vector<double> mse(lambdas.size(), 0.0);
        std::vector<std::size_t> folds_seen(lambdas.size(), 0);
        std::vector<std::size_t> mse_n(lambdas.size(), 0);
        for (const auto& fd : fold_data) {
            std::vector<double> warm;
            double sst = 0.0;
            for (double v : fd.s.y) sst += v * v;
            for (std::size_t li = 0; li < lambdas.size(); ++li) {
                detail::CdResult cd;
                try {
                    cd = detail::coordinate_descent(fd.s.x, fd.s.y, lambdas[li], alpha, spec.tol,
                                                    spec.max_sweeps,
                                                    warm.empty() ? nullptr : &warm);
                } catch (const ConvergenceError&) {
                    break;  // the rest of this fold's path would only be harder
                }
                warm = cd.beta;
                const TrainedModel candidate =
                    detail::model_from_standardized(fd.s, cd, kind, alpha, lambdas[li]);
                for (std::size_t r : fd.val_rows) {
                    const double err = candidate.predict_delta(m.rows[r]) - m.target[r];
                    mse[li] += err * err;
                    ++mse_n[li];
                }
                ++folds_seen[li];
                // a saturated fit only interpolates from here down
                double sse = 0.0;
                for (std::size_t i = 0; i < fd.s.y.size(); ++i) {
                    double pred = 0.0;
                    for (std::size_t j = 0; j < fd.s.x.size(); ++j)
                        pred += cd.beta[j] * fd.s.x[j][i];
                    const double r = fd.s.y[i] - pred;
                    sse += r * r;
                }
                if (sst > 0.0 && sse <= 1e-4 * sst) break;
            }
        }
        // compare penalties only where every usable fold produced a fit
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            if (folds_seen[li] != fold_data.size() || mse_n[li] == 0) continue;
            const double v = mse[li] / static_cast<double>(mse_n[li]);
            if (v < best_mse) {
                best_mse = v;
                best_alpha = alpha;
                best_lambda = lambdas[li];
            }
        }
    }
    if (best_mse == std::numeric_limits<double>::infinity())
        throw DegenerateInputError("fit_penalized: no penalty evaluated by all folds");

    // refit on all rows, walking the path down to the selected penalty
    const auto lambdas = detail::lambda_path(detail::lambda_max(grid_anchor, best_alpha), eff);
    std::vector<double> warm;
    detail::CdResult cd;
    for (double lambda : lambdas) {
        cd = detail::coordinate_descent(grid_anchor.x, grid_anchor.y,
                                        std::max(lambda, best_lambda), best_alpha, spec.tol,
                                        spec.max_sweeps, warm.empty() ? nullptr : &warm);
        warm = cd.beta;
        if (lambda <= best_lambda) break;
    }
    return detail::model_from_standardized(grid_anchor, cd, kind, best_alpha, best_lambda);
}

inline TrainedModel fit_model(const FeatureMatrix& m, const std::vector<std::size_t>& rows,
                              ModelKind kind, std::uint64_t seed, const ModelSpec& spec = {}) {
    switch (kind) {
        case ModelKind::baseline: return fit_baseline(m, rows);
        case ModelKind::markov: return fit_markov(m, rows);
        default: return fit_penalized(m, rows, kind, seed, spec);
    }
}

// ---------------------------------------------------------------------------
// Evaluation. Error measures are reported on the reconstructed level target:
// predicted level = autoregressive value + predicted delta.
// ---------------------------------------------------------------------------

struct ErrorMeasures {
    double r2 = 0.0;
    double rmse = 0.0;
    double medse = 0.0;  // root of the median squared error
    double mae = 0.0;
    bool degenerate_r2 = false;  // zero variance in the test target
};

inline ErrorMeasures evaluate(const TrainedModel& model, const FeatureMatrix& m,
                              const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw DomainError("evaluate: empty test set");
    std::vector<double> level_true, level_pred;
    level_true.reserve(rows.size());
    level_pred.reserve(rows.size());
    for (std::size_t r : rows) {
        level_true.push_back(m.autoregressive[r] + m.target[r]);
        level_pred.push_back(m.autoregressive[r] + model.predict_delta(m.rows[r]));
    }
    ErrorMeasures e;
    double sse = 0.0, abs_sum = 0.0;
    std::vector<double> sq(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double err = level_pred[i] - level_true[i];
        sq[i] = err * err;
        sse += sq[i];
        abs_sum += std::fabs(err);
    }
    const double n = static_cast<double>(rows.size());
    e.rmse = std::sqrt(sse / n);
    e.mae = abs_sum / n;
    e.medse = std::sqrt(median(sq));
    const double mt = mean(level_true);
    double sst = 0.0;
    for (double v : level_true) sst += (v - mt) * (v - mt);
    if (sst == 0.0) {
        e.degenerate_r2 = true;
        e.r2 = std::numeric_limits<double>::quiet_NaN();
    } else {
        e.r2 = 1.0 - sse / sst;
    }
    return e;
}

// ---------------------------------------------------------------------------
// The (t1, t2) task grid.
// ---------------------------------------------------------------------------

struct FitResult {
    ModelKind model = ModelKind::baseline;
    PredictionTask task = PredictionTask::publication;
    int t1 = 0;
    int t2 = 0;
    std::map<std::string, double> coefficients;  // feature name -> value, plus "(intercept)"
    ErrorMeasures err;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

inline std::vector<std::pair<int, int>> task_grid() {
    std::vector<std::pair<int, int>> grid;
    for (int t1 : {5, 10, 15, 20, 25})
        for (int t2 = t1 + 1; t2 <= 30; ++t2) grid.emplace_back(t1, t2);
    return grid;
}

namespace detail {

/// Clone a base matrix (features at t1) with the target re-pointed at t2.
/// Rows whose target does not exist at t2 are dropped.
inline FeatureMatrix retarget(const FeatureMatrix& base,
                              const std::map<std::string, double>& level_t2_minus_ar, int t2) {
    FeatureMatrix m = base;
    m.t2 = t2;
    m.row_ids.clear();
    m.row_owner.clear();
    m.rows.clear();
    m.target.clear();
    m.autoregressive.clear();
    for (std::size_t i = 0; i < base.row_ids.size(); ++i) {
        auto it = level_t2_minus_ar.find(base.row_ids[i]);
        if (it == level_t2_minus_ar.end()) continue;
        m.row_ids.push_back(base.row_ids[i]);
        if (!base.row_owner.empty()) m.row_owner.push_back(base.row_owner[i]);
        m.rows.push_back(base.rows[i]);
        m.autoregressive.push_back(base.autoregressive[i]);
        m.target.push_back(it->second - base.autoregressive[i]);
    }
    return m;
}

}  // namespace detail

/// Train and evaluate the requested models on every (t1, t2) pair of the
/// grid. One 9:1 split per target kind is drawn up front and reused across
/// all tasks, so train and test populations stay fixed over the horizon.
inline std::vector<FitResult> run_grid(const Corpus& corpus, const BenchmarkSpec& bench,
                                       PredictionTask task, const std::vector<ModelKind>& models,
                                       std::uint64_t seed, const ModelSpec& spec = {},
                                       unsigned jobs = 1) {
    FeatureContext ctx(corpus, bench);

    // warm every ranking the retargeting step will need, then treat the
    // context as read-only inside the parallel region
    {
        std::vector<int> ages;
        for (int t = 1; t <= 30; ++t) ages.push_back(t);
        ctx.warm(ages, task != PredictionTask::publication ? ages : std::vector<int>{}, jobs);
    }
    ScholarRankContext rank_ctx(ctx.corpus(), BenchmarkSpec::all(), MetricSpec::p5_sum());

    // shared split over the full-history roster
    std::vector<std::string> roster;
    if (task == PredictionTask::publication) {
        for (const auto& p : ctx.corpus().publications())
            if (p.observed_years(ctx.corpus().end_year()) >= kFullHistoryYears)
                roster.push_back(p.pub_id);
    } else {
        for (const auto& s : ctx.corpus().scholars())
            if (s.observed_years(ctx.corpus().end_year()) >= kFullHistoryYears)
                roster.push_back(s.scholar_id);
    }
    const auto test_ids =
        split_ids(roster, 0.9, derive_seed(seed, "split:" + task_name(task)));

    const auto grid = task_grid();
    std::vector<std::vector<FitResult>> per_task(grid.size());

    // One base matrix per t1; features do not depend on t2. Future-works
    // bases borrow the scholar-task rows (same features, and a superset of
    // every window's rankable scholars) so retargeting can only drop rows.
    const PredictionTask base_task =
        task == PredictionTask::future_works ? PredictionTask::scholar : task;
    std::map<int, FeatureMatrix> base_by_t1;
    for (int t1 : {5, 10, 15, 20, 25})
        base_by_t1.emplace(t1, assemble_with(ctx, base_task, t1, t1 + 1));

    parallel_for(grid.size(), jobs, [&](std::size_t gi) {
        const auto [t1, t2] = grid[gi];
        const FeatureMatrix& base = base_by_t1.at(t1);
        std::map<std::string, double> level_t2;
        if (task == PredictionTask::publication) {
            level_t2 = ctx.pub_cumulative_pct(t2);
        } else if (task == PredictionTask::scholar) {
            level_t2 = ctx.sp5_pct(t2);
        } else {
            level_t2 = rank_ctx.future_works(t1, t2);
        }
        FeatureMatrix m = detail::retarget(base, level_t2, t2);
        m.task = task;
        if (task == PredictionTask::future_works) m.target_name = "delta_future_works_percentile";
        const SplitIndices si = split_against(m, test_ids);
        for (ModelKind kind : models) {
            FitResult r;
            r.model = kind;
            r.task = task;
            r.t1 = t1;
            r.t2 = t2;
            const TrainedModel model =
                fit_model(m, si.train, kind, derive_seed(seed, "fit"), spec);
            r.coefficients["(intercept)"] = model.intercept;
            for (std::size_t k = 0; k < model.feature_cols.size(); ++k)
                r.coefficients[m.column_names[model.feature_cols[k]]] = model.coef[k];
            r.err = evaluate(model, m, si.test);
            r.n_train = si.train.size();
            r.n_test = si.test.size();
            per_task[gi].push_back(std::move(r));
        }
    });

    std::vector<FitResult> out;
    for (auto& batch : per_task)
        for (auto& r : batch) out.push_back(std::move(r));
    std::sort(out.begin(), out.end(), [](const FitResult& a, const FitResult& b) {
        return std::tie(a.model, a.t1, a.t2) < std::tie(b.model, b.t1, b.t2);
    });
    return out;
}

}  // namespace impactrank
