#include "hexmeter/models.hpp"

#include "hexmeter/error.hpp"
#include "hexmeter/parallel.hpp"
#include "hexmeter/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hexmeter {

std::string_view model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::ExtraTrees: return "ExtraTrees";
        case ModelKind::GaussianNB: return "GaussianNB";
        case ModelKind::LogisticRegression: return "LogisticRegression";
        case ModelKind::LinearSVM: return "LinearSVM";
    }
    return "unknown";
}

std::optional<ModelKind> model_from_name(std::string_view name) {
    for (ModelKind k : kAllModels) {
        if (model_name(k) == name) return k;
    }
    if (name == "SVM") return ModelKind::LinearSVM;
    if (name == "GNB") return ModelKind::GaussianNB;
    if (name == "LR") return ModelKind::LogisticRegression;
    return std::nullopt;
}

TrainedModel::TrainedModel(ModelKind kind, std::vector<int> classes, std::vector<std::string> feature_names,
                           Params params, std::vector<std::string> warnings)
    : kind_(kind),
      classes_(std::move(classes)),
      feature_names_(std::move(feature_names)),
      params_(std::move(params)),
      warnings_(std::move(warnings)) {}

namespace {

using detail::ExtraTreesModel;
using detail::GaussianNBModel;
using detail::LinearModel;
using detail::Tree;
using detail::TreeNode;

std::size_t argmax_lowest(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Extremely randomized trees

double gini(std::span<const double> counts, double n) {
    if (n <= 0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += (c / n) * (c / n);
    return 1.0 - s;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const int> y_idx, std::size_t n_classes, const HyperParams& hyper,
                std::uint64_t seed)
        : X_(X), y_(y_idx), n_classes_(n_classes), hyper_(hyper), rng_(seed), importance_(X.cols(), 0.0) {
        const std::size_t d = X.cols();
        max_features_ = hyper.max_features > 0
                            ? std::min(hyper.max_features, d)
                            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
        max_features_ = std::max<std::size_t>(max_features_, 1);
    }

    Tree build() {
        std::vector<std::size_t> idx(X_.rows());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Tree tree;
        struct Pending {
            std::size_t begin, end;
            int node;
        };
        tree.nodes.emplace_back();
        std::vector<Pending> stack{{0, idx.size(), 0}};
        std::vector<std::size_t> features(X_.cols());
        std::vector<double> counts(n_classes_), left_counts(n_classes_), right_counts(n_classes_);

        while (!stack.empty()) {
            const Pending job = stack.back();
            stack.pop_back();
            const std::size_t n = job.end - job.begin;
            std::fill(counts.begin(), counts.end(), 0.0);
            for (std::size_t i = job.begin; i < job.end; ++i) counts[static_cast<std::size_t>(y_[idx[i]])] += 1.0;
            const double node_gini = gini(counts, static_cast<double>(n));

            auto make_leaf = [&] {
                TreeNode& leaf = tree.nodes[static_cast<std::size_t>(job.node)];
                leaf.feature = -1;
                leaf.class_proba.resize(n_classes_);
                for (std::size_t c = 0; c < n_classes_; ++c) {
                    leaf.class_proba[c] = counts[c] / static_cast<double>(n);
                }
            };
            if (n < hyper_.min_samples_split || node_gini <= 0.0) {
                make_leaf();
                continue;
            }

            std::iota(features.begin(), features.end(), std::size_t{0});
            rng_.shuffle(std::span(features));
            std::size_t tried = 0;
            int best_feature = -1;
            double best_threshold = 0.0;
            double best_decrease = -std::numeric_limits<double>::infinity();
            for (std::size_t f : features) {
                if (tried == max_features_) break;
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (std::size_t i = job.begin; i < job.end; ++i) {
                    const double v = X_(idx[i], f);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                // Constant features are skipped and do not count as tried.
                if (!(hi - lo > 1e-12)) continue;
                ++tried;
                const double threshold = lo + rng_.uniform() * (hi - lo);
                if (!(threshold < hi)) continue;
                std::fill(left_counts.begin(), left_counts.end(), 0.0);
                double n_left = 0.0;
                for (std::size_t i = job.begin; i < job.end; ++i) {
                    if (X_(idx[i], f) <= threshold) {
                        left_counts[static_cast<std::size_t>(y_[idx[i]])] += 1.0;
                        n_left += 1.0;
                    }
                }
                const double n_right = static_cast<double>(n) - n_left;
                for (std::size_t c = 0; c < n_classes_; ++c) right_counts[c] = counts[c] - left_counts[c];
                const double decrease = static_cast<double>(n) * node_gini - n_left * gini(left_counts, n_left) -
                                        n_right * gini(right_counts, n_right);
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = static_cast<int>(f);
                    best_threshold = threshold;
                }
            }
            if (best_feature < 0) {
                make_leaf();
                continue;
            }

            const auto mid = std::partition(
                idx.begin() + static_cast<std::ptrdiff_t>(job.begin), idx.begin() + static_cast<std::ptrdiff_t>(job.end),
                [&](std::size_t r) { return X_(r, static_cast<std::size_t>(best_feature)) <= best_threshold; });
            const auto split = static_cast<std::size_t>(mid - idx.begin());
            importance_[static_cast<std::size_t>(best_feature)] += std::max(0.0, best_decrease);

            const int left = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            const int right = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
            node.feature = best_feature;
            node.threshold = best_threshold;
            node.left = left;
            node.right = right;
            stack.push_back({split, job.end, right});
            stack.push_back({job.begin, split, left});
        }
        return tree;
    }

    // Normalised to sum 1 (all zeros when the tree never split).
    std::vector<double> importances() const {
        std::vector<double> out = importance_;
        const double total = std::accumulate(out.begin(), out.end(), 0.0);
        if (total > 0.0) {
            for (double& v : out) v /= total;
        }
        return out;
    }

private:
    const Matrix& X_;
    std::span<const int> y_;
    std::size_t n_classes_;
    const HyperParams& hyper_;
    Rng rng_;
    std::size_t max_features_ = 1;
    std::vector<double> importance_;
};

ExtraTreesModel train_extra_trees(const Matrix& X, std::span<const int> y_idx, std::size_t n_classes,
                                  const HyperParams& hyper) {
    ExtraTreesModel model;
    model.trees.resize(hyper.n_trees);
    std::vector<std::vector<double>> per_tree(hyper.n_trees);
    parallel_for(hyper.n_trees, [&](std::size_t t) {
        TreeBuilder builder(X, y_idx, n_classes, hyper, Rng::substream(hyper.seed, t)());
        model.trees[t] = builder.build();
        per_tree[t] = builder.importances();
    });
    model.importances.assign(X.cols(), 0.0);
    for (const auto& imp : per_tree) {
        for (std::size_t f = 0; f < imp.size(); ++f) model.importances[f] += imp[f];
    }
    const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
    if (total > 0.0) {
        for (double& v : model.importances) v *= 100.0 / total;
    }
    return model;
}

std::vector<double> tree_proba(const Tree& tree, std::span<const double> x) {
    std::size_t node = 0;
    while (tree.nodes[node].feature >= 0) {
        const TreeNode& n = tree.nodes[node];
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return tree.nodes[node].class_proba;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

GaussianNBModel train_gaussian_nb(const Matrix& X, std::span<const int> y_idx, std::size_t n_classes,
                                  const HyperParams& hyper) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    GaussianNBModel m;
    m.mean.assign(n_classes, std::vector<double>(d, 0.0));
    m.var.assign(n_classes, std::vector<double>(d, 0.0));
    std::vector<double> count(n_classes, 0.0);

    for (std::size_t r = 0; r < n; ++r) {
        const auto c = static_cast<std::size_t>(y_idx[r]);
        count[c] += 1.0;
        for (std::size_t f = 0; f < d; ++f) m.mean[c][f] += X(r, f);
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t f = 0; f < d; ++f) m.mean[c][f] /= count[c];
    }
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = static_cast<std::size_t>(y_idx[r]);
        for (std::size_t f = 0; f < d; ++f) {
            const double dv = X(r, f) - m.mean[c][f];
            m.var[c][f] += dv * dv;
        }
    }

    // epsilon from the largest overall (population) feature variance
    double max_var = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
        double mu = 0.0;
        for (std::size_t r = 0; r < n; ++r) mu += X(r, f);
        mu /= static_cast<double>(n);
        double v = 0.0;
        for (std::size_t r = 0; r < n; ++r) v += (X(r, f) - mu) * (X(r, f) - mu);
        max_var = std::max(max_var, v / static_cast<double>(n));
    }
    double epsilon = hyper.var_smoothing * max_var;
    if (!(epsilon > 0.0)) epsilon = hyper.var_smoothing;

    m.log_prior.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        m.log_prior[c] = std::log(count[c] / static_cast<double>(n));
        for (std::size_t f = 0; f < d; ++f) m.var[c][f] = m.var[c][f] / count[c] + epsilon;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Logistic regression: gradient descent with Armijo backtracking. Trial
// steps start from the Barzilai-Borwein estimate.

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

struct LogisticObjective {
    const Matrix& X;
    std::span<const double> sign;  // +1 / -1
    double l2;

    // theta = (w_0..w_{d-1}, b). Returns objective; fills gradient if given.
    double eval(std::span<const double> theta, std::vector<double>* grad) const {
        const std::size_t d = X.cols();
        double f = 0.0;
        if (grad) std::fill(grad->begin(), grad->end(), 0.0);
        for (std::size_t r = 0; r < X.rows(); ++r) {
            double z = theta[d];
            const auto x = X.row(r);
            for (std::size_t j = 0; j < d; ++j) z += theta[j] * x[j];
            const double m = sign[r] * z;
            f += softplus(-m);
            if (grad) {
                // d/dz softplus(-y z) = -y * sigmoid(-y z)
                const double s = m >= 0 ? std::exp(-m) / (1.0 + std::exp(-m)) : 1.0 / (1.0 + std::exp(m));
                const double g = -sign[r] * s;
                for (std::size_t j = 0; j < d; ++j) (*grad)[j] += g * x[j];
                (*grad)[d] += g;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            f += 0.5 * l2 * theta[j] * theta[j];
            if (grad) (*grad)[j] += l2 * theta[j];
        }
        return f;
    }
};

LinearModel train_logistic(const Matrix& X, std::span<const double> sign, const HyperParams& hyper) {
    const std::size_t d = X.cols();
    const LogisticObjective obj{X, sign, hyper.l2};
    std::vector<double> theta(d + 1, 0.0), grad(d + 1), next(d + 1), next_grad(d + 1);
    double f = obj.eval(theta, &grad);
    double step = 1.0 / std::max<double>(1.0, static_cast<double>(X.rows()));
    const double tolerance = hyper.gradient_tolerance * std::max<double>(1.0, static_cast<double>(X.rows()));

    for (int it = 0; it < hyper.max_iterations; ++it) {
        double gmax = 0.0, g2 = 0.0;
        for (double g : grad) {
            gmax = std::max(gmax, std::abs(g));
            g2 += g * g;
        }
        if (gmax < tolerance) break;

        double f_next = f;
        bool accepted = false;
        for (int halving = 0; halving < 80; ++halving) {
            for (std::size_t j = 0; j <= d; ++j) next[j] = theta[j] - step * grad[j];
            f_next = obj.eval(next, nullptr);
            if (f_next <= f - 1e-4 * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        obj.eval(next, &next_grad);

        double ss = 0.0, sy = 0.0;
        for (std::size_t j = 0; j <= d; ++j) {
            const double s = next[j] - theta[j];
            ss += s * s;
            sy += s * (next_grad[j] - grad[j]);
        }
        theta.swap(next);
        grad.swap(next_grad);
        f = f_next;
        step = sy > 0.0 ? ss / sy : step * 2.0;
    }
    LinearModel m;
    m.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
    m.bias = theta[d];
    return m;
}

// ---------------------------------------------------------------------------
// Linear SVM: Pegasos stochastic subgradient on the hinge loss with
// lambda = 1/n. The bias is an extra constant feature. Weights are averaged
// over the second half of all updates.

LinearModel train_linear_svm(const Matrix& X, std::span<const double> sign, const HyperParams& hyper) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    const double lambda = 1.0 / static_cast<double>(n);
    const double radius = 1.0 / std::sqrt(lambda);
    std::vector<double> w(d + 1, 0.0), avg(d + 1, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const auto epochs = static_cast<std::size_t>(std::max(1, hyper.svm_epochs));
    const std::size_t total = epochs * n;
    const std::size_t average_from = total / 2;
    std::size_t averaged = 0;
    std::size_t t = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
        Rng rng = Rng::substream(hyper.seed, e);
        rng.shuffle(std::span(order));
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto x = X.row(i);
            double margin = w[d];
            for (std::size_t j = 0; j < d; ++j) margin += w[j] * x[j];
            margin *= sign[i];

            const double shrink = 1.0 - eta * lambda;
            for (double& v : w) v *= shrink;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < d; ++j) w[j] += eta * sign[i] * x[j];
                w[d] += eta * sign[i];
            }
            double norm2 = 0.0;
            for (double v : w) norm2 += v * v;
            if (norm2 > radius * radius) {
                const double scale = radius / std::sqrt(norm2);
                for (double& v : w) v *= scale;
            }
            if (t > average_from) {
                for (std::size_t j = 0; j <= d; ++j) avg[j] += w[j];
                ++averaged;
            }
        }
    }
    LinearModel m;
    m.weights.resize(d);
    for (std::size_t j = 0; j < d; ++j) m.weights[j] = avg[j] / static_cast<double>(averaged);
    m.bias = avg[d] / static_cast<double>(averaged);
    return m;
}

}  // namespace

TrainedModel train(ModelKind kind, const Matrix& X, std::span<const int> y, const HyperParams& hyper,
                   std::vector<std::string> feature_names) {
    if (y.size() != X.rows()) throw DataError("train: label count does not match row count");
    if (X.cols() == 0) throw DataError("train: no feature columns");
    if (feature_names.empty()) {
        for (std::size_t j = 0; j < X.cols(); ++j) feature_names.push_back("x" + std::to_string(j));
    }
    if (feature_names.size() != X.cols()) throw DataError("train: feature name count does not match columns");

    std::vector<int> classes(y.begin(), y.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() != 2) {
        throw DataError("train: expected exactly two distinct labels, found " + std::to_string(classes.size()));
    }
    std::vector<int> y_idx(y.size());
    std::vector<double> sign(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y_idx[i] = y[i] == classes[0] ? 0 : 1;
        sign[i] = y[i] == classes[0] ? -1.0 : 1.0;
    }

    std::vector<std::string> warnings;
    bool identical = true;
    for (std::size_t r = 1; r < X.rows() && identical; ++r) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (X(r, j) != X(0, j)) {
                identical = false;
                break;
            }
        }
    }
    if (identical) warnings.push_back("all training rows are identical; the model is trivial");

    TrainedModel::Params params;
    switch (kind) {
        case ModelKind::ExtraTrees: params = train_extra_trees(X, y_idx, 2, hyper); break;
        case ModelKind::GaussianNB: params = train_gaussian_nb(X, y_idx, 2, hyper); break;
        case ModelKind::LogisticRegression: params = train_logistic(X, sign, hyper); break;
        case ModelKind::LinearSVM: params = train_linear_svm(X, sign, hyper); break;
    }
    return TrainedModel(kind, std::move(classes), std::move(feature_names), std::move(params), std::move(warnings));
}

std::vector<int> TrainedModel::predict(const Matrix& X) const {
    if (X.rows() > 0 && X.cols() != n_features()) {
        throw DataError("predict: model expects " + std::to_string(n_features()) + " columns, got " +
                        std::to_string(X.cols()));
    }
    std::vector<int> out(X.rows());
    std::vector<double> scores(classes_.size());
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const auto x = X.row(r);
        std::fill(scores.begin(), scores.end(), 0.0);
        if (const auto* et = std::get_if<detail::ExtraTreesModel>(&params_)) {
            for (const auto& tree : et->trees) {
                const auto p = tree_proba(tree, x);
                for (std::size_t c = 0; c < scores.size(); ++c) scores[c] += p[c];
            }
        } else if (const auto* nb = std::get_if<detail::GaussianNBModel>(&params_)) {
            for (std::size_t c = 0; c < scores.size(); ++c) {
                double s = nb->log_prior[c];
                for (std::size_t f = 0; f < x.size(); ++f) {
                    const double v = nb->var[c][f];
                    const double dv = x[f] - nb->mean[c][f];
                    s -= 0.5 * std::log(2.0 * M_PI * v) + 0.5 * dv * dv / v;
                }
                scores[c] = s;
            }
        } else {
            const auto& lin = std::get<detail::LinearModel>(params_);
            double z = lin.bias;
            for (std::size_t f = 0; f < x.size(); ++f) z += lin.weights[f] * x[f];
            scores[1] = z;
        }
        out[r] = classes_[argmax_lowest(scores)];
    }
    return out;
}

std::optional<std::vector<double>> TrainedModel::feature_importances() const {
    if (kind_ == ModelKind::ExtraTrees) return std::get<detail::ExtraTreesModel>(params_).importances;
    if (kind_ == ModelKind::LinearSVM) {
        std::vector<double> out = std::get<detail::LinearModel>(params_).weights;
        for (double& v : out) v = std::abs(v);
        return out;
    }
    return std::nullopt;
}

}  // namespace hexmeter
