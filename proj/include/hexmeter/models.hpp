#pragma once

// Two-label classifiers written from scratch: extremely randomized trees,
// Gaussian naive Bayes, L2 logistic regression and a linear SVM.

#include "hexmeter/linalg.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hexmeter {

enum class ModelKind { ExtraTrees, GaussianNB, LogisticRegression, LinearSVM };

inline constexpr std::array<ModelKind, 4> kAllModels{ModelKind::ExtraTrees, ModelKind::GaussianNB,
                                                     ModelKind::LogisticRegression, ModelKind::LinearSVM};

std::string_view model_name(ModelKind kind);
std::optional<ModelKind> model_from_name(std::string_view name);

struct HyperParams {
    // ExtraTrees
    std::size_t n_trees = 100;
    std::size_t max_features = 0;  // 0: ceil(sqrt(n_features))
    std::size_t min_samples_split = 2;
    // GaussianNB: epsilon = var_smoothing * largest feature variance
    double var_smoothing = 1e-9;
    // LogisticRegression: sum of log-losses + l2/2 |w|^2
    double l2 = 1.0;
    // stop when max |gradient| < gradient_tolerance * n_rows
    double gradient_tolerance = 1e-6;
    int max_iterations = 10000;
    // LinearSVM: Pegasos with lambda = 1/n
    int svm_epochs = 200;

    std::uint64_t seed = 0;
};

namespace detail {

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_proba;  // leaves only
};

struct Tree {
    std::vector<TreeNode> nodes;
};

struct ExtraTreesModel {
    std::vector<Tree> trees;
    std::vector<double> importances;  // sums to 100 unless no tree split
};

struct GaussianNBModel {
    std::vector<double> log_prior;        // per class
    std::vector<std::vector<double>> mean;  // class x feature
    std::vector<std::vector<double>> var;
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
};

}  // namespace detail

class TrainedModel {
public:
    using Params = std::variant<detail::ExtraTreesModel, detail::GaussianNBModel, detail::LinearModel>;

    TrainedModel(ModelKind kind, std::vector<int> classes, std::vector<std::string> feature_names, Params params,
                 std::vector<std::string> warnings);

    ModelKind kind() const noexcept { return kind_; }
    const std::vector<int>& classes() const noexcept { return classes_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    std::size_t n_features() const noexcept { return feature_names_.size(); }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    const Params& params() const noexcept { return params_; }

    // Throws DataError when the column count differs from training.
    std::vector<int> predict(const Matrix& X) const;

    // ExtraTrees: mean impurity decrease normalised to sum 100.
    // LinearSVM: |weight| per feature. Others: nullopt.
    std::optional<std::vector<double>> feature_importances() const;

private:
    ModelKind kind_;
    std::vector<int> classes_;  // ascending; ties go to the lowest
    std::vector<std::string> feature_names_;
    Params params_;
    std::vector<std::string> warnings_;
};

// X rows are observations; y holds exactly two distinct labels.
TrainedModel train(ModelKind kind, const Matrix& X, std::span<const int> y, const HyperParams& hyper,
                   std::vector<std::string> feature_names = {});

}  // namespace hexmeter
