#pragma once

#include "fit2/tsk_inference.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fit2
{

/// Labelled samples: one row of X per sample, targets in {0, 1}.
struct Dataset
{
    Matrix X;
    Vector T;
    std::vector<std::string> feature_names;

    std::size_t samples() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t features() const { return static_cast<std::size_t>(X.cols()); }

    /// Throws ValidationError unless the shape, finiteness and label
    /// requirements hold. Both classes must be present.
    void validate() const;

    Dataset subset(std::span<const std::size_t> rows) const;
};

std::vector<FeatureRange> feature_ranges(const Dataset& data);

enum class Trainer
{
    fit2felm,
    it2felm_km,
    t1felm,
    elm
};

std::string to_string(Trainer t);
Trainer trainer_from_string(const std::string& name);

struct TrainConfig
{
    std::size_t rules = 6;
    std::uint64_t seed = 1;
    bool bias = false;
    double ridge = 0.0;
    int refine_passes = 8;
    AntecedentInit init;
    // Hidden width for the ELM baseline; 0 means rules x inputs.
    std::size_t elm_hidden = 0;

    void validate() const;
};

/// Plain single-hidden-layer ELM with sigmoid units.
struct ELMModel
{
    Matrix input_weights; // hidden x inputs
    Vector biases;        // hidden
    Vector output_weights;

    bool operator==(const ELMModel&) const = default;
};

Matrix elm_hidden_layer(const ELMModel& model, const Eigen::Ref<const Matrix>& X);
double predict(const ELMModel& model, const Eigen::Ref<const Vector>& x);

using Classifier = std::variant<TSKModel, ELMModel>;

double predict(const Classifier& model, const Eigen::Ref<const Vector>& x);
Vector predict_rows(const Classifier& model, const Eigen::Ref<const Matrix>& X);
std::size_t input_count(const Classifier& model);

struct TrainResult
{
    Classifier model;
    double train_seconds = 0.0;
    // Solves performed (1 = pass 0 only).
    int passes = 0;
    bool rolled_back = false;
    double train_residual = 0.0;
    std::vector<std::string> warnings;
};

/// Minimum-norm least squares (ridge == 0) or ridge regression (ridge > 0).
Vector pseudoinverse_solve(const Eigen::Ref<const Matrix>& H, const Eigen::Ref<const Vector>& T, double ridge = 0.0);

/// Random IT2 antecedents, then consequents from H Q = T with H built from
/// SC switch indicators, refined for up to cfg.refine_passes solves.
TrainResult fit_fit2felm(const Dataset& data, const TrainConfig& cfg);

/// Same pipeline with the Karnik-Mendel reducer supplying the indicators.
TrainResult fit_it2felm_km(const Dataset& data, const TrainConfig& cfg);

/// Type-1 fuzzy ELM: zero FOU, normalized firings, single solve.
TrainResult fit_t1felm(const Dataset& data, const TrainConfig& cfg);

TrainResult fit_elm(const Dataset& data, const TrainConfig& cfg);

TrainResult train(Trainer trainer, const Dataset& data, const TrainConfig& cfg);

/// counts[actual][predicted], class 1 = corner.
struct ConfusionMatrix
{
    std::array<std::array<std::uint64_t, 2>, 2> counts{};

    std::uint64_t tp() const { return counts[1][1]; }
    std::uint64_t tn() const { return counts[0][0]; }
    std::uint64_t fp() const { return counts[0][1]; }
    std::uint64_t fn() const { return counts[1][0]; }
    std::uint64_t total() const { return tp() + tn() + fp() + fn(); }
    double accuracy() const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels);
ConfusionMatrix confusion_matrix(const Eigen::Ref<const Vector>& scores, const Eigen::Ref<const Vector>& targets,
                                 double threshold = default_class_threshold);

struct FoldReport
{
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double train_seconds = 0.0;
    ConfusionMatrix train_confusion;
    ConfusionMatrix test_confusion;
};

struct EvalReport
{
    std::string trainer;
    std::vector<FoldReport> folds;
    double mean_train_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
    double std_test_accuracy = 0.0;
    double mean_train_seconds = 0.0;
    // Test confusion summed over folds; every sample is tested exactly once.
    ConfusionMatrix test_confusion;
};

/// Fold index per sample: stratified by class and independent of row order.
std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t folds, std::uint64_t seed);

EvalReport cross_validate(const Dataset& data, const TrainConfig& cfg, Trainer trainer, std::size_t folds = 5);

} // namespace fit2
