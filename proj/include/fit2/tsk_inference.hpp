#pragma once

#include "fit2/fuzzy_core.hpp"
#include "fit2/type_reduction.hpp"

#include <cstdint>
#include <vector>

namespace fit2
{

enum class Reducer
{
    sc,
    km
};

/// TSK rule base with IT2 Gaussian antecedents and linear consequents
/// w_j = q_j . x (+ q_j0 when the bias column is enabled, stored last).
class TSKModel
{
public:
    TSKModel() = default;
    TSKModel(AntecedentGrid antecedents, Matrix consequents, bool bias = false);

    const AntecedentGrid& antecedents() const { return antecedents_; }
    const Matrix& consequents() const { return consequents_; }
    bool bias() const { return bias_; }
    std::size_t rules() const { return antecedents_.rules(); }
    std::size_t inputs() const { return antecedents_.inputs(); }

    /// Consequent coefficients flattened rule by rule, matching the H-row layout.
    Vector flat_consequents() const;

    bool operator==(const TSKModel& other) const;

private:
    AntecedentGrid antecedents_;
    Matrix consequents_;
    bool bias_{false};
};

Vector consequent_values(const TSKModel& model, const Eigen::Ref<const Vector>& x);

std::vector<FiringInterval<double>> model_firings(const TSKModel& model, const Eigen::Ref<const Vector>& x);

/// Full type-reduced output for one input.
TypeReducedSet reduce(const TSKModel& model, const Eigen::Ref<const Vector>& x, Reducer reducer = Reducer::sc);

double predict(const TSKModel& model, const Eigen::Ref<const Vector>& x, Reducer reducer = Reducer::sc);

Vector predict_rows(const TSKModel& model, const Eigen::Ref<const Matrix>& X, Reducer reducer = Reducer::sc);

/// Per-rule weights of y = 1/2 (y_l + y_r) as a linear function of the
/// consequents, for the given switch indicators. They sum to 2.
Vector phi_coefficients(std::span<const FiringInterval<double>> firings, std::span<const std::uint8_t> z_l,
                        std::span<const std::uint8_t> z_r);

/// Row 1/2 [phi_1 x_1 .. phi_1 x_N, .., phi_M x_1 .. phi_M x_N]; with bias each
/// block gets a trailing phi_j.
Eigen::RowVectorXd build_h_row(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& phi,
                               bool bias = false);

/// Writes the same row into an existing H row of the right length.
void fill_h_row(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& phi, bool bias,
                Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row);

inline constexpr double default_class_threshold = 0.5;

enum class ContourClass : int
{
    wall = 0,
    corner = 1
};

struct Classification
{
    ContourClass label;
    double score;
};

/// Score >= threshold is a corner.
inline ContourClass classify_score(double score, double threshold = default_class_threshold)
{
    return score >= threshold ? ContourClass::corner : ContourClass::wall;
}

Classification classify(const TSKModel& model, const Eigen::Ref<const Vector>& x,
                        double threshold = default_class_threshold);

/// Moving average over the most recent scores.
class ClassScoreWindow
{
public:
    explicit ClassScoreWindow(std::size_t length = 4);

    double push(double score);
    double mean() const;
    std::size_t size() const { return count_; }
    std::size_t length() const { return buffer_.size(); }
    void clear();

private:
    std::vector<double> buffer_;
    std::size_t head_{0};
    std::size_t count_{0};
};

inline double smooth_score(ClassScoreWindow& window, double score)
{
    return window.push(score);
}

} // namespace fit2
