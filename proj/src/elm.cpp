#include "fit2/felm_training.hpp"
#include "fit2/rng.hpp"

#include <chrono>

namespace fit2
{

Matrix elm_hidden_layer(const ELMModel& model, const Eigen::Ref<const Matrix>& X)
{
    require_same_size(model.input_weights.cols(), X.cols(), "elm inputs");
    Matrix a = X * model.input_weights.transpose();
    a.rowwise() += model.biases.transpose();
    return (1.0 + (-a.array()).exp()).inverse().matrix();
}

double predict(const ELMModel& model, const Eigen::Ref<const Vector>& x)
{
    require_same_size(model.input_weights.cols(), x.size(), "elm predict");
    const Vector a = model.input_weights * x + model.biases;
    const Vector g = (1.0 + (-a.array()).exp()).inverse().matrix();
    return g.dot(model.output_weights);
}

TrainResult fit_elm(const Dataset& data, const TrainConfig& cfg)
{
    data.validate();
    cfg.validate();
    const std::size_t hidden = cfg.elm_hidden > 0 ? cfg.elm_hidden : cfg.rules * data.features();
    const auto L = static_cast<Eigen::Index>(hidden);
    const auto N = static_cast<Eigen::Index>(data.features());

    ELMModel model;
    Rng rng(cfg.seed, "elm-hidden");
    model.input_weights.resize(L, N);
    model.biases.resize(L);
    for (Eigen::Index i = 0; i < L; ++i) {
        for (Eigen::Index k = 0; k < N; ++k)
            model.input_weights(i, k) = rng.uniform(-1.0, 1.0);
        model.biases(i) = rng.uniform(-1.0, 1.0);
    }

    TrainResult result;
    const auto start = std::chrono::steady_clock::now();
    const Matrix H = elm_hidden_layer(model, data.X);
    model.output_weights = pseudoinverse_solve(H, data.T, cfg.ridge);
    result.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.passes = 1;
    const Vector e = H * model.output_weights - data.T;
    result.train_residual = std::sqrt(e.squaredNorm() / static_cast<double>(data.samples()));
    result.model = std::move(model);
    return result;
}

double predict(const Classifier& model, const Eigen::Ref<const Vector>& x)
{
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

Vector predict_rows(const Classifier& model, const Eigen::Ref<const Matrix>& X)
{
    if (const auto* elm = std::get_if<ELMModel>(&model))
        return elm_hidden_layer(*elm, X) * elm->output_weights;
    return predict_rows(std::get<TSKModel>(model), X);
}

std::size_t input_count(const Classifier& model)
{
    if (const auto* elm = std::get_if<ELMModel>(&model))
        return static_cast<std::size_t>(elm->input_weights.cols());
    return std::get<TSKModel>(model).inputs();
}

} // namespace fit2
