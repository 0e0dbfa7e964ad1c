#include "fit2/tsk_inference.hpp"

#include <cmath>

namespace fit2
{

TSKModel::TSKModel(AntecedentGrid antecedents, Matrix consequents, bool bias)
    : antecedents_(std::move(antecedents)), consequents_(std::move(consequents)), bias_(bias)
{
    const auto cols = static_cast<Eigen::Index>(antecedents_.inputs() + (bias_ ? 1 : 0));
    if (consequents_.rows() != static_cast<Eigen::Index>(antecedents_.rules()) || consequents_.cols() != cols)
        throw DimensionError("TSKModel: consequent matrix must be rules x (inputs + bias)");
    if (!consequents_.allFinite())
        throw ValidationError("TSKModel: non-finite consequent coefficient");
}

Vector TSKModel::flat_consequents() const
{
    const RowMatrix rm = consequents_;
    return Eigen::Map<const Vector>(rm.data(), rm.size());
}

bool TSKModel::operator==(const TSKModel& other) const
{
    return bias_ == other.bias_ && antecedents_ == other.antecedents_ &&
           consequents_.rows() == other.consequents_.rows() && consequents_.cols() == other.consequents_.cols() &&
           consequents_ == other.consequents_;
}

Vector consequent_values(const TSKModel& model, const Eigen::Ref<const Vector>& x)
{
    const auto n = static_cast<Eigen::Index>(model.inputs());
    require_same_size(n, x.size(), "consequent_values");
    const Matrix& q = model.consequents();
    Vector w = q.leftCols(n) * x;
    if (model.bias())
        w += q.col(n);
    return w;
}

std::vector<FiringInterval<double>> model_firings(const TSKModel& model, const Eigen::Ref<const Vector>& x)
{
    require_same_size(static_cast<Eigen::Index>(model.inputs()), x.size(), "model_firings");
    return rule_firings(model.antecedents(), x);
}

TypeReducedSet reduce(const TSKModel& model, const Eigen::Ref<const Vector>& x, Reducer reducer)
{
    const auto f = model_firings(model, x);
    const Vector w = consequent_values(model, x);
    const std::span<const double> ws(w.data(), static_cast<std::size_t>(w.size()));
    return reducer == Reducer::sc ? sc_reduce<double>(f, ws) : km_reduce<double>(f, ws);
}

double predict(const TSKModel& model, const Eigen::Ref<const Vector>& x, Reducer reducer)
{
    return defuzz(reduce(model, x, reducer));
}

Vector predict_rows(const TSKModel& model, const Eigen::Ref<const Matrix>& X, Reducer reducer)
{
    Vector out(X.rows());
    for (Eigen::Index p = 0; p < X.rows(); ++p)
        out(p) = predict(model, X.row(p).transpose(), reducer);
    return out;
}

Vector phi_coefficients(std::span<const FiringInterval<double>> firings, std::span<const std::uint8_t> z_l,
                        std::span<const std::uint8_t> z_r)
{
    const std::size_t m = firings.size();
    require_same_size(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(z_l.size()), "phi_coefficients z_l");
    require_same_size(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(z_r.size()), "phi_coefficients z_r");

    Vector num_l(static_cast<Eigen::Index>(m));
    Vector num_r(static_cast<Eigen::Index>(m));
    double den_l = 0.0;
    double den_r = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double dw = firings[j].upper - firings[j].lower;
        const auto i = static_cast<Eigen::Index>(j);
        num_l(i) = firings[j].upper - (z_l[j] ? 0.0 : dw);
        num_r(i) = firings[j].upper - (z_r[j] ? 0.0 : dw);
        den_l += num_l(i);
        den_r += num_r(i);
    }
    if (!(den_l > 0.0) || !(den_r > 0.0))
        throw NoRuleFiresError("phi_coefficients: zero denominator (no rule fires under these indicators)");
    return num_l / den_l + num_r / den_r;
}

void fill_h_row(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& phi, bool bias,
                Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row)
{
    const Eigen::Index n = x.size();
    const Eigen::Index block = n + (bias ? 1 : 0);
    require_same_size(phi.size() * block, row.size(), "build_h_row");
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        const double half_phi = 0.5 * phi(j);
        row.segment(j * block, n) = half_phi * x.transpose();
        if (bias)
            row(j * block + n) = half_phi;
    }
}

Eigen::RowVectorXd build_h_row(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& phi, bool bias)
{
    Eigen::RowVectorXd row(phi.size() * (x.size() + (bias ? 1 : 0)));
    fill_h_row(x, phi, bias, row);
    return row;
}

Classification classify(const TSKModel& model, const Eigen::Ref<const Vector>& x, double threshold)
{
    const double score = predict(model, x);
    return {classify_score(score, threshold), score};
}

ClassScoreWindow::ClassScoreWindow(std::size_t length) : buffer_(length, 0.0)
{
    if (length == 0)
        throw ValidationError("ClassScoreWindow: window length must be at least 1");
}

double ClassScoreWindow::push(double score)
{
    if (!std::isfinite(score))
        throw ValidationError("ClassScoreWindow: non-finite score");
    buffer_[head_] = score;
    head_ = (head_ + 1) % buffer_.size();
    count_ = std::min(count_ + 1, buffer_.size());
    return mean();
}

double ClassScoreWindow::mean() const
{
    if (count_ == 0)
        return 0.0;
    const std::size_t n = buffer_.size();
    const std::size_t oldest = (head_ + n - count_) % n;
    double s = 0.0;
    for (std::size_t i = 0; i < count_; ++i)
        s += buffer_[(oldest + i) % n];
    return s / static_cast<double>(count_);
}

void ClassScoreWindow::clear()
{
    head_ = 0;
    count_ = 0;
}

} // namespace fit2
