#include "fit2/felm_training.hpp"
#include "fit2/rng.hpp"

#include <chrono>
#include <cmath>

namespace fit2
{

void Dataset::validate() const
{
    if (X.rows() < 2 || X.cols() < 1)
        throw ValidationError("dataset: need at least 2 samples and 1 feature");
    require_same_size(X.rows(), T.size(), "dataset targets");
    if (!X.allFinite() || !T.allFinite())
        throw ValidationError("dataset: non-finite entry");
    bool has0 = false;
    bool has1 = false;
    for (Eigen::Index p = 0; p < T.size(); ++p) {
        if (T(p) == 0.0)
            has0 = true;
        else if (T(p) == 1.0)
            has1 = true;
        else
            throw ValidationError("dataset: target at row " + std::to_string(p) + " is not 0 or 1");
    }
    if (!has0 || !has1)
        throw ValidationError("dataset: both classes must be present");
    if (!feature_names.empty())
        require_same_size(X.cols(), static_cast<Eigen::Index>(feature_names.size()), "dataset feature names");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.T.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
        out.T(static_cast<Eigen::Index>(i)) = T(static_cast<Eigen::Index>(rows[i]));
    }
    out.feature_names = feature_names;
    return out;
}

std::vector<FeatureRange> feature_ranges(const Dataset& data)
{
    std::vector<FeatureRange> out;
    for (Eigen::Index k = 0; k < data.X.cols(); ++k)
        out.push_back({data.X.col(k).minCoeff(), data.X.col(k).maxCoeff()});
    return out;
}

std::string to_string(Trainer t)
{
    switch (t) {
    case Trainer::fit2felm:
        return "fit2felm";
    case Trainer::it2felm_km:
        return "it2felm-km";
    case Trainer::t1felm:
        return "t1felm";
    case Trainer::elm:
        return "elm";
    }
    return "unknown";
}

Trainer trainer_from_string(const std::string& name)
{
    for (Trainer t : {Trainer::fit2felm, Trainer::it2felm_km, Trainer::t1felm, Trainer::elm})
        if (to_string(t) == name)
            return t;
    throw ValidationError("unknown trainer '" + name + "' (expected fit2felm, it2felm-km, t1felm or elm)");
}

void TrainConfig::validate() const
{
    if (rules < 1)
        throw ValidationError("train config: rules must be >= 1");
    if (refine_passes < 1)
        throw ValidationError("train config: refine passes must be >= 1");
    if (!(ridge >= 0.0) || !std::isfinite(ridge))
        throw ValidationError("train config: ridge must be finite and >= 0");
}

Vector pseudoinverse_solve(const Eigen::Ref<const Matrix>& H, const Eigen::Ref<const Vector>& T, double ridge)
{
    require_same_size(H.rows(), T.size(), "pseudoinverse_solve");
    if (!H.allFinite() || !T.allFinite() || !std::isfinite(ridge))
        throw ValidationError("pseudoinverse_solve: non-finite input");
    if (ridge < 0.0)
        throw ValidationError("pseudoinverse_solve: ridge must be >= 0");
    if (ridge > 0.0) {
        Matrix normal = H.transpose() * H;
        normal.diagonal().array() += ridge;
        return normal.ldlt().solve(H.transpose() * T);
    }
    const double rtol =
        std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(H.rows(), H.cols()));
    const Eigen::Index n = H.cols();
    if (H.rows() > 2 * n) {
        // Tall H = Q R with orthonormal Q, so pinv(H) = pinv(R) Q^T and R keeps the singular values of H.
        const Eigen::HouseholderQR<Matrix> qr(H);
        const Vector c = (qr.householderQ().adjoint() * T).head(n);
        const Matrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Matrix> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(rtol);
        return svd.solve(c);
    }
    Eigen::BDCSVD<Matrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rtol);
    return svd.solve(T);
}

namespace
{

using Clock = std::chrono::steady_clock;

std::vector<FeatureRange> training_ranges(const Dataset& data, std::vector<std::string>& warnings)
{
    auto ranges = feature_ranges(data);
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        if (ranges[k].max > ranges[k].min)
            continue;
        warnings.push_back("feature " + std::to_string(k) + " is constant; membership range widened by +/-0.5");
        ranges[k].min -= 0.5;
        ranges[k].max += 0.5;
    }
    return ranges;
}

Matrix unflatten(const Vector& q, std::size_t rules, Eigen::Index cols)
{
    Matrix out(static_cast<Eigen::Index>(rules), cols);
    for (Eigen::Index j = 0; j < out.rows(); ++j)
        out.row(j) = q.segment(j * cols, cols).transpose();
    return out;
}

// Everything the refinement loop needs per training sample.
class FuzzyDesign
{
public:
    FuzzyDesign(const Dataset& data, const AntecedentGrid& grid, bool bias)
        : data_(data), rules_(grid.rules()), bias_(bias),
          cols_(static_cast<Eigen::Index>(grid.inputs() + (bias ? 1 : 0))),
          firings_(data.samples() * grid.rules())
    {
        for (std::size_t p = 0; p < data.samples(); ++p) {
            const auto f = rule_firings(grid, data.X.row(static_cast<Eigen::Index>(p)).transpose());
            double total = 0.0;
            for (const auto& fi : f)
                total += fi.upper;
            if (!(total > 0.0))
                throw NoRuleFiresError("training sample " + std::to_string(p) + ": no rule fires");
            std::copy(f.begin(), f.end(), firings_.begin() + static_cast<std::ptrdiff_t>(p * rules_));
        }
    }

    std::span<const FiringInterval<double>> firings(std::size_t p) const
    {
        return {firings_.data() + p * rules_, rules_};
    }

    Eigen::Index cols() const { return cols_; }

    // H for the given indicators (empty spans mean all ones).
    Matrix design(std::span<const std::uint8_t> z_l, std::span<const std::uint8_t> z_r) const
    {
        const auto P = static_cast<Eigen::Index>(data_.samples());
        Matrix H(P, static_cast<Eigen::Index>(rules_) * cols_);
        const std::vector<std::uint8_t> ones(rules_, 1);
        for (Eigen::Index p = 0; p < P; ++p) {
            const auto off = static_cast<std::size_t>(p) * rules_;
            const auto zl = z_l.empty() ? std::span<const std::uint8_t>(ones) : z_l.subspan(off, rules_);
            const auto zr = z_r.empty() ? std::span<const std::uint8_t>(ones) : z_r.subspan(off, rules_);
            const Vector phi = phi_coefficients(firings(static_cast<std::size_t>(p)), zl, zr);
            fill_h_row(data_.X.row(p).transpose(), phi, bias_, H.row(p));
        }
        return H;
    }

    struct Inference
    {
        std::vector<std::uint8_t> z_l;
        std::vector<std::uint8_t> z_r;
        double residual = 0.0;
    };

    // Runs the model given by consequents q over the training set.
    Inference infer(const Matrix& q, Reducer reducer) const
    {
        const auto n = static_cast<Eigen::Index>(data_.features());
        Inference out;
        out.z_l.resize(firings_.size());
        out.z_r.resize(firings_.size());
        TypeReducedSet tr;
        Vector w(static_cast<Eigen::Index>(rules_));
        double sq = 0.0;
        for (std::size_t p = 0; p < data_.samples(); ++p) {
            const auto row = data_.X.row(static_cast<Eigen::Index>(p)).transpose();
            w.noalias() = q.leftCols(n) * row;
            if (bias_)
                w += q.col(n);
            const std::span<const double> ws(w.data(), rules_);
            if (reducer == Reducer::sc)
                sc_reduce_into<double>(firings(p), ws, tr);
            else
                km_reduce_into<double>(firings(p), ws, tr);
            std::copy(tr.z_l.begin(), tr.z_l.end(), out.z_l.begin() + static_cast<std::ptrdiff_t>(p * rules_));
            std::copy(tr.z_r.begin(), tr.z_r.end(), out.z_r.begin() + static_cast<std::ptrdiff_t>(p * rules_));
            const double e = defuzz(tr) - data_.T(static_cast<Eigen::Index>(p));
            sq += e * e;
        }
        out.residual = std::sqrt(sq / static_cast<double>(data_.samples()));
        return out;
    }

private:
    const Dataset& data_;
    std::size_t rules_;
    bool bias_;
    Eigen::Index cols_;
    std::vector<FiringInterval<double>> firings_;
};

TrainResult fit_interval_type2(const Dataset& data, const TrainConfig& cfg, Reducer reducer)
{
    data.validate();
    cfg.validate();
    TrainResult result;
    const auto ranges = training_ranges(data, result.warnings);
    AntecedentGrid grid =
        random_init_antecedents(cfg.rules, ranges, stream_seed(cfg.seed, "antecedents"), cfg.init);

    const auto start = Clock::now();
    const FuzzyDesign design(data, grid, cfg.bias);

    Matrix q = unflatten(pseudoinverse_solve(design.design({}, {}), data.T, cfg.ridge), cfg.rules, design.cols());
    result.passes = 1;
    auto current = design.infer(q, reducer);
    std::vector<std::uint8_t> used_l;
    std::vector<std::uint8_t> used_r;

    for (int pass = 1; pass < cfg.refine_passes; ++pass) {
        if (current.z_l == used_l && current.z_r == used_r)
            break;
        const Matrix h = design.design(current.z_l, current.z_r);
        Matrix candidate = unflatten(pseudoinverse_solve(h, data.T, cfg.ridge), cfg.rules, design.cols());
        auto next = design.infer(candidate, reducer);
        ++result.passes;
        if (next.residual > current.residual) {
            result.rolled_back = true;
            break;
        }
        used_l = std::move(current.z_l);
        used_r = std::move(current.z_r);
        q = std::move(candidate);
        current = std::move(next);
    }
    result.train_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.train_residual = current.residual;
    result.model = TSKModel(std::move(grid), std::move(q), cfg.bias);
    return result;
}

} // namespace

TrainResult fit_fit2felm(const Dataset& data, const TrainConfig& cfg)
{
    return fit_interval_type2(data, cfg, Reducer::sc);
}

TrainResult fit_it2felm_km(const Dataset& data, const TrainConfig& cfg)
{
    return fit_interval_type2(data, cfg, Reducer::km);
}

TrainResult fit_t1felm(const Dataset& data, const TrainConfig& cfg)
{
    data.validate();
    cfg.validate();
    TrainResult result;
    const auto ranges = training_ranges(data, result.warnings);
    AntecedentInit init = cfg.init;
    init.fou_min = 0.0;
    init.fou_max = 0.0;
    AntecedentGrid grid = random_init_antecedents(cfg.rules, ranges, stream_seed(cfg.seed, "antecedents"), init);

    const auto start = Clock::now();
    const FuzzyDesign design(data, grid, cfg.bias);
    // Crisp firings: phi = 2 f / sum f for any indicators.
    Matrix q = unflatten(pseudoinverse_solve(design.design({}, {}), data.T, cfg.ridge), cfg.rules, design.cols());
    result.train_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.passes = 1;
    result.train_residual = design.infer(q, Reducer::sc).residual;
    result.model = TSKModel(std::move(grid), std::move(q), cfg.bias);
    return result;
}

TrainResult train(Trainer trainer, const Dataset& data, const TrainConfig& cfg)
{
    switch (trainer) {
    case Trainer::fit2felm:
        return fit_fit2felm(data, cfg);
    case Trainer::it2felm_km:
        return fit_it2felm_km(data, cfg);
    case Trainer::t1felm:
        return fit_t1felm(data, cfg);
    case Trainer::elm:
        return fit_elm(data, cfg);
    }
    throw ValidationError("train: unknown trainer");
}

} // namespace fit2
