#include "fit2/io.hpp"

#include <charconv>
#include <fstream>

namespace fit2
{

using nlohmann::json;

std::string to_hex(double v)
{
    if (!std::isfinite(v))
        throw ValidationError("cannot serialize non-finite value");
    char buf[64];
    const bool neg = std::signbit(v);
    auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(v), std::chars_format::hex);
    return std::string(neg ? "-0x" : "0x") + std::string(buf, res.ptr);
}

double from_hex(std::string_view s)
{
    const bool neg = !s.empty() && s.front() == '-';
    if (neg)
        s.remove_prefix(1);
    if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
        throw ValidationError("expected hex float, got '" + std::string(s) + "'");
    s.remove_prefix(2);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError("malformed hex float '" + std::string(s) + "'");
    return neg ? -v : v;
}

std::string to_decimal(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void check_format_version(const json& j, std::string_view what, int major)
{
    const std::string version = j.at("version").get<std::string>();
    int got = -1;
    const auto dot = version.find('.');
    const auto head = version.substr(0, dot);
    const auto res = std::from_chars(head.data(), head.data() + head.size(), got);
    if (res.ec != std::errc() || res.ptr != head.data() + head.size())
        throw ValidationError(std::string(what) + ": malformed version '" + version + "'");
    if (got != major)
        throw ValidationError(std::string(what) + ": unsupported major version " + std::to_string(got) +
                              " (this build reads " + std::to_string(major) + ".x)");
}

namespace
{

json hex_matrix(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(to_hex(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json hex_vector(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(to_hex(v(i)));
    return out;
}

Matrix read_matrix(const json& rows, Eigen::Index r, Eigen::Index c, const char* what)
{
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r)
        throw ValidationError(std::string("model file: '") + what + "' has the wrong number of rows");
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw ValidationError(std::string("model file: '") + what + "' row " + std::to_string(i) +
                                  " has the wrong length");
        for (Eigen::Index k = 0; k < c; ++k)
            m(i, k) = from_hex(row[static_cast<std::size_t>(k)].get<std::string>());
    }
    return m;
}

Vector read_vector(const json& a, Eigen::Index n, const char* what)
{
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n)
        throw ValidationError(std::string("model file: '") + what + "' has the wrong length");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = from_hex(a[static_cast<std::size_t>(i)].get<std::string>());
    return v;
}

json header(const char* kind)
{
    return {{"format", model_format_name},
            {"version", std::to_string(model_format_major) + "." + std::to_string(model_format_minor)},
            {"kind", kind}};
}

json tsk_to_json(const TSKModel& m)
{
    json j = header("tsk-it2");
    j["rules"] = m.rules();
    j["inputs"] = m.inputs();
    j["bias"] = m.bias();
    json ante = json::array();
    for (std::size_t r = 0; r < m.rules(); ++r) {
        json row = json::array();
        for (const auto& mf : m.antecedents().row(r))
            row.push_back({{"mean", to_hex(mf.mean())},
                           {"sigma_lo", to_hex(mf.sigma_lo())},
                           {"sigma_hi", to_hex(mf.sigma_hi())}});
        ante.push_back(std::move(row));
    }
    j["antecedents"] = std::move(ante);
    j["consequents"] = hex_matrix(m.consequents());
    return j;
}

json elm_to_json(const ELMModel& m)
{
    json j = header("elm");
    j["hidden"] = m.input_weights.rows();
    j["inputs"] = m.input_weights.cols();
    j["input_weights"] = hex_matrix(m.input_weights);
    j["biases"] = hex_vector(m.biases);
    j["output_weights"] = hex_vector(m.output_weights);
    return j;
}

TSKModel tsk_from_json(const json& j)
{
    const auto rules = j.at("rules").get<std::size_t>();
    const auto inputs = j.at("inputs").get<std::size_t>();
    const bool bias = j.at("bias").get<bool>();
    const json& ante = j.at("antecedents");
    if (!ante.is_array() || ante.size() != rules)
        throw ValidationError("model file: antecedent grid does not have 'rules' rows");
    std::vector<IT2GaussianMF<double>> mfs;
    for (const auto& row : ante) {
        if (!row.is_array() || row.size() != inputs)
            throw ValidationError("model file: antecedent row does not have 'inputs' entries");
        for (const auto& mf : row)
            mfs.emplace_back(from_hex(mf.at("mean").get<std::string>()),
                             from_hex(mf.at("sigma_lo").get<std::string>()),
                             from_hex(mf.at("sigma_hi").get<std::string>()));
    }
    Matrix q = read_matrix(j.at("consequents"), static_cast<Eigen::Index>(rules),
                           static_cast<Eigen::Index>(inputs + (bias ? 1 : 0)), "consequents");
    return TSKModel(AntecedentGrid(rules, inputs, std::move(mfs)), std::move(q), bias);
}

ELMModel elm_from_json(const json& j)
{
    const auto hidden = j.at("hidden").get<Eigen::Index>();
    const auto inputs = j.at("inputs").get<Eigen::Index>();
    ELMModel m;
    m.input_weights = read_matrix(j.at("input_weights"), hidden, inputs, "input_weights");
    m.biases = read_vector(j.at("biases"), hidden, "biases");
    m.output_weights = read_vector(j.at("output_weights"), hidden, "output_weights");
    return m;
}

} // namespace

json model_to_json(const Classifier& model)
{
    if (const auto* tsk = std::get_if<TSKModel>(&model))
        return tsk_to_json(*tsk);
    return elm_to_json(std::get<ELMModel>(model));
}

Classifier model_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != model_format_name)
            throw ValidationError("model file: format is not '" + std::string(model_format_name) + "'");
        check_format_version(j, "model file", model_format_major);
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "tsk-it2")
            return tsk_from_json(j);
        if (kind == "elm")
            return elm_from_json(j);
        throw ValidationError("model file: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const Classifier& model)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    out << model_to_json(model).dump(2) << '\n';
    if (!out)
        throw Error("write failed: '" + path.string() + "'");
}

Classifier load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open model file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("model file '" + path.string() + "': " + e.what());
    }
    return model_from_json(j);
}

} // namespace fit2
