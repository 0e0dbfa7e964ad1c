#include "fit2/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fit2
{

namespace
{

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    for (auto& c : out) {
        const auto b = c.find_first_not_of(" \t\r");
        const auto e = c.find_last_not_of(" \t\r");
        c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
    }
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no, std::size_t col)
{
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw ValidationError("dataset line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                              ": not a finite number: '" + cell + "'");
    return v;
}

} // namespace

void write_dataset_csv(std::ostream& out, const Dataset& data)
{
    const auto names = data.feature_names.empty() ? sonar_feature_names : data.feature_names;
    require_same_size(data.X.cols(), static_cast<Eigen::Index>(names.size()), "dataset header");
    for (const auto& n : names)
        out << n << ',';
    out << "label\n";
    for (Eigen::Index p = 0; p < data.X.rows(); ++p) {
        for (Eigen::Index k = 0; k < data.X.cols(); ++k)
            out << to_decimal(data.X(p, k)) << ',';
        out << (data.T(p) != 0.0 ? 1 : 0) << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    write_dataset_csv(out, data);
    if (!out)
        throw Error("write failed: '" + path.string() + "'");
}

Dataset read_dataset_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("dataset line 1: missing header");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header.back() != "label")
        throw ValidationError("dataset line 1: header must list feature columns followed by 'label'");
    const std::size_t n = header.size() - 1;

    std::vector<double> values;
    std::vector<double> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != n + 1)
            throw ValidationError("dataset line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(n + 1) + " fields, got " + std::to_string(cells.size()));
        for (std::size_t k = 0; k < n; ++k)
            values.push_back(parse_number(cells[k], line_no, k));
        if (cells[n] != "0" && cells[n] != "1")
            throw ValidationError("dataset line " + std::to_string(line_no) + ": label must be 0 or 1, got '" +
                                  cells[n] + "'");
        labels.push_back(cells[n] == "1" ? 1.0 : 0.0);
    }

    Dataset data;
    const auto rows = static_cast<Eigen::Index>(labels.size());
    data.X = Eigen::Map<const RowMatrix>(values.data(), rows, static_cast<Eigen::Index>(n));
    data.T = Eigen::Map<const Vector>(labels.data(), rows);
    data.feature_names.assign(header.begin(), header.end() - 1);
    return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open dataset '" + path.string() + "'");
    return read_dataset_csv(in);
}

} // namespace fit2
