#include "spca/matrix_io.h"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "spca/errors.h"

namespace spca
{

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true)
    {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos)
        {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell)
{
    if (cell.empty())
    {
        return std::nullopt;
    }
    if (cell.front() == '+')
    {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
    {
        return std::nullopt;
    }
    return value;
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values) : values_(std::move(values))
{
    if (values_.rows() < 1 || values_.cols() < 2)
    {
        throw DimensionError(fmt::format(
            "data matrix needs p >= 1 and n >= 2, got {}x{}", values_.rows(), values_.cols()));
    }
    if (!values_.allFinite())
    {
        throw DomainError("data matrix contains non-finite entries");
    }
}

DataMatrix DataMatrix::without_column(Eigen::Index j) const
{
    if (j < 0 || j >= n())
    {
        throw DimensionError(fmt::format("column {} out of range for n={}", j, n()));
    }
    Eigen::MatrixXd out(p(), n() - 1);
    out.leftCols(j) = values_.leftCols(j);
    out.rightCols(n() - 1 - j) = values_.rightCols(n() - 1 - j);
    return DataMatrix(std::move(out));
}

std::string_view to_string(StandardizeMode mode)
{
    switch (mode)
    {
        case StandardizeMode::none:
            return "none";
        case StandardizeMode::center:
            return "center";
        case StandardizeMode::center_scale:
            return "center_scale";
    }
    return "none";
}

StandardizeMode parse_standardize_mode(std::string_view text)
{
    if (text == "none")
    {
        return StandardizeMode::none;
    }
    if (text == "center")
    {
        return StandardizeMode::center;
    }
    if (text == "center_scale" || text == "center-scale")
    {
        return StandardizeMode::center_scale;
    }
    throw FormatError(fmt::format("unknown standardization mode '{}'", text));
}

Preprocessing Preprocessing::identity(Eigen::Index p)
{
    return {StandardizeMode::none, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p)};
}

DataMatrix read_matrix(const std::filesystem::path& path, Orientation orientation, HeaderMode header)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ParseError(fmt::format("cannot open '{}'", path.string()), 0, 0);
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content = true;
    while (std::getline(in, line))
    {
        ++line_no;
        if (trim(line).empty())
        {
            continue;
        }
        auto cells = split_cells(line);
        if (first_content)
        {
            first_content = false;
            bool is_header = header == HeaderMode::present;
            if (header == HeaderMode::detect)
            {
                is_header = true;
                for (auto cell : cells)
                {
                    if (parse_number(cell))
                    {
                        is_header = false;
                        break;
                    }
                }
            }
            if (is_header)
            {
                width = cells.size();
                continue;
            }
        }
        if (width == 0)
        {
            width = cells.size();
        }
        if (cells.size() != width)
        {
            throw ParseError(fmt::format("{}:{}: ragged row with {} cells, expected {}",
                                         path.string(), line_no, cells.size(), width),
                             line_no, 0);
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
        {
            auto value = parse_number(cells[c]);
            if (!value || !std::isfinite(*value))
            {
                throw ParseError(fmt::format("{}:{}: cell {} is not a finite number: '{}'",
                                             path.string(), line_no, c + 1, cells[c]),
                                 line_no, c + 1);
            }
            row.push_back(*value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty())
    {
        throw EmptyInput(fmt::format("'{}' contains no data rows", path.string()));
    }

    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(width);
    Eigen::MatrixXd values(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r)
    {
        for (Eigen::Index c = 0; c < n_cols; ++c)
        {
            values(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    if (orientation == Orientation::rows_are_samples)
    {
        values.transposeInPlace();
    }
    return DataMatrix(std::move(values));
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& values, Orientation orientation)
{
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError(fmt::format("cannot write '{}'", path.string()));
    }
    const Eigen::MatrixXd& m = values;
    const bool transpose = orientation == Orientation::rows_are_samples;
    const Eigen::Index rows = transpose ? m.cols() : m.rows();
    const Eigen::Index cols = transpose ? m.rows() : m.cols();
    std::string buf;
    for (Eigen::Index r = 0; r < rows; ++r)
    {
        buf.clear();
        for (Eigen::Index c = 0; c < cols; ++c)
        {
            if (c > 0)
            {
                buf.push_back(',');
            }
            fmt::format_to(std::back_inserter(buf), "{:.17g}", transpose ? m(c, r) : m(r, c));
        }
        buf.push_back('\n');
        out << buf;
    }
}

std::pair<DataMatrix, Preprocessing> standardize(const DataMatrix& x, StandardizeMode mode)
{
    const Eigen::Index p = x.p();
    const auto n = static_cast<double>(x.n());
    Preprocessing prep = Preprocessing::identity(p);
    prep.mode = mode;
    if (mode == StandardizeMode::none)
    {
        return {x, prep};
    }

    prep.means = x.values().rowwise().sum() / n;
    Eigen::MatrixXd centered = x.values().colwise() - prep.means;
    if (mode == StandardizeMode::center_scale)
    {
        for (Eigen::Index i = 0; i < p; ++i)
        {
            const double sd = std::sqrt(centered.row(i).squaredNorm() / n);
            if (!(sd > 0.0))
            {
                throw DegenerateVariable(fmt::format("variable in row {} has zero variance", i + 1), static_cast<std::size_t>(i));
            }
            prep.scales(i) = sd;
        }
        centered.array().colwise() /= prep.scales.array();
    }
    return {DataMatrix(std::move(centered)), prep};
}

Eigen::VectorXd apply_preprocessing(const Eigen::Ref<const Eigen::VectorXd>& x_new, const Preprocessing& prep)
{
    if (x_new.size() != prep.p())
    {
        throw DimensionError(fmt::format("sample has {} variables, model expects {}", x_new.size(), prep.p()));
    }
    return ((x_new - prep.means).array() / prep.scales.array()).matrix();
}

Eigen::MatrixXd apply_preprocessing_columns(const Eigen::Ref<const Eigen::MatrixXd>& x_new, const Preprocessing& prep)
{
    if (x_new.rows() != prep.p())
    {
        throw DimensionError(fmt::format("matrix has {} rows, model expects {}", x_new.rows(), prep.p()));
    }
    Eigen::MatrixXd out = x_new.colwise() - prep.means;
    out.array().colwise() /= prep.scales.array();
    return out;
}

}  // namespace spca
