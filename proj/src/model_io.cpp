#include "spca/model_io.h"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spca/errors.h"

namespace spca
{

namespace
{

struct Section
{
    std::string name;
    std::vector<std::string> lines;
};

std::string real(double x)
{
    return fmt::format("{:.17g}", x);
}

double parse_real(std::string_view token, std::string_view where)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
    {
        throw FormatError(fmt::format("model file: bad number '{}' in {}", token, where));
    }
    return value;
}

long long parse_int(std::string_view token, std::string_view where)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
    {
        throw FormatError(fmt::format("model file: bad integer '{}' in {}", token, where));
    }
    return value;
}

std::vector<std::string> tokens(const std::string& line)
{
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t)
    {
        out.push_back(t);
    }
    return out;
}

const Section& single(const std::vector<Section>& sections, std::string_view name)
{
    const Section* found = nullptr;
    for (const auto& s : sections)
    {
        if (s.name == name)
        {
            if (found)
            {
                throw FormatError(fmt::format("model file: duplicate [{}] section", name));
            }
            found = &s;
        }
    }
    if (!found)
    {
        throw FormatError(fmt::format("model file: missing [{}] section", name));
    }
    return *found;
}

Eigen::VectorXd read_column(const Section& s, Eigen::Index expected)
{
    if (static_cast<Eigen::Index>(s.lines.size()) != expected)
    {
        throw FormatError(fmt::format("model file: [{}] has {} lines, expected {}", s.name, s.lines.size(), expected));
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i)
    {
        v(i) = parse_real(s.lines[static_cast<std::size_t>(i)], s.name);
    }
    return v;
}

}  // namespace

void write_model(std::ostream& out, const FittedPcModel& model)
{
    const auto& sp = model.spectrum;
    out << "[meta]\n";
    out << "format_version=" << kModelFormatVersion << '\n';
    out << "p=" << model.p() << '\n';
    out << "n=" << model.n() << '\n';
    out << "gamma=" << real(model.gamma()) << '\n';
    out << "mode=" << to_string(model.prep.mode) << '\n';
    out << "k=" << model.k() << '\n';
    out << "k_spikes=" << model.k_spikes << '\n';
    out << "tau=" << real(sp.tau) << '\n';
    out << "iterations=" << sp.iterations << '\n';
    out << "converged=" << (sp.converged ? 1 : 0) << '\n';
    out << "used_bisection=" << (sp.used_bisection ? 1 : 0) << '\n';

    out << "[means]\n";
    for (Eigen::Index i = 0; i < model.prep.means.size(); ++i)
    {
        out << real(model.prep.means(i)) << '\n';
    }
    out << "[scales]\n";
    for (Eigen::Index i = 0; i < model.prep.scales.size(); ++i)
    {
        out << real(model.prep.scales(i)) << '\n';
    }
    out << "[eigenvalues]\n";
    for (Eigen::Index v = 0; v < model.eig.d.size(); ++v)
    {
        out << real(model.eig.d(v)) << ' ' << real(sp.d_hat(v)) << ' ' << real(sp.lambda_hat(v)) << '\n';
    }
    for (Eigen::Index v = 0; v < model.k(); ++v)
    {
        out << "[eigenvectors]\n";
        for (Eigen::Index i = 0; i < model.p(); ++i)
        {
            out << real(model.eig.u(i, v)) << '\n';
        }
    }
    out << "[adjustment]\n";
    for (const auto& c : model.components)
    {
        if (c.spike)
        {
            out << real(c.shrinkage) << ' ' << real(c.score_angle) << ' ' << real(c.eigvec_angle) << '\n';
        }
        else
        {
            out << "na na na\n";
        }
    }
}

void write_model(const std::filesystem::path& path, const FittedPcModel& model)
{
    if (path.empty())
    {
        throw FormatError("model path is empty");
    }
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError(fmt::format("cannot write model file '{}'", path.string()));
    }
    write_model(out, model);
    if (!out)
    {
        throw FormatError(fmt::format("error while writing model file '{}'", path.string()));
    }
}

FittedPcModel read_model(std::istream& in)
{
    std::vector<Section> sections;
    std::string line;
    while (std::getline(in, line))
    {
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (line.empty())
        {
            continue;
        }
        if (line.front() == '[')
        {
            if (line.back() != ']')
            {
                throw FormatError(fmt::format("model file: malformed section header '{}'", line));
            }
            sections.push_back({line.substr(1, line.size() - 2), {}});
            continue;
        }
        if (sections.empty())
        {
            throw FormatError("model file: content before the first section");
        }
        sections.back().lines.push_back(line);
    }
    if (sections.empty())
    {
        throw FormatError("model file is empty");
    }

    std::map<std::string, std::string, std::less<>> meta;
    for (const auto& l : single(sections, "meta").lines)
    {
        const auto eq = l.find('=');
        if (eq == std::string::npos)
        {
            throw FormatError(fmt::format("model file: bad meta line '{}'", l));
        }
        meta[l.substr(0, eq)] = l.substr(eq + 1);
    }
    auto meta_value = [&](std::string_view key) -> const std::string& {
        auto it = meta.find(key);
        if (it == meta.end())
        {
            throw FormatError(fmt::format("model file: missing meta key '{}'", key));
        }
        return it->second;
    };

    if (parse_int(meta_value("format_version"), "meta") != kModelFormatVersion)
    {
        throw FormatError(fmt::format("model file: unsupported format_version {}", meta_value("format_version")));
    }
    const auto p = static_cast<Eigen::Index>(parse_int(meta_value("p"), "meta"));
    const auto n = static_cast<Eigen::Index>(parse_int(meta_value("n"), "meta"));
    const auto k = static_cast<Eigen::Index>(parse_int(meta_value("k"), "meta"));
    if (p < 1 || n < 2 || k < 0 || k > std::min(p, n))
    {
        throw FormatError("model file: inconsistent dimensions in [meta]");
    }

    FittedPcModel model;
    model.prep.mode = parse_standardize_mode(meta_value("mode"));
    model.prep.means = read_column(single(sections, "means"), p);
    model.prep.scales = read_column(single(sections, "scales"), p);

    const auto m = std::min(p, n);
    const Section& ev = single(sections, "eigenvalues");
    if (static_cast<Eigen::Index>(ev.lines.size()) != m)
    {
        throw FormatError(fmt::format("model file: [eigenvalues] has {} lines, expected {}", ev.lines.size(), m));
    }
    auto& sp = model.spectrum;
    model.eig.d.resize(m);
    sp.d_hat.resize(m);
    sp.lambda_hat.resize(m);
    for (Eigen::Index v = 0; v < m; ++v)
    {
        const auto t = tokens(ev.lines[static_cast<std::size_t>(v)]);
        if (t.size() != 3)
        {
            throw FormatError("model file: [eigenvalues] lines need d d_hat lambda_hat");
        }
        model.eig.d(v) = parse_real(t[0], "eigenvalues");
        sp.d_hat(v) = parse_real(t[1], "eigenvalues");
        sp.lambda_hat(v) = parse_real(t[2], "eigenvalues");
    }
    model.eig.gamma = parse_real(meta_value("gamma"), "meta");
    model.eig.n = n;

    model.eig.u.resize(p, k);
    Eigen::Index col = 0;
    for (const auto& s : sections)
    {
        if (s.name != "eigenvectors")
        {
            continue;
        }
        if (col == k)
        {
            throw FormatError("model file: more [eigenvectors] sections than k");
        }
        model.eig.u.col(col++) = read_column(s, p);
    }
    if (col != k)
    {
        throw FormatError(fmt::format("model file: found {} eigenvectors, expected {}", col, k));
    }

    sp.gamma = model.eig.gamma;
    sp.p = p;
    sp.k = static_cast<Eigen::Index>(parse_int(meta_value("k_spikes"), "meta"));
    sp.tau = parse_real(meta_value("tau"), "meta");
    sp.iterations = static_cast<int>(parse_int(meta_value("iterations"), "meta"));
    sp.converged = parse_int(meta_value("converged"), "meta") != 0;
    sp.used_bisection = parse_int(meta_value("used_bisection"), "meta") != 0;
    const double total = model.eig.d.sum();
    sp.r = total > 0.0 ? Eigen::VectorXd(model.eig.d / total) : Eigen::VectorXd::Zero(m);
    model.k_spikes = sp.k;
    if (sp.k < 0 || sp.k > m)
    {
        throw FormatError("model file: k_spikes out of range");
    }

    const Section& adj = single(sections, "adjustment");
    if (static_cast<Eigen::Index>(adj.lines.size()) != k)
    {
        throw FormatError(fmt::format("model file: [adjustment] has {} lines, expected {}", adj.lines.size(), k));
    }
    for (Eigen::Index v = 0; v < k; ++v)
    {
        ComponentEstimate c = estimate_component(sp, v);
        const auto t = tokens(adj.lines[static_cast<std::size_t>(v)]);
        if (t.size() != 3)
        {
            throw FormatError("model file: [adjustment] lines need three fields");
        }
        const bool stored_spike = t[0] != "na";
        if (stored_spike != c.spike ||
            (c.spike && (parse_real(t[0], "adjustment") != c.shrinkage ||
                         parse_real(t[1], "adjustment") != c.score_angle ||
                         parse_real(t[2], "adjustment") != c.eigvec_angle)))
        {
            throw FormatError(fmt::format("model file: [adjustment] line {} disagrees with the spectrum", v + 1));
        }
        model.components.push_back(c);
    }
    return model;
}

FittedPcModel read_model(const std::filesystem::path& path)
{
    if (path.empty())
    {
        throw FormatError("model path is empty");
    }
    std::ifstream in(path);
    if (!in)
    {
        throw FormatError(fmt::format("cannot open model file '{}'", path.string()));
    }
    return read_model(in);
}

}  // namespace spca
