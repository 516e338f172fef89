#include <doctest.h>

#include <fstream>
#include <sstream>

#include "spca/errors.h"
#include "spca/model_io.h"
#include "spca/rng.h"
#include "spca/sim.h"
#include "temp_file.h"

using spca::testing::TempFile;

namespace
{

void check_equal(const spca::FittedPcModel& a, const spca::FittedPcModel& b)
{
    CHECK(a.prep.mode == b.prep.mode);
    CHECK(a.prep.means == b.prep.means);
    CHECK(a.prep.scales == b.prep.scales);
    CHECK(a.eig.d == b.eig.d);
    CHECK(a.eig.u == b.eig.u);
    CHECK(a.eig.gamma == b.eig.gamma);
    CHECK(a.eig.n == b.eig.n);
    CHECK(a.spectrum.d_hat == b.spectrum.d_hat);
    CHECK(a.spectrum.lambda_hat == b.spectrum.lambda_hat);
    CHECK(a.spectrum.r == b.spectrum.r);
    CHECK(a.spectrum.k == b.spectrum.k);
    CHECK(a.spectrum.tau == b.spectrum.tau);
    CHECK(a.spectrum.gamma == b.spectrum.gamma);
    CHECK(a.spectrum.iterations == b.spectrum.iterations);
    CHECK(a.spectrum.converged == b.spectrum.converged);
    CHECK(a.k_spikes == b.k_spikes);
    REQUIRE(a.components.size() == b.components.size());
    for (std::size_t v = 0; v < a.components.size(); ++v)
    {
        CHECK(a.components[v].spike == b.components[v].spike);
        CHECK(a.components[v].shrinkage == b.components[v].shrinkage);
        CHECK(a.components[v].adjustment == b.components[v].adjustment);
        CHECK(a.components[v].eigvec_angle == b.components[v].eigvec_angle);
        CHECK(a.components[v].score_angle == b.components[v].score_angle);
    }
}

spca::FittedPcModel small_model(spca::StandardizeMode mode, Eigen::Index k)
{
    spca::CounterRng rng(17, 0, 0);
    Eigen::MatrixXd m(5, 10);
    rng.fill_normal(m);
    m.row(0) *= 6.0;
    m.array() += 2.0;
    return spca::fit(spca::DataMatrix(m), {mode, k, {}});
}

}  // namespace

TEST_CASE("model round trip is exact")
{
    for (auto mode : {spca::StandardizeMode::none, spca::StandardizeMode::center, spca::StandardizeMode::center_scale})
    {
        const auto model = small_model(mode, 3);
        TempFile f(".spca");
        spca::write_model(f.path(), model);
        check_equal(model, spca::read_model(f.path()));
    }
}

TEST_CASE("model round trip with a detected spike")
{
    const auto x = spca::sim::gen_two_spike(60, 1.0, 4);
    const auto model = spca::fit(x, {spca::StandardizeMode::center, Eigen::Index{4}, {}});
    REQUIRE(model.k_spikes >= 1);
    std::stringstream ss;
    spca::write_model(ss, model);
    check_equal(model, spca::read_model(ss));

    // Serializing the re-read model produces identical bytes.
    std::istringstream in(ss.str());
    std::stringstream again;
    spca::write_model(again, spca::read_model(in));
    CHECK(again.str() == ss.str());
}

TEST_CASE("model file layout")
{
    const auto model = small_model(spca::StandardizeMode::center, 2);
    std::stringstream ss;
    spca::write_model(ss, model);
    const std::string text = ss.str();
    CHECK(text.rfind("[meta]\nformat_version=1\np=5\nn=10\n", 0) == 0);
    for (const char* section : {"[means]", "[scales]", "[eigenvalues]", "[eigenvectors]", "[adjustment]"})
    {
        CHECK(text.find(section) != std::string::npos);
    }
    std::size_t count = 0;
    for (auto pos = text.find("[eigenvectors]"); pos != std::string::npos; pos = text.find("[eigenvectors]", pos + 1))
    {
        ++count;
    }
    CHECK(count == 2);
}

TEST_CASE("model format errors")
{
    const auto model = small_model(spca::StandardizeMode::center, 2);
    std::stringstream ss;
    spca::write_model(ss, model);
    const std::string text = ss.str();

    std::string wrong_version = text;
    wrong_version.replace(wrong_version.find("format_version=1"), 16, "format_version=9");
    std::istringstream v(wrong_version);
    CHECK_THROWS_AS(spca::read_model(v), spca::FormatError);

    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(spca::read_model(truncated), spca::FormatError);

    std::istringstream empty("");
    CHECK_THROWS_AS(spca::read_model(empty), spca::FormatError);

    CHECK_THROWS_AS(spca::read_model(std::filesystem::path{}), spca::FormatError);
    CHECK_THROWS_AS(spca::write_model(std::filesystem::path{}, model), spca::FormatError);
    CHECK_THROWS_AS(spca::read_model(std::filesystem::path{"/nonexistent/model.spca"}), spca::FormatError);
}

TEST_CASE("tampered adjustment section is rejected")
{
    const auto x = spca::sim::gen_two_spike(60, 1.0, 4);
    const auto model = spca::fit(x, {spca::StandardizeMode::center, Eigen::Index{2}, {}});
    REQUIRE(model.components[0].spike);
    std::stringstream ss;
    spca::write_model(ss, model);
    std::string text = ss.str();
    const auto pos = text.find("[adjustment]\n") + 13;
    text.replace(pos, 3, "0.5");
    std::istringstream in(text);
    CHECK_THROWS_AS(spca::read_model(in), spca::FormatError);
}
