#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "reference_models.hpp"
#include "vtolctrl/models.hpp"
#include "vtolctrl/synthesis.hpp"

using namespace vtolctrl;

namespace {

std::filesystem::path scratch(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "vtolctrl_test_models";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(LevelModel, MatchesLiterals) {
    const LinearModel m = build_level_model();
    EXPECT_EQ(m.A, reference::kLevelA);
    EXPECT_EQ(m.Bu, reference::kLevelBu);
    EXPECT_EQ(m.Bw, reference::kLevelBw);
    EXPECT_EQ(m.C, Matrix::identity(4));
    EXPECT_EQ(m.A(0, 3), 1.0);
    EXPECT_EQ(m.A(2, 3), 20.4845);
    EXPECT_EQ(m.A(3, 2), -2.1745);
}

TEST(LevelModel, TrimAndLabels) {
    const LinearModel m = build_level_model();
    EXPECT_EQ(m.trim.mode, FlightMode::Level);
    EXPECT_EQ(m.trim.airspeed, 22.49);
    for (double r : m.trim.rates)
        EXPECT_EQ(r, 0.0);
    EXPECT_EQ(m.state_names.size(), 4u);
    EXPECT_EQ(m.input_names.size(), 1u);
    EXPECT_NO_THROW(m.validate());
}

TEST(LevelModel, ExactlyOneZeroEigenvalue) {
    int zeros = 0;
    for (auto l : eig_general(build_level_model().A))
        zeros += std::abs(l) < 1e-12;
    EXPECT_EQ(zeros, 1);
}

TEST(LevelModel, ControllableByPbh) {
    const LinearModel m = build_level_model();
    EXPECT_TRUE(is_controllable(m.A, m.Bu));
}

TEST(LevelModel, KrylovRankIsNumericallyDeficient) {
    // The Krylov matrix spans ~7 orders of magnitude; at 1e-8 relative it
    // reads as rank 3, which is why controllability is tested with PBH.
    const LinearModel m = build_level_model();
    EXPECT_EQ(rank(controllability_matrix(m.A, m.Bu), 1e-12), 4u);
}

TEST(HoverModel, MatchesLiterals) {
    const LinearModel m = build_hover_model();
    EXPECT_EQ(m.A, reference::kHoverA);
    EXPECT_EQ(m.Bu, reference::kHoverBu);
    EXPECT_EQ(m.Bw, reference::kHoverBw);
    EXPECT_EQ(m.C, Matrix::identity(6));
    EXPECT_EQ(m.Bu(3, 0), -153.5);
    EXPECT_EQ(m.Bu.block(5, 0, 1, 4), (Matrix{{-1.8, -1.8, 1.8, 1.8}}));
}

TEST(HoverModel, TrimIsAtRest) {
    const LinearModel m = build_hover_model();
    EXPECT_EQ(m.trim.mode, FlightMode::Hover);
    for (double r : m.trim.rates)
        EXPECT_EQ(r, 0.0);
    for (double v : m.trim.body_velocity)
        EXPECT_EQ(v, 0.0);
}

TEST(HoverModel, Controllable) {
    const LinearModel m = build_hover_model();
    EXPECT_EQ(rank(m.Bu.block(3, 0, 3, 4)), 3u);
    EXPECT_EQ(rank(controllability_matrix(m.A, m.Bu)), 6u);
    EXPECT_TRUE(is_controllable(m.A, m.Bu));
}

TEST(HoverModel, ThreeAxisGustWidening) {
    const LinearModel m = with_three_axis_gust(build_hover_model());
    ASSERT_EQ(m.Bw.rows(), 6u);
    ASSERT_EQ(m.Bw.cols(), 3u);
    EXPECT_EQ(m.Bw.block(3, 0, 3, 3), Matrix::identity(3));
    EXPECT_EQ(m.Bw.block(0, 0, 3, 3), Matrix(3, 3));
    EXPECT_THROW(with_three_axis_gust(build_level_model()), Error);
}

TEST(Weights, DefaultsAreValid) {
    EXPECT_NO_THROW(default_level_weights().validate(4, 1));
    EXPECT_NO_THROW(default_hover_weights().validate(6, 4));
    const WeightSpec w = default_level_weights();
    EXPECT_EQ(w.Q, Matrix::diag(std::vector<double>{1, 0.01, 0.01, 10}));
    EXPECT_EQ(w.R, Matrix{{1}});
}

TEST(Weights, RejectsIndefiniteR) {
    WeightSpec w{Matrix::identity(2), Matrix{{0.0}}};
    EXPECT_THROW(w.validate(2, 1), Error);
}

TEST(Weights, CostEquivalentOutput) {
    const LinearModel m = build_level_model().with_weights(default_level_weights());
    const Matrix q = m.Cz.transpose() * m.Cz;
    const Matrix r = m.Du.transpose() * m.Du;
    const Matrix s = m.Cz.transpose() * m.Du;
    EXPECT_LE((q - default_level_weights().Q).max_abs(), 1e-14);
    EXPECT_LE((r - default_level_weights().R).max_abs(), 1e-14);
    EXPECT_EQ(s.max_abs(), 0.0);
}

TEST(ModelIo, RoundTripIsExact) {
    for (const LinearModel &m : {build_level_model(), build_hover_model()}) {
        const auto path = scratch(m.name + ".json");
        save_model(m, path);
        const LinearModel back = load_model(path);
        EXPECT_EQ(back.A, m.A);
        EXPECT_EQ(back.Bu, m.Bu);
        EXPECT_EQ(back.Bw, m.Bw);
        EXPECT_EQ(back.C, m.C);
        EXPECT_EQ(back.Cz, m.Cz);
        EXPECT_EQ(back.Du, m.Du);
        EXPECT_EQ(back.state_names, m.state_names);
        EXPECT_EQ(back.input_names, m.input_names);
        EXPECT_EQ(back.trim.mode, m.trim.mode);
        EXPECT_EQ(back.trim.airspeed, m.trim.airspeed);
    }
}

TEST(ModelIo, StoresPaperDecimalsVerbatim) {
    const std::string text = model_to_json_text(build_level_model());
    EXPECT_NE(text.find("20.4845"), std::string::npos);
    EXPECT_NE(text.find("-0.6544"), std::string::npos);
}

TEST(ModelIo, DimensionMismatch) {
    auto j = nlohmann::json::parse(model_to_json_text(build_level_model()));
    j["Bu"] = {{0.0}, {0.0009}, {-0.0407}};
    try {
        model_from_json_text(j.dump());
        FAIL() << "expected DimensionMismatch";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(ModelIo, HandEditedEntryIsLoaded) {
    auto j = nlohmann::json::parse(model_to_json_text(build_level_model()));
    j["A"][2][3] = 19.5;
    const auto path = scratch("edited.json");
    std::ofstream(path) << j.dump(2);
    const LinearModel m = load_model(path);
    EXPECT_EQ(m.A(2, 3), 19.5);
    EXPECT_EQ(m.A(3, 2), -2.1745);
}

TEST(ModelIo, ParseErrorReportsLine) {
    try {
        model_from_json_text("{\n  \"name\": \"x\",\n  \"A\": [[1,\n}");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}

TEST(ModelIo, MissingFieldIsNamed) {
    auto j = nlohmann::json::parse(model_to_json_text(build_level_model()));
    j.erase("Bw");
    try {
        model_from_json_text(j.dump());
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("Bw"), std::string::npos);
    }
}

TEST(ModelIo, MissingFileIsParseError) {
    try {
        load_model("/nonexistent/model.json");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
}
