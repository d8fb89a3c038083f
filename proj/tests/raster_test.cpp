#include "support/test_util.hpp"

#include <tessera/raster.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace tessera;
using namespace tessera::models;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(TESSERA_FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Errc error_of(std::string_view text) {
    try {
        import_ascii_grid(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "accepted: " << text;
    return Errc::invalid_argument;
}

}  // namespace

TEST(Raster, MinimalGrid) {
    const auto layer = import_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n");
    EXPECT_EQ(layer.ncols, 2);
    EXPECT_EQ(layer.nrows, 2);
    EXPECT_EQ(layer.values, (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(layer.at(1, 0), 3.0);
    EXPECT_EQ(layer.nodata, -9999.0);
}

TEST(Raster, HeaderErrors) {
    EXPECT_EQ(error_of("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n"), Errc::dimension_mismatch);
    EXPECT_EQ(error_of("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3 4 5\n"),
              Errc::dimension_mismatch);
    EXPECT_EQ(error_of("ncols 2\nnrows 2\nxllcorner 0\ncellsize 1\n1 2 3 4\n"), Errc::malformed);
    EXPECT_EQ(error_of("ncols 2\nNCOLS 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3 4\n"),
              Errc::malformed);
    EXPECT_EQ(error_of("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 x 4\n"), Errc::malformed);
    EXPECT_EQ(error_of("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nbogus 3\n1 2 3 4\n"),
              Errc::malformed);
}

TEST(Raster, FixtureWithNodataAndMixedCaseHeaders) {
    const auto layer = import_ascii_grid(fixture("humidity_4x3.asc"), "humidity");
    EXPECT_EQ(layer.ncols, 4);
    EXPECT_EQ(layer.nrows, 3);
    EXPECT_EQ(layer.xllcorner, 350000.5);
    EXPECT_EQ(layer.yllcorner, 1650000.25);
    EXPECT_EQ(layer.cellsize, 250.0);
    EXPECT_EQ(layer.nodata, -9999.0);
    const std::vector<double> expected{0.1, 0.25, 0.5, 0.75, 0.0, -9999, 1.0, 0.125, 0.3, 0.6, 0.9, 0.45};
    EXPECT_EQ(layer.values, expected);
    EXPECT_TRUE(layer.is_nodata(1, 1));
    EXPECT_FALSE(layer.is_nodata(1, 0));
}

TEST(Raster, FixtureWithCustomNodataAndCrlf) {
    const auto layer = import_ascii_grid(fixture("elevation_3x2_crlf.asc"));
    EXPECT_EQ(layer.nodata, -1.0);
    EXPECT_EQ(layer.values, (std::vector<double>{12.5, -1, 7, 3e2, 0.001, -1}));
    EXPECT_TRUE(layer.is_nodata(0, 1));
    EXPECT_TRUE(layer.is_nodata(1, 2));
}

TEST(Raster, ExportImportRoundTripIsExact) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> value(-1e6, 1e6);
    for (int trial = 0; trial < 50; ++trial) {
        RasterLayer layer;
        layer.ncols = 1 + static_cast<int>(gen() % 12);
        layer.nrows = 1 + static_cast<int>(gen() % 12);
        layer.xllcorner = value(gen);
        layer.yllcorner = value(gen);
        layer.cellsize = 0.1 + static_cast<double>(gen() % 1000) / 7.0;
        layer.nodata = trial % 2 ? -9999.0 : -3.5;
        for (int i = 0; i < layer.ncols * layer.nrows; ++i) {
            layer.values.push_back(gen() % 5 == 0 ? layer.nodata : value(gen) / 3.0);
        }
        const auto back = import_ascii_grid(export_ascii_grid(layer));
        ASSERT_EQ(back, layer) << export_ascii_grid(layer);
    }
}

TEST(Raster, ApplyLayerToPatches) {
    const auto& m = testutil::pastoral();
    const ParamSet p{{"width", make_int(4)}, {"height", make_int(3)}};
    const auto s = init_simulation(m, p, 7);
    const auto layer = import_ascii_grid(fixture("humidity_4x3.asc"));

    const auto applied = apply_layer(m, s, layer, "humidity");
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 4; ++c) {
            const std::size_t idx = s.grid.index_of({r, c});
            const double want = layer.is_nodata(r, c) ? s.patch_real(idx, pastoral::humidity) : layer.at(r, c);
            EXPECT_EQ(applied.patch_real(idx, pastoral::humidity), want);
        }
    }

    const auto flat = apply_layer(m, s, layer, "humidity", {0.0, 0.5});
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (!layer.is_nodata(r, c)) {
                EXPECT_EQ(flat.patch_real(s.grid.index_of({r, c}), pastoral::humidity), 0.5);
            }
        }
    }

    const auto clamped = apply_layer(m, s, layer, "humidity", {2.0, 0.0}, ClampBounds{0.0, 1.0});
    EXPECT_EQ(clamped.patch_real(s.grid.index_of({0, 3}), pastoral::humidity), 1.0);

    EXPECT_THROW(apply_layer(m, s, layer, "humidity", {2.0, 0.0}), Error);  // 1.5 out of declared range
    try {
        apply_layer(m, s, layer, "height");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unknown_attribute);
    }
}

TEST(Raster, ApplyLayerDimensionMismatch) {
    const auto& m = testutil::pastoral();
    const auto s = init_simulation(m, {{"width", make_int(5)}, {"height", make_int(5)}}, 7);
    RasterLayer big;
    big.ncols = 10;
    big.nrows = 10;
    big.values.assign(100, 0.5);
    try {
        apply_layer(m, s, big, "humidity");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension_mismatch);
    }
}
