#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "despeckle/filter.hpp"
#include "despeckle/pgm.hpp"
#include "test_support.hpp"

namespace {

using namespace despeckle;
using despeckle::test_support::max_abs_diff;
using despeckle::test_support::random_image;

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("despeckle_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::filesystem::path write_file(const std::string& name, const std::string& bytes) const {
        const auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << bytes;
        return p;
    }

    std::filesystem::path dir_;
};

using PgmTest = TempDir;

TEST_F(PgmTest, LoadsAsciiGraymap) {
    const auto img = load_image(write_file("a.pgm", "P2\n# comment\n2 2\n255\n0 255\n255 0\n"));
    ASSERT_EQ(img.width(), 2u);
    ASSERT_EQ(img.height(), 2u);
    EXPECT_EQ(img(0, 0), 0.0);
    EXPECT_EQ(img(1, 0), 1.0);
    EXPECT_EQ(img(0, 1), 1.0);
    EXPECT_EQ(img(1, 1), 0.0);
}

TEST_F(PgmTest, DividesByMaxval) {
    const auto img = load_image(write_file("m.pgm", "P2 3 1 15 0 5 15"));
    EXPECT_DOUBLE_EQ(img(1, 0), 5.0 / 15.0);
    EXPECT_EQ(img(2, 0), 1.0);
}

TEST_F(PgmTest, SaveLoadRoundTripWithinQuantization) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto img = random_image(7 + seed, 5 + seed % 3, seed);
        const auto path = dir_ / "rt.pgm";
        save_image(img, path);
        const auto back = load_image(path);
        ASSERT_TRUE(back.same_shape(img));
        EXPECT_LE(max_abs_diff(img, back), 1.0 / 255.0 + 1e-12);
    }
}

TEST_F(PgmTest, SaveQuantizesWithClampAndRoundHalfUp) {
    ImageBuffer img(3, 1, std::vector<double>{0.5, -0.2, 1.7});
    const auto path = dir_ / "q.pgm";
    save_image(img, path);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    ASSERT_EQ(bytes.substr(0, 11), "P5\n3 1\n255\n");
    ASSERT_EQ(bytes.size(), 14u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[11]), 128);
    EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 0);
    EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 255);
}

TEST_F(PgmTest, ErrorKinds) {
    auto kind_of = [](const std::filesystem::path& p) {
        try {
            load_image(p);
        } catch (const IoError& e) {
            return e.kind();
        }
        ADD_FAILURE() << "no error for " << p;
        return IoErrorKind::unwritable_path;
    };
    EXPECT_EQ(kind_of(dir_ / "absent.pgm"), IoErrorKind::missing_file);
    EXPECT_EQ(kind_of(write_file("magic.pgm", "P6\n1 1\n255\n\x01")), IoErrorKind::malformed_header);
    EXPECT_EQ(kind_of(write_file("hdr.pgm", "P5\n2 x\n255\n")), IoErrorKind::malformed_header);
    EXPECT_EQ(kind_of(write_file("deep.pgm", "P2\n1 1\n65535\n7\n")), IoErrorKind::unsupported_maxval);
    EXPECT_EQ(kind_of(write_file("short.pgm", "P2\n2 2\n255\n1 2 3\n")), IoErrorKind::malformed_raster);

    const auto truncated = write_file("trunc.pgm", std::string("P5\n4 4\n255\n") + std::string(10, '\x10'));
    try {
        load_image(truncated);
        FAIL() << "truncated payload accepted";
    } catch (const IoError& e) {
        EXPECT_EQ(e.kind(), IoErrorKind::malformed_raster);
        EXPECT_STREQ(e.what(), "malformed raster");
    }
}

TEST_F(PgmTest, UnwritablePath) {
    try {
        save_image(ImageBuffer(1, 1), dir_ / "missing_dir" / "x.pgm");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_EQ(e.kind(), IoErrorKind::unwritable_path);
    }
}

TEST(ReflectIndex, MirrorsWithoutRepeatingTheEdge) {
    EXPECT_EQ(reflect_index(-1, 5), 1u);
    EXPECT_EQ(reflect_index(-3, 5), 3u);
    EXPECT_EQ(reflect_index(5, 5), 3u);
    EXPECT_EQ(reflect_index(6, 5), 2u);
    EXPECT_EQ(reflect_index(9, 5), 1u);  // second fold
    EXPECT_EQ(reflect_index(-7, 1), 0u);
}

TEST(GaussianBlur, ConstantImageIsExact) {
    const ImageBuffer img(9, 6, 0.3141);
    for (double sigma : {0.4, 1.2, 5.5, 20.0}) EXPECT_EQ(gaussian_blur(img, sigma), img);
}

TEST(GaussianBlur, ZeroSigmaIsIdentity) {
    const auto img = random_image(8, 8, 3);
    EXPECT_EQ(gaussian_blur(img, 0.0), img);
}

TEST(GaussianBlur, ImpulseMatchesDirect2DConvolution) {
    const double sigma = 1.2;
    ImageBuffer impulse(15, 15);
    impulse(7, 7) = 1.0;
    const auto blurred = gaussian_blur(impulse, sigma);

    // Direct 2D oracle: sampled isotropic Gaussian over the same support,
    // normalized over the full square.
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    double total = 0.0;
    for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i) total += std::exp(-(i * i + j * j) / (2 * sigma * sigma));
    for (int y = 0; y < 15; ++y) {
        for (int x = 0; x < 15; ++x) {
            const int dx = x - 7, dy = y - 7;
            double expected = 0.0;
            if (std::abs(dx) <= radius && std::abs(dy) <= radius) {
                expected = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) / total;
            }
            EXPECT_NEAR(blurred(x, y), expected, 1e-12) << x << "," << y;
        }
    }
}

TEST(GaussianBlur, ConservesTrapezoidWeightedMean) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto img = random_image(23, 17, seed);
        for (double sigma : {0.8, 1.2, 3.0}) {
            EXPECT_NEAR(test_support::trapezoid_mean(gaussian_blur(img, sigma)), test_support::trapezoid_mean(img), 1e-12);
        }
    }
}

TEST(GaussianBlur, SemigroupOnSmoothImage) {
    ImageBuffer img(64, 64);
    for (std::size_t y = 0; y < 64; ++y)
        for (std::size_t x = 0; x < 64; ++x) img(x, y) = 0.5 + 0.3 * std::sin(0.15 * x) * std::cos(0.1 * y);
    const auto twice = gaussian_blur(gaussian_blur(img, 1.5), 2.0);
    const auto once = gaussian_blur(img, 2.5);
    EXPECT_LE(max_abs_diff(twice, once), 1e-3);
}

TEST(GradientCentral, Ramp) {
    const double h = 0.07;
    ImageBuffer img(8, 8);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x) img(x, y) = h * static_cast<double>(x);
    const auto g = gradient_central(img);
    for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 1; x < 7; ++x) EXPECT_NEAR(g.gx(x, y), h, 1e-15);
        EXPECT_EQ(g.gx(0, y), 0.0);  // 0.5 (u(1) - u(1)) under reflection
        EXPECT_EQ(g.gx(7, y), 0.0);
        for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(g.gy(x, y), 0.0);
    }
}

TEST(GradientCentral, ConstantIsZero) {
    const auto g = gradient_central(ImageBuffer(5, 4, 0.77));
    for (double v : g.gx.pixels()) EXPECT_EQ(v, 0.0);
    for (double v : g.gy.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(GradientCentral, YFollowsRows) {
    ImageBuffer img(4, 6);
    for (std::size_t y = 0; y < 6; ++y)
        for (std::size_t x = 0; x < 4; ++x) img(x, y) = 2.0 * static_cast<double>(y);
    const auto g = gradient_central(img);
    EXPECT_EQ(g.gy(2, 3), 2.0);
    EXPECT_EQ(g.gx(2, 3), 0.0);
}

TEST(HistogramEqualize, ConstantImageStaysConstant) {
    const auto out = histogram_equalize(ImageBuffer(6, 6, 0.3));
    const double first = out.pixels()[0];
    for (double v : out.pixels()) EXPECT_EQ(v, first);
}

TEST(HistogramEqualize, UniformHistogramChangesLittle) {
    ImageBuffer img(16, 16);
    for (std::size_t i = 0; i < 256; ++i) img.pixels()[i] = static_cast<double>(i) / 255.0;
    const auto out = histogram_equalize(img);
    // Oracle: bin b holds exactly one pixel, so its CDF is (b + 1) / 256.
    for (std::size_t i = 0; i < 256; ++i) {
        EXPECT_DOUBLE_EQ(out.pixels()[i], static_cast<double>(i + 1) / 256.0);
        EXPECT_LE(std::abs(out.pixels()[i] - img.pixels()[i]), 1.0 / 255.0);
    }
}

TEST(HistogramEqualize, TwoLevelImage) {
    ImageBuffer img(10, 10, 0.2);
    for (std::size_t i = 50; i < 100; ++i) img.pixels()[i] = 0.4;
    const auto out = histogram_equalize(img);
    EXPECT_DOUBLE_EQ(out.pixels()[0], 0.5);
    EXPECT_DOUBLE_EQ(out.pixels()[99], 1.0);
}

TEST(HistogramEqualize, IdempotentUpToQuantization) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto img = random_image(32, 32, seed);
        for (double& v : img.pixels()) v = v * v;  // skewed histogram
        const auto once = histogram_equalize(img);
        const auto twice = histogram_equalize(once);
        EXPECT_LE(max_abs_diff(once, twice), 1.0 / 255.0);
    }
}

TEST(HistogramEqualize, MonotoneMapping) {
    const auto img = random_image(20, 20, 11);
    const auto out = histogram_equalize(img);
    for (std::size_t i = 0; i < img.size(); ++i)
        for (std::size_t j = 0; j < img.size(); ++j) {
            if (img.pixels()[i] <= img.pixels()[j]) ASSERT_LE(out.pixels()[i], out.pixels()[j]);
        }
}

TEST(HistogramEqualize, RejectsOutOfRange) {
    ImageBuffer img(2, 2, 0.5);
    img(1, 1) = 1.2;
    EXPECT_THROW(histogram_equalize(img), std::domain_error);
}

TEST(ImageBuffer, RejectsEmptyAndMismatchedData) {
    EXPECT_THROW(ImageBuffer(0, 3), std::invalid_argument);
    EXPECT_THROW(ImageBuffer(2, 2, std::vector<double>(3)), std::invalid_argument);
}

}  // namespace
