#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "fpsys/fpsys.hpp"

using namespace fpsys;

namespace {

std::string samples(const std::string& name) { return std::string(FPSYS_SAMPLES_DIR) + "/" + name; }

}  // namespace

TEST(TextIo, ReadsSampleSystem) {
    auto in = open_input(samples("ap3.txt"));
    const SystemSpec sys = read_system(in);
    EXPECT_EQ(sys.field().p(), 3U);
    EXPECT_EQ(sys.m(), 1U);
    EXPECT_EQ(sys.k(), 3U);
    EXPECT_TRUE(sys.homogeneous());
    EXPECT_TRUE(sys.rows_sum_zero());
}

TEST(TextIo, SystemRoundTrip) {
    std::istringstream in("# comment\n\np=5 m=2 k=4\n1 2 3 4\n0 1 1 3\nb:\n1 0\n2 2\n");
    const SystemSpec sys = read_system(in);
    ASSERT_FALSE(sys.homogeneous());
    EXPECT_EQ(sys.constants()->at(1), (FpVector{2, 2}));
    std::ostringstream out;
    write_system(out, sys);
    std::istringstream again(out.str());
    const SystemSpec back = read_system(again);
    std::ostringstream out2;
    write_system(out2, back);
    EXPECT_EQ(out.str(), out2.str());
}

TEST(TextIo, CoefficientsAreReduced) {
    std::istringstream in("p=3 m=1 k=3\n4 -1 3\n");
    const SystemSpec sys = read_system(in);
    EXPECT_EQ(sys.coeff(0, 0), 1U);
    EXPECT_EQ(sys.coeff(0, 1), 2U);
    EXPECT_EQ(sys.coeff(0, 2), 0U);
}

TEST(TextIo, PointSetRoundTrip) {
    auto in = open_input(samples("points_f3n2.txt"));
    const PointSet a = read_point_set(in);
    EXPECT_EQ(a.size(), 6U);
    std::ostringstream out;
    write_point_set(out, a);
    std::istringstream again(out.str());
    const PointSet b = read_point_set(again);
    EXPECT_EQ(a.points(), b.points());
}

TEST(TextIo, TensorRoundTrip) {
    auto in = open_input(samples("diag4.txt"));
    const Tensor t = read_tensor(in);
    EXPECT_EQ(t.side(), 4U);
    EXPECT_EQ(t.order(), 3U);
    EXPECT_EQ(t.support().size(), 4U);
    EXPECT_EQ(t.at(MultiIndex{3, 3, 3}), 2U);
    std::ostringstream out;
    write_tensor(out, t);
    std::istringstream again(out.str());
    EXPECT_TRUE(read_tensor(again) == t);
}

TEST(TextIo, ParseErrors) {
    auto bad_system = [](const std::string& s) {
        std::istringstream in(s);
        return read_system(in);
    };
    EXPECT_THROW(bad_system(""), ParseError);
    EXPECT_THROW(bad_system("p=4 m=1 k=3\n1 1 1\n"), ParseError);
    EXPECT_THROW(bad_system("p=3 m=1\n1 1 1\n"), ParseError);
    EXPECT_THROW(bad_system("p=3 m=1 k=3 q=2\n1 1 1\n"), ParseError);
    EXPECT_THROW(bad_system("p=3 m=1 k=3\n1 1\n"), ParseError);
    EXPECT_THROW(bad_system("p=3 m=1 k=3\n1 x 1\n"), ParseError);
    EXPECT_THROW(bad_system("p=3 m=1 k=3\n1 1 1\nextra\n"), ParseError);
    EXPECT_THROW(bad_system("p=3 m=2 k=3\n1 1 1\n"), ParseError);

    auto bad_points = [](const std::string& s) {
        std::istringstream in(s);
        return read_point_set(in);
    };
    EXPECT_THROW(bad_points("p=3 n=2\n1 3\n"), ParseError);
    EXPECT_THROW(bad_points("p=3 n=2\n1 1\n1 1\n"), ParseError);
    EXPECT_THROW(bad_points("p=3 n=2\n1\n"), ParseError);

    auto bad_tensor = [](const std::string& s) {
        std::istringstream in(s);
        return read_tensor(in);
    };
    EXPECT_THROW(bad_tensor("3 2\n"), ParseError);
    EXPECT_THROW(bad_tensor("3 2 2\n0 1 1\n"), ParseError);
    EXPECT_THROW(bad_tensor("3 2 2\n1 1\n"), ParseError);
    EXPECT_THROW(open_input(samples("does_not_exist.txt")), ParseError);
}

TEST(TextIo, ParseErrorsNameTheLine) {
    std::istringstream in("p=3 n=2\n\n1 1\n1 7\n");
    try {
        (void)read_point_set(in);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
}

TEST(TextIo, VectorListKeepsDuplicates) {
    std::istringstream in("p=2 n=1\n1\n1\n1\n");
    const VectorList t = read_vector_list(in);
    EXPECT_EQ(t.vectors.size(), 3U);
}
