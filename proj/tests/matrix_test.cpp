#include "s2sl/matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "s2sl/errors.hpp"
#include "s2sl/rng.hpp"

namespace s2sl {
namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.next_uniform(-2.0, 2.0);
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

TEST(Matrix, ConstructionAndIndexing) {
    Matrix m(2, 3, 1.5);
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_DOUBLE_EQ(m(1, 2), 1.5);
    m(0, 1) = -4.0;
    EXPECT_DOUBLE_EQ(m(0, 1), -4.0);
    EXPECT_EQ(m.shape_str(), "2x3");
}

TEST(Matrix, DefaultConstructionIsZero) {
    Matrix m(2, 2);
    for (double v : m.data()) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Matrix, FromRows) {
    const Matrix m = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m(1, 1), 4.0);
    EXPECT_THROW(Matrix::from_rows({{1.0}, {2.0, 3.0}}), ShapeError);
}

TEST(Matrix, RowSpanViewsStorage) {
    Matrix m = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    auto row = m.row(1);
    ASSERT_EQ(row.size(), 2u);
    row[0] = 9.0;
    EXPECT_DOUBLE_EQ(m(1, 0), 9.0);
}

TEST(Matmul, HandComputedProduct) {
    const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    const Matrix b = Matrix::from_rows({{5.0, 6.0}, {7.0, 8.0}});
    const Matrix c = matmul(a, b);
    EXPECT_EQ(c, Matrix::from_rows({{19.0, 22.0}, {43.0, 50.0}}));
}

TEST(Matmul, IdentityIsNeutral) {
    const Matrix b = Matrix::from_rows({{5.0, 6.0}, {7.0, 8.0}});
    EXPECT_EQ(matmul(identity(2), b), b);
    EXPECT_EQ(matmul(b, identity(2)), b);
}

TEST(Matmul, ZeroTimesAnythingIsZero) {
    const Matrix zero(2, 2);
    RngStream rng(5);
    const Matrix b = random_matrix(2, 7, rng);
    const Matrix c = matmul(zero, b);
    EXPECT_EQ(c.rows(), 2u);
    EXPECT_EQ(c.cols(), 7u);
    for (double v : c.data()) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
    const Matrix a(2, 3);
    const Matrix b(2, 2);
    try {
        matmul(a, b);
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("2x3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("2x2"), std::string::npos) << msg;
    }
}

TEST(Matmul, AssociativityOnRandomMatrices) {
    RngStream rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_matrix(3, 4, rng);
        const Matrix b = random_matrix(4, 5, rng);
        const Matrix c = random_matrix(5, 2, rng);
        EXPECT_LT(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))), 1e-9);
    }
}

TEST(Matmul, DistributesOverAddition) {
    RngStream rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix a = random_matrix(3, 4, rng);
        const Matrix b = random_matrix(4, 2, rng);
        const Matrix c = random_matrix(4, 2, rng);
        Matrix sum(4, 2);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 2; ++j) sum(i, j) = b(i, j) + c(i, j);
        const Matrix lhs = matmul(a, sum);
        Matrix rhs = matmul(a, b);
        const Matrix ac = matmul(a, c);
        for (std::size_t i = 0; i < rhs.rows(); ++i)
            for (std::size_t j = 0; j < rhs.cols(); ++j) rhs(i, j) += ac(i, j);
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-9);
    }
}

TEST(Matmul, TransposedVariantsMatchPlainProduct) {
    RngStream rng(13);
    const Matrix a = random_matrix(4, 6, rng);
    const Matrix b = random_matrix(5, 6, rng);
    EXPECT_LT(max_abs_diff(matmul_nt(a, b), matmul(a, transpose(b))), 1e-12);
    const Matrix c = random_matrix(4, 5, rng);
    EXPECT_LT(max_abs_diff(matmul_tn(a, c), matmul(transpose(a), c)), 1e-12);
}

TEST(Transpose, IsAnInvolution) {
    RngStream rng(14);
    const Matrix a = random_matrix(3, 7, rng);
    EXPECT_EQ(transpose(transpose(a)), a);
}

TEST(Matrix, AllFiniteDetectsNanAndInf) {
    Matrix m(2, 2, 1.0);
    EXPECT_TRUE(m.all_finite());
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(m.all_finite());
    m(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_FALSE(m.all_finite());
}

}  // namespace
}  // namespace s2sl
