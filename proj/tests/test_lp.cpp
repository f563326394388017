#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "jlrisk/lp.hpp"

using namespace jlrisk::lp;

namespace {

// Solves the square system M x = b by Gaussian elimination with partial
// pivoting; false when singular.
bool solve_square(std::vector<std::vector<double>> M, std::vector<double> b, std::vector<double>& x) {
    const std::size_t d = b.size();
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        if (std::abs(M[piv][col]) < 1e-10) return false;
        std::swap(M[piv], M[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = M[r][col] / M[col][col];
            for (std::size_t c = col; c < d; ++c) M[r][c] -= f * M[col][c];
            b[r] -= f * b[col];
        }
    }
    x.resize(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = b[i] / M[i][i];
    return true;
}

struct Oracle {
    bool feasible = false;
    double value = 0.0;
};

// Best objective over all vertices of a bounded polytope.
Oracle vertex_enumeration(const LinearProgram& p) {
    const std::size_t d = p.num_vars();
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < p.num_rows(); ++i) {
        rows.emplace_back(p.row(i), p.row(i) + d);
        rhs.push_back(p.rhs(i));
    }
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> e(d, 0.0);
        e[j] = 1.0;
        rows.push_back(e);
        rhs.push_back(p.upper()[j]);
        e[j] = -1.0;
        rows.push_back(e);
        rhs.push_back(-p.lower()[j]);
    }
    const std::size_t k = rows.size();
    Oracle best;
    std::vector<std::size_t> pick(d);
    // Iterate over d-subsets of the k constraints.
    std::vector<bool> mask(k, false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(d), true);
    do {
        std::vector<std::vector<double>> M;
        std::vector<double> b;
        for (std::size_t i = 0; i < k; ++i)
            if (mask[i]) {
                M.push_back(rows[i]);
                b.push_back(rhs[i]);
            }
        std::vector<double> x;
        if (!solve_square(M, b, x)) continue;
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += rows[i][j] * x[j];
            ok = s <= rhs[i] + 1e-9;
        }
        if (!ok) continue;
        double val = 0.0;
        for (std::size_t j = 0; j < d; ++j) val += p.objective()[j] * x[j];
        if (!best.feasible || (p.sense() == Sense::Maximize ? val > best.value : val < best.value)) best.value = val;
        best.feasible = true;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

}  // namespace

TEST(Lp, SingleVariable) {
    LinearProgram p(1, Sense::Maximize);
    p.set_objective({1.0});
    p.add_row({1.0}, 3.0);
    p.set_bounds(0, 0.0, kInf);
    const auto r = solve(p);
    ASSERT_EQ(r.status, Status::Optimal);
    EXPECT_NEAR(r.value, 3.0, 1e-12);
    EXPECT_NEAR(r.x[0], 3.0, 1e-12);
}

TEST(Lp, CoveringConstraint) {
    LinearProgram p(2);
    p.set_objective({1.0, 1.0});
    p.add_row({-1.0, -1.0}, -1.0);
    p.set_bounds(0, 0.0, kInf);
    p.set_bounds(1, 0.0, kInf);
    const auto r = solve(p);
    ASSERT_EQ(r.status, Status::Optimal);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_NEAR(r.x[0] + r.x[1], 1.0, 1e-12);
}

TEST(Lp, Infeasible) {
    LinearProgram p(2);
    p.set_objective({1.0, 0.0});
    p.add_row({1.0, 1.0}, 1.0);
    p.add_row({-1.0, -1.0}, -2.0);
    p.set_bounds(0, 0.0, kInf);
    p.set_bounds(1, 0.0, kInf);
    EXPECT_EQ(solve(p).status, Status::Infeasible);

    LinearProgram q(1);
    q.set_bounds(0, 0.0, 1.0);
    q.add_row({1.0}, -0.5);  // singleton row turned into an empty bound
    EXPECT_EQ(solve(q).status, Status::Infeasible);
}

TEST(Lp, Unbounded) {
    LinearProgram p(2, Sense::Maximize);
    p.set_objective({1.0, 1.0});
    p.add_row({1.0, -1.0}, 1.0);
    p.set_bounds(0, 0.0, kInf);
    p.set_bounds(1, 0.0, kInf);
    EXPECT_EQ(solve(p).status, Status::Unbounded);
}

TEST(Lp, FreeAndUpperBoundedVariables) {
    // min x - y with x free, y <= 2, x >= y - 1 and x >= -y - 1.
    LinearProgram p(2);
    p.set_objective({1.0, -1.0});
    p.set_bounds(0, -kInf, kInf);
    p.set_bounds(1, -kInf, 2.0);
    p.add_row({-1.0, 1.0}, 1.0);
    p.add_row({-1.0, -1.0}, 1.0);
    const auto r = solve(p);
    ASSERT_EQ(r.status, Status::Optimal);
    EXPECT_NEAR(r.value, -1.0, 1e-10);
    EXPECT_LE(r.x[1], 2.0 + 1e-12);
}

TEST(Lp, InvalidInput) {
    LinearProgram p(2);
    EXPECT_THROW(p.add_row({1.0}, 0.0), std::invalid_argument);
    EXPECT_THROW(p.set_bounds(0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(p.set_bounds(5, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(p.set_objective({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(Lp, RandomProgramsMatchVertexEnumeration) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 4), nrows(0, 8);
    int feasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int d = dim(rng);
        const int m = nrows(rng);
        LinearProgram p(static_cast<std::size_t>(d), trial % 2 ? Sense::Maximize : Sense::Minimize);
        std::vector<double> c(d);
        for (auto& ci : c) ci = coef(rng);
        p.set_objective(c);
        for (int j = 0; j < d; ++j) p.set_bounds(j, -2.0 + coef(rng), 2.0 + coef(rng));
        for (int i = 0; i < m; ++i) {
            std::vector<double> a(d);
            for (auto& ai : a) ai = coef(rng);
            // Occasional sparse or singleton rows exercise the presolve.
            if (d > 1 && i % 3 == 2) a[i % d] = 0.0;
            p.add_row(a, 0.8 * coef(rng) + 0.3);
        }
        const auto oracle = vertex_enumeration(p);
        const auto r = solve(p);
        if (!oracle.feasible) {
            EXPECT_EQ(r.status, Status::Infeasible) << "trial " << trial;
            continue;
        }
        ++feasible;
        ASSERT_EQ(r.status, Status::Optimal) << "trial " << trial;
        EXPECT_NEAR(r.value, oracle.value, 1e-8) << "trial " << trial;
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += p.row(i)[j] * r.x[j];
            EXPECT_LE(s, p.rhs(i) + 1e-8);
        }
    }
    EXPECT_GT(feasible, 100);
}

TEST(Lp, DegenerateProgram) {
    // Many constraints through the same vertex.
    LinearProgram p(3, Sense::Maximize);
    p.set_objective({1.0, 1.0, 1.0});
    for (int j = 0; j < 3; ++j) p.set_bounds(j, 0.0, kInf);
    for (int i = 1; i <= 12; ++i) p.add_row({1.0 * i, 1.0, 13.0 - i}, 14.0);
    p.add_row({1.0, 1.0, 1.0}, 3.0);
    const auto r = solve(p);
    ASSERT_EQ(r.status, Status::Optimal);
    EXPECT_NEAR(r.value, vertex_enumeration(p).value, 1e-9);
}

TEST(Lp, Deterministic) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    LinearProgram p(4, Sense::Maximize);
    p.set_objective({coef(rng), coef(rng), coef(rng), coef(rng)});
    for (int j = 0; j < 4; ++j) p.set_bounds(j, -1.0, 1.0);
    for (int i = 0; i < 6; ++i) p.add_row({coef(rng), coef(rng), coef(rng), coef(rng)}, 0.5);
    const auto a = solve(p);
    const auto b = solve(p);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Lp, StatusNames) {
    EXPECT_STREQ(to_string(Status::Optimal), "optimal");
    EXPECT_STREQ(to_string(Status::Infeasible), "infeasible");
}
