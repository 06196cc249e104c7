#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ehdg/exceptions.hpp"
#include "ehdg/sparse_linalg.hpp"

using namespace ehdg;

namespace {

std::vector<CondensedElement> condensed_mesh(const Mesh& m, int k, const SpaceTimeVector& beta) {
  const ReferenceTables t(k);
  const SpaceTimeScalar c = [](const Vec2& x, double) { return 1.0 + x.x() * x.y(); };
  std::vector<CondensedElement> out;
  for (int e = 0; e < m.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(m, e);
    out.push_back(condense(assemble_local_blocks(g, t, sample_coefficients(g, t, c, beta, 0.0), 2.0, 0.05, e)));
  }
  return out;
}

const SpaceTimeVector zero_beta = [](const Vec2&, double) { return Vec2(0.0, 0.0); };
const SpaceTimeVector swirl = [](const Vec2& x, double) { return Vec2(x.y() - 0.5, 0.5 - x.x()); };

Eigen::MatrixXd random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N;
  Eigen::MatrixXd r(rows, cols);
  for (int i = 0; i < r.size(); ++i) r.data()[i] = N(rng);
  return r;
}

}  // namespace

TEST_CASE("trace numbering covers interior faces only") {
  const Mesh m = build_uniform_square_mesh(3);
  const TraceDofMap d(m, 2);
  CHECK(d.modes() == 3);
  CHECK(d.size() == 3 * m.num_interior_faces());
  std::vector<int> seen(d.size(), 0);
  for (int e = 0; e < m.num_elements(); ++e) {
    const auto dofs = d.element_dofs(m, e);
    REQUIRE(dofs.size() == 9u);
    for (int i = 0; i < 3; ++i) {
      const int f = m.element_face(e, i);
      for (int a = 0; a < 3; ++a) {
        const int g = dofs[3 * i + a];
        if (m.is_boundary_face(f)) {
          CHECK(g == -1);
        } else {
          CHECK(g == d.face_offset(f) + a);
          ++seen[g];
        }
      }
    }
  }
  for (int s : seen) CHECK(s == 2);
}

TEST_CASE("trace matrix is symmetric without convection and matches element-wise application") {
  const Mesh m = build_uniform_square_mesh(4);
  for (int k = 0; k <= 2; ++k) {
    const TraceDofMap d(m, k);
    const auto sym = condensed_mesh(m, k, zero_beta);
    const TraceSystem s0 = assemble_trace_matrix(m, d, sym);
    const Eigen::MatrixXd A0 = Eigen::MatrixXd(s0.matrix);
    CHECK((A0 - A0.transpose()).cwiseAbs().maxCoeff() < 1e-12 * A0.cwiseAbs().maxCoeff());

    const auto conv = condensed_mesh(m, k, swirl);
    const TraceSystem s1 = assemble_trace_matrix(m, d, conv);
    const Eigen::VectorXd x = random_matrix(d.size(), 1, 3 + k);
    const Eigen::VectorXd y = s1.matrix * x;
    CHECK((apply_elementwise(m, d, conv, x) - y).cwiseAbs().maxCoeff() < 1e-12 * y.cwiseAbs().maxCoeff());
  }
  const TraceDofMap d(m, 1);
  auto few = condensed_mesh(m, 1, swirl);
  few.pop_back();
  CHECK_THROWS_AS(assemble_trace_matrix(m, d, few), std::invalid_argument);
}

TEST_CASE("multi right-hand-side solve treats columns independently") {
  const Mesh m = build_uniform_square_mesh(4);
  const TraceDofMap d(m, 1);
  const auto el = condensed_mesh(m, 1, swirl);
  const Fingerprint fp = FingerprintBuilder().add(1.0).add(std::uint64_t{42}).build();
  const TraceSystem s = assemble_trace_matrix(m, d, el, fp);
  const auto lu = factorize(s);
  CHECK(lu->fingerprint() == fp);
  CHECK(lu->size() == d.size());

  const Eigen::MatrixXd B = random_matrix(d.size(), 3, 9);
  const Eigen::MatrixXd X = solve_multi(*lu, B, fp);
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd xj = solve_multi(*lu, B.col(j));
    CHECK((X.col(j) - xj).cwiseAbs().maxCoeff() < 1e-13 * (1.0 + xj.cwiseAbs().maxCoeff()));
    const Eigen::VectorXd r = s.matrix * X.col(j) - B.col(j);
    CHECK(r.norm() < 1e-10 * B.col(j).norm());
  }

  CHECK_THROWS_AS(solve_multi(*lu, Eigen::MatrixXd::Zero(d.size() + 1, 2)), std::invalid_argument);
  const Fingerprint other = FingerprintBuilder().add(2.0).build();
  CHECK_THROWS_AS(solve_multi(*lu, B, other), FingerprintMismatch);
}

TEST_CASE("fingerprints distinguish inputs") {
  const std::vector<double> a = {1.0, 2.0, 3.0}, b = {1.0, 2.0, 3.0000000001};
  CHECK(FingerprintBuilder().add(a).build() == FingerprintBuilder().add(a).build());
  CHECK_FALSE(FingerprintBuilder().add(a).build() == FingerprintBuilder().add(b).build());
  CHECK_FALSE(FingerprintBuilder().add(1.0).add(2.0).build() ==
              FingerprintBuilder().add(2.0).add(1.0).build());
}

TEST_CASE("iterative backend agrees with sparse LU") {
  const Mesh m = build_uniform_square_mesh(4);
  const TraceDofMap d(m, 1);
  const TraceSystem s = assemble_trace_matrix(m, d, condensed_mesh(m, 1, swirl));
  const Eigen::MatrixXd B = random_matrix(d.size(), 2, 21);
  const Eigen::MatrixXd xl = factorize(s, SolverBackend::SparseLU)->solve(B);
  const Eigen::MatrixXd xg = factorize(s, SolverBackend::GmresIlu)->solve(B);
  CHECK((xl - xg).norm() < 1e-8 * xl.norm());
}

TEST_CASE("singular trace matrix is reported") {
  TraceSystem s{TraceDofMap(build_uniform_square_mesh(1), 0), Eigen::SparseMatrix<double>(1, 1), {}};
  CHECK_THROWS_AS(factorize(s), SingularTraceSystem);
}

TEST_CASE("matrix market output") {
  Eigen::SparseMatrix<double> A(3, 3);
  A.insert(0, 0) = 2.0;
  A.insert(2, 1) = -1.5;
  A.makeCompressed();
  const auto path = std::filesystem::temp_directory_path() / "ehdg_mm_test.mtx";
  REQUIRE(write_matrix_market(A, path.string()));
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  std::istringstream words(header);
  std::vector<std::string> tokens{std::istream_iterator<std::string>(words), {}};
  CHECK(tokens == std::vector<std::string>{"%%MatrixMarket", "matrix", "coordinate", "real", "general"});
  std::string line;
  while (std::getline(in, line) && line[0] == '%') {}
  std::istringstream dims(line);
  int r = 0, c = 0, nnz = 0;
  dims >> r >> c >> nnz;
  CHECK(r == 3);
  CHECK(c == 3);
  CHECK(nnz == 2);
  int i = 0, j = 0;
  double v = 0.0;
  in >> i >> j >> v;
  CHECK(i == 1);
  CHECK(j == 1);
  CHECK(v == 2.0);
  std::filesystem::remove(path);
  CHECK_FALSE(write_matrix_market(A, "/nonexistent-dir/x/y.mtx"));
}
