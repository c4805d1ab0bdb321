#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lslasso/design.hpp"
#include "lslasso/random.hpp"

using namespace lslasso;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lslasso_test_design";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

Eigen::MatrixXd seeded_matrix(int n, int p, std::uint64_t seed) {
  CounterRng rng(seed, 0, Stream::Design);
  Eigen::MatrixXd m(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = 4.0 * rng.uniform01() - 2.0;
  return m;
}

}  // namespace

TEST_CASE("design and domain construction") {
  CHECK_THROWS(DesignMatrix(Eigen::MatrixXd(0, 3)));
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS(DesignMatrix(bad));
  CHECK_THROWS(ParamDomain(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)));
  CHECK_THROWS(ParamDomain(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(3)));
  const auto box = ParamDomain::uniform_box(3, -1, 1);
  CHECK(box.contains(Eigen::Vector3d(1, -1, 0)));
  CHECK_FALSE(box.contains(Eigen::Vector3d(1.1, 0, 0)));
  CHECK(box.project(Eigen::Vector3d(3, -3, 0.5)) == Eigen::Vector3d(1, -1, 0.5));
}

TEST_CASE("column scales") {
  Eigen::MatrixXd m(3, 2);
  m << 1, -4, -2, 3, 0.5, 0;
  const auto d = column_scales(DesignMatrix(m));
  CHECK(d[0] == 2.0);
  CHECK(d[1] == 4.0);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 2);
  z(0, 0) = 1;
  CHECK_THROWS(column_scales(DesignMatrix(z)));

  const Eigen::MatrixXd r = seeded_matrix(20, 5, 3);
  const auto dr = column_scales(DesignMatrix(r));
  const Eigen::MatrixXd u = r.array().rowwise() / dr.transpose().array();
  for (int j = 0; j < 5; ++j) CHECK(u.col(j).cwiseAbs().maxCoeff() == 1.0);
}

TEST_CASE("diameters") {
  auto a = weighted_l1_diameter(ParamDomain::uniform_box(3, -1, 1), Eigen::Vector3d::Ones());
  CHECK(a.weighted == 6.0);
  CHECK(a.unweighted == 6.0);
  auto b = weighted_l1_diameter(ParamDomain::uniform_box(2, 0, 1), Eigen::Vector2d(2, 3));
  CHECK(b.weighted == 5.0);
  CHECK(b.unweighted == 2.0);
  auto c = weighted_l1_diameter(ParamDomain::uniform_box(4, 0, 1e-9), Eigen::Vector4d(1, 2, 3, 4));
  CHECK(c.weighted > 0.0);
  CHECK(c.weighted == doctest::Approx(10e-9));
  CHECK_THROWS(weighted_l1_diameter(ParamDomain::uniform_box(2, 0, 1), Eigen::Vector3d::Ones()));
}

TEST_CASE("scale invariance of the weighted diameter") {
  const Eigen::MatrixXd r = seeded_matrix(10, 4, 5);
  const Eigen::Vector4d c(0.5, 2, 3, 7);
  const auto d1 = column_scales(DesignMatrix(r));
  const auto d2 = column_scales(DesignMatrix(r * c.asDiagonal()));
  CHECK((d2 - d1.cwiseProduct(c)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("feasibility matches vertex enumeration") {
  for (int p : {1, 3, 6, 10}) {
    const Eigen::MatrixXd r = seeded_matrix(15, p, 100 + p);
    const DesignMatrix x(r);
    Eigen::VectorXd lo(p), hi(p);
    CounterRng rng(7, p, Stream::Search);
    for (int j = 0; j < p; ++j) {
      lo[j] = -rng.uniform01();
      hi[j] = lo[j] + 0.1 + rng.uniform01();
    }
    const ParamDomain dom(lo, hi);
    double vmin = 1e300, vmax = -1e300;
    Eigen::VectorXd row_min = Eigen::VectorXd::Constant(15, 1e300);
    Eigen::VectorXd row_max = Eigen::VectorXd::Constant(15, -1e300);
    for (long mask = 0; mask < (1L << p); ++mask) {
      Eigen::VectorXd v(p);
      for (int j = 0; j < p; ++j) v[j] = (mask >> j) & 1 ? hi[j] : lo[j];
      const Eigen::VectorXd t = r * v;
      row_min = row_min.cwiseMin(t);
      row_max = row_max.cwiseMax(t);
    }
    vmin = row_min.minCoeff();
    vmax = row_max.maxCoeff();
    const Interval range = index_range(x, dom);
    CHECK(range.lo == doctest::Approx(vmin).epsilon(1e-13));
    CHECK(range.hi == doctest::Approx(vmax).epsilon(1e-13));

    CHECK(check_feasibility(x, dom, {vmin - 1e-3, vmax + 1e-3}).ok);
    const auto tight = check_feasibility(x, dom, {vmin - 1e-3, vmax});
    CHECK_FALSE(tight.ok);
    REQUIRE(tight.row.has_value());
    // first offending row in vertex order
    long first = -1;
    for (int i = 0; i < 15 && first < 0; ++i) {
      if (row_min[i] <= vmin - 1e-3 + kFeasibilityMargin || row_max[i] >= vmax - kFeasibilityMargin) first = i;
    }
    CHECK(*tight.row == first);
    CHECK_FALSE(tight.diagnostic.empty());
  }
  CHECK_THROWS(check_feasibility(DesignMatrix(Eigen::MatrixXd::Ones(2, 2)),
                                 ParamDomain::uniform_box(3, 0, 1), {-10, 10}));
}

TEST_CASE("csv round trip") {
  const Eigen::MatrixXd r = seeded_matrix(7, 3, 9);
  const auto path = scratch("x.csv");
  write_matrix_csv(path.string(), r, "x");
  const DesignMatrix back = read_design_csv(path.string(), true);
  CHECK(back.values() == r);

  const Eigen::VectorXd y = r.col(1);
  const auto ypath = scratch("y.csv");
  write_vector_csv(ypath.string(), y, "y");
  CHECK(read_response_csv(ypath.string(), true) == y);
  CHECK(read_response_csv(ypath.string(), true, "y") == y);
  CHECK_THROWS(read_response_csv(ypath.string(), true, "nope"));
  CHECK_THROWS(read_response_csv(ypath.string(), false, "y"));
}

TEST_CASE("csv parsing details") {
  const auto a = scratch("a.csv");
  write_text(a, "1, 2,3\n\n4,5 ,6\r\n");
  const auto x = read_design_csv(a.string(), false);
  CHECK(x.rows() == 2);
  CHECK(x.values()(1, 1) == 5.0);

  const auto named = scratch("named.csv");
  write_text(named, "id,resp\n1,0\n2,1\n");
  const auto y = read_response_csv(named.string(), true, "resp");
  CHECK(y == Eigen::Vector2d(0, 1));

  const auto ragged = scratch("ragged.csv");
  write_text(ragged, "1,2\n3\n");
  CHECK_THROWS_WITH(read_design_csv(ragged.string(), false), doctest::Contains(":2: ragged row"));

  const auto junk = scratch("junk.csv");
  write_text(junk, "1,2\n3,abc\n");
  CHECK_THROWS_WITH(read_design_csv(junk.string(), false), doctest::Contains("not a number"));

  const auto empty = scratch("empty.csv");
  write_text(empty, "a,b\n");
  CHECK_THROWS(read_design_csv(empty.string(), true));
  CHECK_THROWS(read_design_csv(scratch("missing.csv").string(), false));
}
