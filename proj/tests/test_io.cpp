#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lbkit/io.hpp"

using namespace lbkit;

namespace {

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string readAll(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream s;
  s << is.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> readCsv(const std::string& path) {
  std::ifstream is(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  return rows;
}

} // namespace

TEST(Vti, ZeroScalarField) {
  const ScalarField f(2, 2);
  const std::string path = tempPath("lbkit_zero.vti");
  writeVTI(path, vtiGridOf(f), {toVtiArray("rho", f)});
  const std::string text = readAll(path);
  EXPECT_NE(text.find("WholeExtent=\"0 1 0 1 0 0\""), std::string::npos);
  EXPECT_NE(text.find("NumberOfComponents=\"1\""), std::string::npos);
  const auto values = readVTIArray(path, "rho");
  EXPECT_EQ(values, (std::vector<double>{0, 0, 0, 0}));
  std::filesystem::remove(path);
}

TEST(Vti, VectorFieldRoundTrip) {
  VectorField u(7, 3, {-0.5, 0.25}, 0.125);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (double& v : u.data) {
    v = d(rng) / 7.0;
  }
  ScalarField rho(7, 3, {-0.5, 0.25}, 0.125);
  for (double& v : rho.data) {
    v = 1.0 + d(rng) * 1e-9;
  }
  const std::string path = tempPath("lbkit_vector.vti");
  writeVTI(path, vtiGridOf(u), {toVtiArray("velocity", u), toVtiArray("density", rho)});
  const std::string text = readAll(path);
  EXPECT_NE(text.find("NumberOfComponents=\"2\""), std::string::npos);
  EXPECT_NE(text.find("Origin=\"-0.5 0.25 0\""), std::string::npos);
  const auto back = readVTIArray(path, "velocity");
  ASSERT_EQ(back.size(), u.data.size());
  std::size_t k = 0;
  for (int iy = 0; iy < 3; ++iy) {
    for (int ix = 0; ix < 7; ++ix) {
      for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(back[k++], u.at(ix, iy, c), 1e-12);
      }
    }
  }
  const auto rhoBack = readVTIArray(path, "density");
  for (std::size_t j = 0; j < rhoBack.size(); ++j) {
    EXPECT_NEAR(rhoBack[j], rho.data[j], 1e-12);
  }
  EXPECT_THROW(readVTIArray(path, "pressure"), IoError);
  std::filesystem::remove(path);
}

TEST(Vti, FileNameAndValidation) {
  EXPECT_EQ(vtiFileName("poiseuille2d", 42), "poiseuille2d_iT00000042.vti");
  VtiArray bad{"x", 1, {1.0, 2.0}};
  EXPECT_THROW(writeVTI(tempPath("lbkit_bad.vti"), VtiGrid{2, 2}, {bad}), ValidationError);
}

TEST(Vti, Deterministic) {
  ScalarField f(3, 2);
  f.at(1, 1) = 1.0 / 3.0;
  const std::string a = tempPath("lbkit_det_a.vti");
  const std::string b = tempPath("lbkit_det_b.vti");
  writeVTI(a, vtiGridOf(f), {toVtiArray("f", f)});
  writeVTI(b, vtiGridOf(f), {toVtiArray("f", f)});
  EXPECT_EQ(readAll(a), readAll(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Csv, HeaderAndRows) {
  const std::string path = tempPath("lbkit_table.csv");
  writeCSV(path, {"N", "err"}, {{50, 0.01}});
  EXPECT_EQ(readAll(path), "N,err\n50,0.01\n");
  writeCSV(path, {"N", "err"}, {});
  EXPECT_EQ(readAll(path), "N,err\n");
  EXPECT_THROW(writeCSV(path, {"N", "err"}, {{1.0}}), ValidationError);
  std::filesystem::remove(path);
}

TEST(Csv, RoundTripAtPrecision) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  std::vector<std::vector<double>> rows(20, std::vector<double>(3));
  for (auto& r : rows) {
    for (double& v : r) {
      v = d(rng) * std::pow(10.0, d(rng));
    }
  }
  const std::string path = tempPath("lbkit_roundtrip.csv");
  for (int precision : {6, 12, 17}) {
    writeCSV(path, {"a", "b", "c"}, rows, precision);
    const auto back = readCsv(path);
    ASSERT_EQ(back.size(), rows.size() + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        const double v = std::stod(back[i + 1][j]);
        if (precision == 17) {
          EXPECT_EQ(v, rows[i][j]);
        } else {
          EXPECT_NEAR(v, rows[i][j], std::abs(rows[i][j]) * std::pow(10.0, 1 - precision));
        }
      }
    }
  }
  std::filesystem::remove(path);
}

TEST(Ppm, HeaderAndEndpoints) {
  ScalarField f(2, 1);
  f.at(1, 0) = 1.0;
  const std::string path = tempPath("lbkit_grey.ppm");
  writePPMHeatmap(path, f, Colormap::Grey);
  const std::string expected = std::string("P6\n2 1\n255\n") + std::string("\x00\x00\x00", 3) +
                               std::string("\xff\xff\xff", 3);
  EXPECT_EQ(readAll(path), expected);

  // Column field: the top row (largest y) comes first.
  ScalarField column(1, 2);
  column.at(0, 1) = 1.0;
  writePPMHeatmap(path, column, Colormap::Grey);
  EXPECT_EQ(readAll(path), std::string("P6\n1 2\n255\n") + std::string("\xff\xff\xff", 3) +
                             std::string("\x00\x00\x00", 3));
  std::filesystem::remove(path);
}

TEST(Ppm, ConstantFieldIsMidpoint) {
  ScalarField f(3, 2);
  for (double& v : f.data) {
    v = 4.2;
  }
  const std::string path = tempPath("lbkit_const.ppm");
  for (auto map : {Colormap::Grey, Colormap::Rainbow}) {
    writePPMHeatmap(path, f, map);
    const std::string text = readAll(path);
    const std::string header = "P6\n3 2\n255\n";
    ASSERT_EQ(text.substr(0, header.size()), header);
    const auto mid = colormapColor(map, 0.5);
    for (std::size_t k = header.size(); k < text.size(); k += 3) {
      EXPECT_EQ(static_cast<std::uint8_t>(text[k]), mid[0]);
      EXPECT_EQ(static_cast<std::uint8_t>(text[k + 1]), mid[1]);
      EXPECT_EQ(static_cast<std::uint8_t>(text[k + 2]), mid[2]);
    }
  }
  EXPECT_EQ(colormapColor(Colormap::Grey, 0.5), (std::array<std::uint8_t, 3>{128, 128, 128}));
  std::filesystem::remove(path);
}

TEST(Ppm, FixedBoundsClamp) {
  ScalarField f(2, 1);
  f.at(0, 0) = -5.0;
  f.at(1, 0) = 5.0;
  const std::string path = tempPath("lbkit_bounds.ppm");
  writePPMHeatmap(path, f, Colormap::Grey, 0.0, 1.0);
  const std::string text = readAll(path);
  EXPECT_EQ(text.substr(11), std::string("\x00\x00\x00", 3) + std::string("\xff\xff\xff", 3));
  EXPECT_EQ(colormapFromString("rainbow"), Colormap::Rainbow);
  EXPECT_THROW(colormapFromString("viridis"), ValidationError);
  std::filesystem::remove(path);
}

TEST(Config, SectionsAndTypes) {
  const auto tree = parseConfigString(
    "# solver\n[Application.Discretization]\nResolution = 128\n\n[Optimization]\n"
    "Tolerance = 1e-10  # trailing\nFailOnMaxIter = false\nMethod = LBFGS\n");
  EXPECT_EQ(tree.raw("Application.Discretization.Resolution"), "128");
  EXPECT_EQ(tree.getInt("Application.Discretization.Resolution", 0), 128);
  EXPECT_EQ(tree.getDouble("Optimization.Tolerance", 0.0), 1e-10);
  EXPECT_FALSE(tree.getBool("Optimization.FailOnMaxIter", true));
  EXPECT_EQ(tree.getString("Optimization.Method", ""), "LBFGS");
  EXPECT_TRUE(tree.warnings().empty());
}

TEST(Config, MissingKeyWarns) {
  const ConfigTree tree;
  Logger::quiet() = true;
  EXPECT_EQ(tree.getDouble("Application.Discretization.LatticeRelaxationTime", 0.53), 0.53);
  Logger::quiet() = false;
  ASSERT_EQ(tree.warnings().size(), 1u);
  EXPECT_NE(tree.warnings()[0].find("LatticeRelaxationTime"), std::string::npos);
}

TEST(Config, Errors) {
  try {
    parseConfigString("[A]\nx = 1\nnot a pair\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parseConfigString("[A]\nx = 1\nx = 2\n"), ParseError);
  EXPECT_THROW(parseConfigString("[A\nx = 1\n"), ParseError);
  const auto tree = parseConfigString("x = abc\n");
  EXPECT_THROW(tree.getDouble("x", 0.0), ValidationError);
  EXPECT_THROW(tree.getBool("x", false), ValidationError);
  EXPECT_THROW(parseConfig(tempPath("lbkit_no_such.cfg")), IoError);
}

TEST(Config, SerializeRoundTrip) {
  ConfigTree tree;
  tree.set("Application.Name", "poiseuille2d");
  tree.set("Application.Discretization.Resolution", "51");
  tree.set("Output.VtkOutput.SaveTime", "5");
  const auto back = parseConfigString(tree.serialize());
  EXPECT_EQ(back.entries(), tree.entries());
  const std::string path = tempPath("lbkit_roundtrip.cfg");
  std::ofstream(path) << tree.serialize();
  EXPECT_EQ(parseConfig(path).entries(), tree.entries());
  std::filesystem::remove(path);
}
