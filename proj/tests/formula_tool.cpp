// Test helper: writes reference or deliberately damaged formula files.
//   formula_tool degree3 <d> <out>
//   formula_tool negate <in> <out>
//   formula_tool perturb <in> <out> <eps>
//   formula_tool garbage <out>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "wcub/lp_construct.hpp"

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "";
  if (mode == "degree3" && argc == 4) {
    wcub::write_formula(wcub::degree3_formula(std::atoi(argv[2])), argv[3]);
  } else if (mode == "negate" && argc == 4) {
    auto f = wcub::read_formula(argv[2]);
    f.weights.front() = -f.weights.front();
    wcub::write_formula(f, argv[3]);
  } else if (mode == "perturb" && argc == 5) {
    auto f = wcub::read_formula(argv[2]);
    auto& w = f.paths.front();
    Eigen::MatrixXd s = w.slopes();
    s(1, 0) += std::atof(argv[4]);
    w = wcub::PiecewiseLinearPath(w.breakpoints(), s);
    wcub::write_formula(f, argv[3]);
  } else if (mode == "garbage" && argc == 3) {
    std::ofstream(argv[2]) << "{\"d\": 1, \"m\": \n";
  } else {
    std::cerr << "usage: formula_tool degree3|negate|perturb|garbage ...\n";
    return 1;
  }
  return 0;
}
