// Run configuration: an INI-style file with sections [mesh], [physics],
// [boundary], [initial], [stepper], [output].  Unknown sections or keys are
// rejected.  Example:
//
//   [mesh]
//   source = builder:tri:1     # or a mesh file path
//   layout = pn_diode          # pn_diode | all_dirichlet | from_file
//
//   [physics]
//   statistics = blakemore:0.27
//   lambda = 0.05
//   b = 1
//   recombination = scaled_srh:10
//
//   [boundary]
//   N0 = 3.5
//   N1 = 1.5
//
//   [stepper]
//   dt = 0.1
//   t_end = 1
#pragma once

#include <hfvdd/setup.hpp>
#include <hfvdd/transient.hpp>

#include <iosfwd>

namespace hfvdd {

struct RunConfig {
  // [mesh]
  std::string mesh_source = "builder:tri:1";
  std::string layout = "pn_diode";
  Real contact_fraction = 0.25;

  // [physics]
  std::string statistics = "boltzmann";
  std::string mean = "arithmetic";
  Real lambda = 1.0;
  Real b = 0.0;
  std::string doping = "pn_diode";  // pn_diode | constant:<value>
  Real n_region_x_max = 0.25;
  Real n_region_y_min = 0.75;
  std::string recombination = "none";
  Real eta = kDefaultEta;

  // [boundary]
  Real N0 = 0.9;
  Real N1 = 0.1;
  Real alpha0 = 0.0;

  // [initial]
  std::string initial = "diode_sqrt";  // diode_sqrt | equilibrium
                                       // | constant:<n>:<p>

  // [stepper]
  Real dt = 0.1;
  Real t_end = 1.0;
  Real eps = 1e-9;
  int max_newton = 50;
  Real tol = 1e-10;
  Real growth = 1.4;
  Real shrink = 2.0;
  Real min_dt = 1e-12;

  // [output]
  std::string out_dir = "out";
  std::vector<Real> snapshots;  // times, written on the first step reaching
                                // or passing each of them
  std::string format = "vtk";   // vtk | csv
};

RunConfig parse_config(std::istream& in, const std::string& origin);
RunConfig load_config(const std::string& path);

// Builds the mesh (applying the boundary layout unless it is from_file) and
// assembles the full problem. Throws InvalidInput on inconsistent settings.
ProblemSetup make_problem(const RunConfig& config);

StepperConfig make_stepper(const RunConfig& config);

}  // namespace hfvdd
