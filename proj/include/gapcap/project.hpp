#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gapcap/circuit.hpp"
#include "gapcap/drum.hpp"
#include "gapcap/lattice.hpp"
#include "gapcap/materials.hpp"

namespace gapcap {

// Lattice section as written in a project file (frequencies cyclic, drums
// referenced by name).
struct ProjectLattice {
  int n_sites = 0;
  double omega_site_hz = 6.0e9;  // calibrated default
  double j1_hz = 100.0e6;        // calibrated default
  double j2_hz = 200.0e6;        // calibrated default
  std::string boundary = "open";
  std::vector<std::string> drum_names;
};

// One project file: named parts plus seeds. Quantities in the file carry
// unit suffixes ("70um", "6GHz") or are plain numbers in SI base units.
struct ProjectConfig {
  std::map<std::string, Material> materials;
  std::map<std::string, DrumGeometry> drums;
  std::map<std::string, LcDesign> lc;
  std::optional<ToleranceBudget> budget;
  std::optional<ProjectLattice> lattice;
  std::map<std::string, std::uint64_t> seeds;
};

// Parses and fully validates a project file. Unknown keys are rejected,
// units are checked per field, and every error names its field. When echo is
// given, each applied default is reported with its origin.
ProjectConfig load_project(const std::string& path,
                           std::ostream* echo = nullptr);

// Canonical form: SI base numbers, alphabetical keys, two-space indent.
// serialize(load(serialize(load(f)))) == serialize(load(f)) byte for byte.
std::string serialize_project(const ProjectConfig& config);
void save_project(const ProjectConfig& config, const std::string& path);

// Resolves the lattice section against the drum map (angular frequencies).
// Dangling drum references throw.
LatticeSpec to_lattice_spec(const ProjectConfig& config);

std::uint64_t project_seed(const ProjectConfig& config,
                           const std::string& name, std::uint64_t fallback);

}  // namespace gapcap
