#pragma once

#include <fstream>
#include <iosfwd>
#include <string>

#include "ehdg/convergence.hpp"
#include "ehdg/mesh.hpp"
#include "ehdg/projections.hpp"

namespace ehdg {

/// Columns level,h_over_sqrt2,member,Eq,Eq_rate,Eu,Eu_rate,Eustar,Eustar_rate;
/// rate cells are empty on the first level.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);
/// Throws std::runtime_error on a malformed header or row.
ConvergenceTable read_convergence_csv(std::istream& in);

/// Per-element values of u_h and u* at the three vertices and the centroid:
/// member,element,point,x,y,u,ustar (point 0-2 vertices, 3 centroid).
void write_snapshot_csv(const Mesh& mesh, int member, const ProjectedField& u,
                        const ProjectedField& ustar, std::ostream& out, bool header = true);

/// Values on a uniform (m+1) x (m+1) grid over the mesh bounding box:
/// x,y,u (points outside the mesh are skipped).
void write_grid_csv(const Mesh& mesh, const ProjectedField& u, int m, std::ostream& out);

/// Legacy ASCII VTK POLYDATA with three points per triangle, so the
/// discontinuous field is shown as is. Point scalars "u" and "ustar".
void write_vtk(const Mesh& mesh, const ProjectedField& u, const ProjectedField& ustar,
               std::ostream& out, const std::string& title = "ehdg");

/// Opens path for writing, creating parent directories; throws
/// std::runtime_error on failure.
std::ofstream open_output(const std::string& path);

}  // namespace ehdg
