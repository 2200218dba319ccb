#ifndef SERVOTRACK_MESH_HPP
#define SERVOTRACK_MESH_HPP

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace servotrack {

struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;          // local frame [m]
    std::vector<std::array<int, 3>> triangles;      // vertex indices
    std::vector<Eigen::Vector3d> normals;           // per-vertex, unit

    Eigen::Vector3d centroid() const;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonTriangulatedFace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads a triangulated OBJ subset: v, vn and f records, face forms
/// "f a b c", "f a//an b//bn c//cn" and "f a/t/an ...". Missing normals are
/// rebuilt as area-weighted face-normal averages.
TriangleMesh load_mesh(const std::string& path);

/// Same parser over an in-memory OBJ string (fixture support).
TriangleMesh parse_obj(const std::string& text, const std::string& origin = "<string>");

}  // namespace servotrack

#endif
