#include "servotrack/mesh.hpp"

#include <fstream>
#include <sstream>

namespace servotrack {

Eigen::Vector3d TriangleMesh::centroid() const {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (const auto& v : vertices) c += v;
    return vertices.empty() ? c : Eigen::Vector3d(c / static_cast<double>(vertices.size()));
}

namespace {

// "a", "a/b", "a//c", "a/b/c" -> (vertex index, normal index or 0).
std::pair<int, int> parse_face_vertex(const std::string& token, const std::string& origin, int line_no) {
    int v = 0, vn = 0;
    const auto first = token.find('/');
    try {
        if (first == std::string::npos) {
            v = std::stoi(token);
        } else {
            v = std::stoi(token.substr(0, first));
            const auto second = token.find('/', first + 1);
            if (second != std::string::npos && second + 1 < token.size())
                vn = std::stoi(token.substr(second + 1));
        }
    } catch (const std::exception&) {
        throw ParseError(origin + ":" + std::to_string(line_no) + ": bad face vertex '" + token + "'");
    }
    return {v, vn};
}

void validate_and_fill_normals(TriangleMesh& mesh, const std::vector<std::array<int, 3>>& face_normal_idx,
                               const std::vector<Eigen::Vector3d>& file_normals, const std::string& origin) {
    if (mesh.triangles.empty())
        throw ParseError(origin + ": mesh has no triangles");

    const int nv = static_cast<int>(mesh.vertices.size());
    for (const auto& tri : mesh.triangles)
        for (int idx : tri)
            if (idx < 0 || idx >= nv)
                throw ParseError(origin + ": face index out of range");

    bool have_all_normals = !file_normals.empty();
    for (const auto& fn : face_normal_idx)
        for (int idx : fn)
            if (idx <= 0 || idx > static_cast<int>(file_normals.size())) have_all_normals = false;

    mesh.normals.assign(mesh.vertices.size(), Eigen::Vector3d::Zero());
    if (have_all_normals) {
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
            for (int k = 0; k < 3; ++k)
                mesh.normals[mesh.triangles[t][k]] = file_normals[face_normal_idx[t][k] - 1];
        for (auto& n : mesh.normals) {
            const double len = n.norm();
            if (len < 1e-12)
                throw ParseError(origin + ": zero-length vertex normal");
            n /= len;
        }
        return;
    }

    // Area-weighted face-normal accumulation (cross product carries the area).
    for (const auto& tri : mesh.triangles) {
        const Eigen::Vector3d& a = mesh.vertices[tri[0]];
        const Eigen::Vector3d& b = mesh.vertices[tri[1]];
        const Eigen::Vector3d& c = mesh.vertices[tri[2]];
        const Eigen::Vector3d fn = (b - a).cross(c - a);
        for (int idx : tri) mesh.normals[idx] += fn;
    }
    for (auto& n : mesh.normals) {
        const double len = n.norm();
        n = len < 1e-12 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d(n / len);
    }
}

}  // namespace

TriangleMesh parse_obj(const std::string& text, const std::string& origin) {
    TriangleMesh mesh;
    std::vector<Eigen::Vector3d> file_normals;
    std::vector<std::array<int, 3>> face_normal_idx;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Eigen::Vector3d p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                throw ParseError(origin + ":" + std::to_string(line_no) + ": bad vertex record");
            mesh.vertices.push_back(p);
        } else if (tag == "vn") {
            Eigen::Vector3d n;
            if (!(ls >> n.x() >> n.y() >> n.z()))
                throw ParseError(origin + ":" + std::to_string(line_no) + ": bad normal record");
            file_normals.push_back(n);
        } else if (tag == "f") {
            std::vector<std::string> tokens;
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (tokens.size() != 3)
                throw NonTriangulatedFace(origin + ":" + std::to_string(line_no) + ": face with " +
                                          std::to_string(tokens.size()) + " vertices (triangles only)");
            std::array<int, 3> tri{};
            std::array<int, 3> tri_n{};
            for (int k = 0; k < 3; ++k) {
                auto [v, vn] = parse_face_vertex(tokens[k], origin, line_no);
                tri[k] = v - 1;  // OBJ is 1-based
                tri_n[k] = vn;
            }
            mesh.triangles.push_back(tri);
            face_normal_idx.push_back(tri_n);
        }
        // Other record types (vt, o, g, s, usemtl, ...) are ignored.
    }

    validate_and_fill_normals(mesh, face_normal_idx, file_normals, origin);
    return mesh;
}

TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("load_mesh: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_obj(ss.str(), path);
}

}  // namespace servotrack
