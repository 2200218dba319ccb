#include <doctest.h>

#include "servotrack/mesh.hpp"
#include "servotrack/renderer.hpp"

using namespace servotrack;

namespace {

const char* kTetrahedronObj = R"(# unit-ish tetrahedron
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 1 3 2
f 1 2 4
f 1 4 3
f 2 3 4
)";

// Double-sided square facing -z in its local frame, 4 cm across.
TriangleMesh square_mesh() {
    TriangleMesh m;
    m.vertices = {{-0.02, -0.02, 0.0}, {0.02, -0.02, 0.0}, {0.02, 0.02, 0.0}, {-0.02, 0.02, 0.0}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.normals.assign(4, Eigen::Vector3d(0, 0, -1));
    return m;
}

Scene square_scene() {
    Scene scene;
    scene.parts.push_back({square_mesh(), Transform::identity()});
    return scene;
}

int foreground_count(const Image& img) {
    int n = 0;
    for (double px : img.pixels) n += px > 0.0;
    return n;
}

}  // namespace

TEST_CASE("obj parser reads the tetrahedron fixture") {
    const TriangleMesh m = parse_obj(kTetrahedronObj);
    CHECK(m.vertices.size() == 4);
    CHECK(m.triangles.size() == 4);
    REQUIRE(m.normals.size() == 4);
    for (const auto& n : m.normals) CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-9));

    // Area-weighted average of the adjoining face normals, recomputed by hand
    // for vertex 1 (faces 0,1,3 touch it).
    const auto face_normal = [&](int a, int b, int c) -> Eigen::Vector3d {
        return (m.vertices[b] - m.vertices[a]).cross(m.vertices[c] - m.vertices[a]);
    };
    Eigen::Vector3d expect = face_normal(0, 2, 1) + face_normal(0, 1, 3) + face_normal(1, 2, 3);
    expect.normalize();
    CHECK((m.normals[1] - expect).norm() < 1e-9);
}

TEST_CASE("obj parser rejects quads and malformed records") {
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"),
                    NonTriangulatedFace);
    CHECK_THROWS_AS(parse_obj("v 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 2 9\n"), ParseError);
}

TEST_CASE("empty scene renders to all background") {
    const Image img = render(Scene{}, Pose{}, Intrinsics{}, Transform::identity());
    CHECK(foreground_count(img) == 0);
}

TEST_CASE("rendering is deterministic") {
    const Scene scene = square_scene();
    const Pose pose(Eigen::Vector3d(0.0, 0.0, 0.5), Eigen::Vector3d(0.2, 0.1, 0.0));
    const Image a = render(scene, pose, Intrinsics{}, Transform::identity());
    const Image b = render(scene, pose, Intrinsics{}, Transform::identity());
    CHECK(a == b);
}

TEST_CASE("shading stays inside [0,1]") {
    const Pose pose(Eigen::Vector3d(0.0, 0.0, 0.5), Eigen::Vector3d(0.4, -0.3, 0.2));
    const Image img = render(square_scene(), pose, Intrinsics{}, Transform::identity());
    for (double px : img.pixels) {
        CHECK(px >= 0.0);
        CHECK(px <= 1.0);
    }
}

TEST_CASE("projected vertices land on or next to the rendered foreground") {
    const Intrinsics K;
    const Transform ext = Transform::identity();
    const Pose pose(Eigen::Vector3d(0.01, -0.02, 0.5), Eigen::Vector3d(0.3, 0.2, -0.1));
    const Image img = render(square_scene(), pose, K, ext);
    REQUIRE(foreground_count(img) > 0);

    const Transform place = transform_from_pose(pose);
    const ProjectionMatrix Pi = projection_matrix(K, ext);
    for (const auto& v : square_mesh().vertices) {
        const PixelPoint p = project_point(Pi, place * v);
        REQUIRE(p.u >= 1);
        REQUIRE(p.u < K.width - 1);
        REQUIRE(p.v >= 1);
        REQUIRE(p.v < K.height - 1);
        bool covered = false;
        for (int dy = -1; dy <= 1 && !covered; ++dy)
            for (int dx = -1; dx <= 1 && !covered; ++dx)
                covered = img.at(static_cast<int>(p.u) + dx, static_cast<int>(p.v) + dy) > 0.0;
        CHECK(covered);
    }
}

TEST_CASE("translating the pose shifts the rendered centroid by the projected amount") {
    const Intrinsics K;
    const ProjectionMatrix Pi = projection_matrix(K, Transform::identity());
    const Pose pose(Eigen::Vector3d(0.0, 0.0, 0.5), Eigen::Vector3d::Zero());
    const Pose moved(pose.position + Eigen::Vector3d(0.03, 0.0, 0.0), pose.orientation);

    auto centroid_u = [](const Image& img) {
        double su = 0.0, n = 0.0;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                if (img.at(x, y) > 0.0) {
                    su += x;
                    n += 1.0;
                }
        return su / n;
    };

    const Image a = render(square_scene(), pose, K, Transform::identity());
    const Image b = render(square_scene(), moved, K, Transform::identity());
    const double predicted = project_point(Pi, moved.position).u - project_point(Pi, pose.position).u;
    CHECK(centroid_u(b) - centroid_u(a) == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("foreground pixel count survives in-plane translation") {
    const Intrinsics K;
    const Pose pose(Eigen::Vector3d(0.0, 0.0, 0.5), Eigen::Vector3d(0.1, 0.2, 0.0));
    const Pose moved(pose.position + Eigen::Vector3d(0.02, 0.015, 0.0), pose.orientation);
    const int a = foreground_count(render(square_scene(), pose, K, Transform::identity()));
    const int b = foreground_count(render(square_scene(), moved, K, Transform::identity()));
    CHECK(std::abs(a - b) <= std::max(2, static_cast<int>(0.02 * a)));
}

TEST_CASE("rasterizer obeys the top-left fill rule on a hand-enumerated raster") {
    // Axis-aligned right triangle (0,0) (4,0) (0,4) on a 4x4 raster: pixel
    // centers (x+0.5, y+0.5) are strictly inside when x+y+1 < 4, and the
    // centers exactly on the diagonal (x+y+1 == 4) belong to this triangle
    // because the downward diagonal counts as a left edge.
    DepthImage frame(4, 4);
    rasterize_triangle(frame, {ScreenVertex{0, 0, 1.0, 1.0}, ScreenVertex{4, 0, 1.0, 1.0},
                               ScreenVertex{0, 4, 1.0, 1.0}});
    const bool expect[4][4] = {{true, true, true, true},
                               {true, true, true, false},
                               {true, true, false, false},
                               {true, false, false, false}};
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            CAPTURE(x);
            CAPTURE(y);
            CHECK((frame.shade.at(x, y) > 0.0) == expect[y][x]);
        }

    // Two triangles sharing the diagonal edge tile the square with no double
    // coverage and no holes.
    DepthImage tiled(4, 4);
    rasterize_triangle(tiled, {ScreenVertex{0, 0, 1.0, 0.5}, ScreenVertex{4, 0, 1.0, 0.5},
                               ScreenVertex{0, 4, 1.0, 0.5}});
    rasterize_triangle(tiled, {ScreenVertex{4, 0, 1.0, 0.5}, ScreenVertex{4, 4, 1.0, 0.5},
                               ScreenVertex{0, 4, 1.0, 0.5}});
    for (double px : tiled.shade.pixels) CHECK(px == doctest::Approx(0.5));
}

TEST_CASE("zero-area triangles write nothing") {
    DepthImage frame(4, 4);
    rasterize_triangle(frame, {ScreenVertex{1, 1, 1.0, 1.0}, ScreenVertex{3, 3, 1.0, 1.0},
                               ScreenVertex{2, 2, 1.0, 1.0}});
    for (double px : frame.shade.pixels) CHECK(px == 0.0);
}

TEST_CASE("nearer fragments win the depth test") {
    DepthImage frame(4, 4);
    // Far triangle (depth 2 => inv_z 0.5) then near one (depth 1 => inv_z 1).
    rasterize_triangle(frame, {ScreenVertex{0, 0, 0.5, 0.25}, ScreenVertex{4, 0, 0.5, 0.25},
                               ScreenVertex{0, 4, 0.5, 0.25}});
    rasterize_triangle(frame, {ScreenVertex{0, 0, 1.0, 0.75}, ScreenVertex{4, 0, 1.0, 0.75},
                               ScreenVertex{0, 4, 1.0, 0.75}});
    CHECK(frame.shade.at(0, 0) == doctest::Approx(0.75));
    // Drawing the far one again must not overwrite.
    rasterize_triangle(frame, {ScreenVertex{0, 0, 0.5, 0.25}, ScreenVertex{4, 0, 0.5, 0.25},
                               ScreenVertex{0, 4, 0.5, 0.25}});
    CHECK(frame.shade.at(0, 0) == doctest::Approx(0.75));
}
