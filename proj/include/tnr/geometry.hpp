#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

// Conventions used throughout the library:
//   world     z-up, right-handed; yaw is counter-clockwise seen from above, yaw 0 faces +x.
//   camera    +z forward (along the heading), +x right, +y down.
//   image     u grows rightward, v grows downward.
//   shifts    displacement = reference pixel - query pixel. A query camera yawed by +t
//             relative to the reference therefore sees an on-axis shift of -f*tan(t).
//   lateral   positive lateral offsets point to the left of the heading.

namespace tnr {

double normalize_angle(double radians);  // into (-pi, pi]
double angle_difference(double to, double from);  // shortest signed to - from

struct Pose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double yaw = 0.0;

    Pose() = default;
    Pose(const Eigen::Vector3d& p, double yaw_rad) : position(p), yaw(normalize_angle(yaw_rad)) {}
    Pose(double x, double y, double z, double yaw_rad) : Pose(Eigen::Vector3d(x, y, z), yaw_rad) {}

    Eigen::Vector3d forward() const;
    Eigen::Vector3d left() const;

    /// Offset along the heading's left axis, then rotate by `dyaw`.
    Pose offset(double lateral_left, double dyaw) const;
};

/// World to camera-frame rotation for a camera mounted along the pose heading.
Eigen::Matrix3d world_to_camera_rotation(double yaw);

class CameraModel {
public:
    CameraModel() = default;
    CameraModel(double focal_length_px, Eigen::Vector2d principal_point, Eigen::Vector2i image_size,
                double near_plane_m = 0.05);

    static CameraModel default_camera();  // 640x480, f = 500

    double focal_length_px() const { return focal_; }
    const Eigen::Vector2d& principal_point() const { return principal_; }
    const Eigen::Vector2i& image_size() const { return size_; }
    double near_plane() const { return near_; }
    double horizontal_fov() const;
    double vertical_fov() const;

    bool in_image(const Eigen::Vector2d& pixel) const;

    /// Pinhole mapping of a camera-frame point, no visibility checks.
    Eigen::Vector2d project_camera_point(const Eigen::Vector3d& p_cam) const;
    /// Camera-frame point at depth z along the ray through `pixel`.
    Eigen::Vector3d unproject(const Eigen::Vector2d& pixel, double depth) const;

private:
    double focal_ = 500.0;
    Eigen::Vector2d principal_{320.0, 240.0};
    Eigen::Vector2i size_{640, 480};
    double near_ = 0.05;
};

/// Pixel of a world point seen from `camera_pose`; empty when behind the near plane or off-image.
std::optional<Eigen::Vector2d> project(const CameraModel& camera, const Pose& camera_pose,
                                       const Eigen::Vector3d& point);

Eigen::Vector3d to_camera_frame(const Pose& camera_pose, const Eigen::Vector3d& point);
Eigen::Vector3d to_world_frame(const Pose& camera_pose, const Eigen::Vector3d& p_cam);

struct ArcPose {
    Pose pose;
    bool clamped = false;
};

struct NearestOnPath {
    double distance = 0.0;
    double arc_length = 0.0;
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

/// Polyline trajectory with cumulative arc-length per waypoint.
class PathGeometry {
public:
    PathGeometry() = default;
    explicit PathGeometry(std::vector<Pose> waypoints);

    const std::vector<Pose>& waypoints() const { return waypoints_; }
    const std::vector<double>& arc_lengths() const { return arc_; }
    double total_length() const { return arc_.empty() ? 0.0 : arc_.back(); }
    bool empty() const { return waypoints_.empty(); }

    /// Linear interpolation along the polyline; yaw follows the shortest arc.
    /// Out-of-range s is clamped and flagged.
    ArcPose arc_position(double s) const;

    /// Heading change per meter around s, by finite differences over `half_window` meters.
    double curvature(double s, double half_window = 0.25) const;

    /// Closest point of the polyline. `planar` ignores the vertical coordinate.
    NearestOnPath nearest(const Eigen::Vector3d& point, bool planar = true) const;

private:
    std::vector<Pose> waypoints_;
    std::vector<double> arc_;
};

}  // namespace tnr
