#include "tnr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tnr/errors.hpp"

namespace tnr {

double normalize_angle(double radians) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(radians, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

double angle_difference(double to, double from) { return normalize_angle(to - from); }

Eigen::Vector3d Pose::forward() const { return {std::cos(yaw), std::sin(yaw), 0.0}; }
Eigen::Vector3d Pose::left() const { return {-std::sin(yaw), std::cos(yaw), 0.0}; }

Pose Pose::offset(double lateral_left, double dyaw) const {
    return Pose(position + lateral_left * left(), yaw + dyaw);
}

Eigen::Matrix3d world_to_camera_rotation(double yaw) {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    Eigen::Matrix3d r;
    r << s, -c, 0.0,     // camera +x: right of the heading
        0.0, 0.0, -1.0,  // camera +y: down
        c, s, 0.0;       // camera +z: along the heading
    return r;
}

CameraModel::CameraModel(double focal_length_px, Eigen::Vector2d principal_point,
                         Eigen::Vector2i image_size, double near_plane_m)
    : focal_(focal_length_px), principal_(std::move(principal_point)), size_(std::move(image_size)),
      near_(near_plane_m) {
    if (!(focal_ > 0.0)) throw ConfigError("camera focal length must be positive");
    if (size_.x() <= 0 || size_.y() <= 0) throw ConfigError("camera image size must be positive");
    if (principal_.x() < 0.0 || principal_.y() < 0.0 || principal_.x() > size_.x() ||
        principal_.y() > size_.y())
        throw ConfigError("principal point outside image bounds");
    if (!(near_ > 0.0)) throw ConfigError("near plane must be positive");
}

CameraModel CameraModel::default_camera() {
    return CameraModel(500.0, Eigen::Vector2d(320.0, 240.0), Eigen::Vector2i(640, 480));
}

double CameraModel::horizontal_fov() const {
    return std::atan(principal_.x() / focal_) + std::atan((size_.x() - principal_.x()) / focal_);
}

double CameraModel::vertical_fov() const {
    return std::atan(principal_.y() / focal_) + std::atan((size_.y() - principal_.y()) / focal_);
}

bool CameraModel::in_image(const Eigen::Vector2d& pixel) const {
    return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() < size_.x() && pixel.y() < size_.y();
}

Eigen::Vector2d CameraModel::project_camera_point(const Eigen::Vector3d& p_cam) const {
    return principal_ + focal_ * Eigen::Vector2d(p_cam.x() / p_cam.z(), p_cam.y() / p_cam.z());
}

Eigen::Vector3d CameraModel::unproject(const Eigen::Vector2d& pixel, double depth) const {
    const Eigen::Vector2d xy = (pixel - principal_) / focal_;
    return {xy.x() * depth, xy.y() * depth, depth};
}

Eigen::Vector3d to_camera_frame(const Pose& camera_pose, const Eigen::Vector3d& point) {
    return world_to_camera_rotation(camera_pose.yaw) * (point - camera_pose.position);
}

Eigen::Vector3d to_world_frame(const Pose& camera_pose, const Eigen::Vector3d& p_cam) {
    return world_to_camera_rotation(camera_pose.yaw).transpose() * p_cam + camera_pose.position;
}

std::optional<Eigen::Vector2d> project(const CameraModel& camera, const Pose& camera_pose,
                                       const Eigen::Vector3d& point) {
    const Eigen::Vector3d p_cam = to_camera_frame(camera_pose, point);
    if (p_cam.z() <= camera.near_plane()) return std::nullopt;
    Eigen::Vector2d pixel = camera.project_camera_point(p_cam);
    if (!camera.in_image(pixel)) return std::nullopt;
    return pixel;
}

PathGeometry::PathGeometry(std::vector<Pose> waypoints) : waypoints_(std::move(waypoints)) {
    arc_.reserve(waypoints_.size());
    double s = 0.0;
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        if (i > 0) s += (waypoints_[i].position - waypoints_[i - 1].position).norm();
        arc_.push_back(s);
    }
}

ArcPose PathGeometry::arc_position(double s) const {
    if (waypoints_.empty()) throw ConfigError("arc_position on an empty path");
    ArcPose out;
    if (s <= 0.0 || waypoints_.size() == 1) {
        out.pose = waypoints_.front();
        out.clamped = s < 0.0 || (waypoints_.size() == 1 && s > 0.0);
        return out;
    }
    if (s >= arc_.back()) {
        out.pose = waypoints_.back();
        out.clamped = s > arc_.back();
        return out;
    }
    // First waypoint with arc-length > s; segment is [i-1, i].
    const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - arc_.begin());
    const double len = arc_[i] - arc_[i - 1];
    const double t = len > 0.0 ? (s - arc_[i - 1]) / len : 0.0;
    const Pose& a = waypoints_[i - 1];
    const Pose& b = waypoints_[i];
    out.pose = Pose(a.position + t * (b.position - a.position),
                    a.yaw + t * angle_difference(b.yaw, a.yaw));
    return out;
}

double PathGeometry::curvature(double s, double half_window) const {
    if (waypoints_.size() < 2 || half_window <= 0.0) return 0.0;
    const double lo = std::max(0.0, s - half_window);
    const double hi = std::min(total_length(), s + half_window);
    if (hi <= lo) return 0.0;
    return angle_difference(arc_position(hi).pose.yaw, arc_position(lo).pose.yaw) / (hi - lo);
}

NearestOnPath PathGeometry::nearest(const Eigen::Vector3d& point, bool planar) const {
    if (waypoints_.empty()) throw ConfigError("nearest on an empty path");
    auto flat = [planar](Eigen::Vector3d v) {
        if (planar) v.z() = 0.0;
        return v;
    };
    const Eigen::Vector3d p = flat(point);
    NearestOnPath best;
    best.distance = (flat(waypoints_.front().position) - p).norm();
    best.arc_length = 0.0;
    best.point = waypoints_.front().position;
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        const Eigen::Vector3d a = flat(waypoints_[i - 1].position);
        const Eigen::Vector3d b = flat(waypoints_[i].position);
        const Eigen::Vector3d ab = b - a;
        const double len2 = ab.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const double d = (a + t * ab - p).norm();
        if (d < best.distance) {
            best.distance = d;
            best.arc_length = arc_[i - 1] + t * (arc_[i] - arc_[i - 1]);
            best.point = waypoints_[i - 1].position +
                         t * (waypoints_[i].position - waypoints_[i - 1].position);
        }
    }
    return best;
}

}  // namespace tnr
