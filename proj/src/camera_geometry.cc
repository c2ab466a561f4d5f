// Copyright 2026 The pedbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pedbench/camera_geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "pedbench/error.h"

namespace pedbench {

CameraModel::CameraModel(double fx, double fy, double cx, double cy,
                         const Mat3& world_to_camera_rotation,
                         const Vec3& world_to_camera_translation,
                         int image_width, int image_height)
    : fx_(fx),
      fy_(fy),
      cx_(cx),
      cy_(cy),
      rotation_(world_to_camera_rotation),
      translation_(world_to_camera_translation),
      image_width_(image_width),
      image_height_(image_height) {
  if (!(fx_ > 0.0) || !(fy_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (image_width_ <= 0 || image_height_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  const double deviation =
      (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(deviation <= 1e-9)) {
    throw Error(ErrorCode::kInvalidArgument, "rotation is not orthonormal");
  }
}

CameraModel CameraModel::with_extrinsics(const Mat3& rotation,
                                         const Vec3& translation) const {
  return CameraModel(fx_, fy_, cx_, cy_, rotation, translation, image_width_,
                     image_height_);
}

Eigen::Vector2d project_point(const CameraModel& camera, const Vec3& world) {
  const Vec3 p = camera.to_camera(world);
  if (!(p.z() > kDepthEpsilon)) {
    throw Error(ErrorCode::kBehindCamera, "point is behind the camera");
  }
  return {camera.fx() * p.x() / p.z() + camera.cx(),
          camera.fy() * p.y() / p.z() + camera.cy()};
}

std::array<Vec3, 8> box_corners(const Box3D& box) {
  const Eigen::AngleAxisd yaw(box.yaw, Vec3::UnitZ());
  const Mat3 rotation = yaw.toRotationMatrix();
  const Vec3 half = 0.5 * box.size;
  std::array<Vec3, 8> corners;
  int i = 0;
  for (const double sx : {-1.0, 1.0}) {
    for (const double sy : {-1.0, 1.0}) {
      for (const double sz : {-1.0, 1.0}) {
        corners[i++] = box.center +
                       rotation * Vec3(sx * half.x(), sy * half.y(), sz * half.z());
      }
    }
  }
  return corners;
}

PixelBox project_box(const CameraModel& camera, const Box3D& box) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  PixelBox out{kInf, kInf, -kInf, -kInf};
  int visible = 0;
  for (const Vec3& corner : box_corners(box)) {
    if (!(camera.to_camera(corner).z() > kDepthEpsilon)) continue;
    const Eigen::Vector2d uv = project_point(camera, corner);
    out.u_min = std::min(out.u_min, uv.x());
    out.v_min = std::min(out.v_min, uv.y());
    out.u_max = std::max(out.u_max, uv.x());
    out.v_max = std::max(out.v_max, uv.y());
    ++visible;
  }
  if (visible == 0) {
    throw Error(ErrorCode::kFullyBehindCamera,
                "all box corners are behind the camera");
  }
  return out;
}

SquareCrop expand_crop(const PixelBox& box, double factor) {
  if (!(factor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "crop factor must be positive");
  }
  if (!(box.u_min <= box.u_max) || !(box.v_min <= box.v_max)) {
    throw Error(ErrorCode::kInvalidArgument, "pixel box is inverted");
  }
  const double extent = std::max(box.width(), box.height());
  if (extent == 0.0) {
    throw Error(ErrorCode::kDegenerateBox, "pixel box has zero extent");
  }
  return {0.5 * (box.u_min + box.u_max), 0.5 * (box.v_min + box.v_max),
          factor * extent};
}

}  // namespace pedbench
