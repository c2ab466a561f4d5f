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

#ifndef PEDBENCH_CAMERA_GEOMETRY_H_
#define PEDBENCH_CAMERA_GEOMETRY_H_

#include <array>

#include "pedbench/types.h"

namespace pedbench {

inline constexpr double kDepthEpsilon = 1e-6;  // m

// Zero-skew pinhole camera with a rigid world->camera transform.
class CameraModel {
 public:
  // Throws InvalidArgument on non-positive focal lengths, a rotation that is
  // not orthonormal to 1e-9, or an empty image.
  CameraModel(double fx, double fy, double cx, double cy,
              const Mat3& world_to_camera_rotation,
              const Vec3& world_to_camera_translation, int image_width,
              int image_height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }

  Vec3 to_camera(const Vec3& world) const {
    return rotation_ * world + translation_;
  }

  // Same intrinsics, different extrinsics (the ego vehicle moves per frame).
  CameraModel with_extrinsics(const Mat3& rotation,
                              const Vec3& translation) const;

 private:
  double fx_, fy_, cx_, cy_;
  Mat3 rotation_;
  Vec3 translation_;
  int image_width_, image_height_;
};

struct Box3D {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();  // (length, width, height)
  double yaw = 0.0;          // about the world vertical (z) axis
};

struct PixelBox {
  double u_min = 0.0, v_min = 0.0, u_max = 0.0, v_max = 0.0;

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
};

struct SquareCrop {
  double center_u = 0.0;
  double center_v = 0.0;
  double side = 0.0;

  bool operator==(const SquareCrop&) const = default;
};

// Throws BehindCamera when the camera-frame depth is <= kDepthEpsilon.
Eigen::Vector2d project_point(const CameraModel& camera, const Vec3& world);

std::array<Vec3, 8> box_corners(const Box3D& box);

// Axis-aligned pixel bounds of the corners in front of the camera. Not
// clipped to the image. Throws FullyBehindCamera if no corner is in front.
PixelBox project_box(const CameraModel& camera, const Box3D& box);

// Square of side factor * max(width, height) on the box center. The crop is
// left wherever it lands relative to the image border.
SquareCrop expand_crop(const PixelBox& box, double factor = 2.0);

}  // namespace pedbench

#endif  // PEDBENCH_CAMERA_GEOMETRY_H_
