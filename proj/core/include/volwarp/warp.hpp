#pragma once

#include <span>
#include <vector>

#include "volwarp/tensor.hpp"
#include "volwarp/transform.hpp"
#include "volwarp/voxelize.hpp"

namespace volwarp {

// out(x)[c] = max_i sample(M_i * v, invert(T_i)(x))[c]
//
// Backward warping with trilinear sampling and zero padding. Sample points
// within 1e-6 voxel of a lattice coordinate snap onto it, so fitted
// transforms that are identities or integer shifts up to rounding reproduce
// the input exactly. Accepts any number of parts >= 1; the result does not
// depend on part order or on `threads`.
Volume masked_warp_3d(const Volume& v, std::span<const PartMask> masks,
                      std::span<const Helmert3> transforms, int threads = 1);

// 2D counterpart: each mask is replaced by its depth projection on every
// layer, and every depth slice of M_i * v is warped by the same in-plane
// affine with bilinear sampling. Depth layers never mix.
Volume masked_warp_2d(const Volume& v, std::span<const PartMask> masks,
                      std::span<const Affine2> affines, int threads = 1);

// Mask whose every depth layer is the union over depth of `mask`.
PartMask depth_project(const PartMask& mask);

// Keeps known pixels (bg_mask == 1) and fills the rest by repeated 4-neighbor
// averaging, then smooths the filled region with three extra sweeps.
Image inpaint_background(const Image& img, const Image& bg_mask);

// fg_mask * fg + (1 - fg_mask) * bg.
Image composite(const Image& fg, const Image& fg_mask, const Image& bg);

}  // namespace volwarp
