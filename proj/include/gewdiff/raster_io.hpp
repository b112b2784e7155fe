#pragma once

#include <string>

#include "gewdiff/types.hpp"

namespace gewdiff {

// ============================================================================
// Raster container: one JSON header line, then a raw binary payload.
//
//   {"height":H,"width":W,"bands":B,"dtype":"f32le","scale_factor":S,"layout":"bsq"}\n
//   <H*W*B little-endian values in band-sequential order>
//
// dtype "f32le" carries reflectance-scaled floats (loaded values are payload
// divided by scale_factor); dtype "u32le" carries label maps (bands = 1,
// scale ignored). save_cube writes scale_factor = 1, so a save/load roundtrip
// is bit-exact for every value representable in 32-bit floats - in particular
// for any cube that itself came from load_cube.
// ============================================================================

HsiCube load_cube(const std::string& path);
void save_cube(const HsiCube& cube, const std::string& path);

LatentCube load_latent(const std::string& path);
void save_latent(const LatentCube& latent, const std::string& path);

SegmentationMap load_segmentation(const std::string& path);
void save_segmentation(const SegmentationMap& segs, const std::string& path);

ImagePlane load_plane(const std::string& path);
void save_plane(const ImagePlane& plane, const std::string& path);

} // namespace gewdiff
