#pragma once

#include <optional>
#include <string>

#include "gewdiff/pca.hpp"
#include "gewdiff/types.hpp"
#include "gewdiff/wavelet_rwa.hpp"

namespace gewdiff {

// Fitted wavelet + PCA pair. The spectral regressions and the PCA basis are
// per-pixel linear maps, so a codec fitted on one cube can encode or decode
// any cube with the same band count at any spatial size.
struct LatentCodec {
    RwaModel rwa;
    PcaModel pca;

    // Wavelet split (regression already fitted) followed by PCA projection.
    LatentCube encode(const HsiCube& cube) const;

    // PCA inverse followed by detail prediction and wavelet reconstruction;
    // residuals are unavailable here and reconstruct as zero.
    HsiCube decode(const LatentCube& latent) const;
};

struct EncodeResult {
    LatentCube latent;
    LatentCodec codec;
    RwaEncoding rwa_encoding;
};

// Fits RWA (with regressions) and PCA on `cube` and projects it to the latent.
EncodeResult encode_cube(const HsiCube& cube, int rwa_levels, int pca_k,
                         bool keep_residuals = false);

// On-disk codec container: rwa model + top approximation, optional residuals,
// optional PCA model and latent. All payloads are 64-bit little-endian.
struct CodecContainer {
    RwaEncoding rwa;
    std::optional<PcaModel> pca;
    std::optional<LatentCube> latent;
};

void save_codec(const CodecContainer& container, const std::string& path);
CodecContainer load_codec(const std::string& path);

} // namespace gewdiff
