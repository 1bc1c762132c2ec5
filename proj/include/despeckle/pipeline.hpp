#pragma once

#include <stdexcept>

#include "diffusion.hpp"
#include "filter.hpp"
#include "image.hpp"
#include "speckle.hpp"

namespace despeckle {

struct PipelineConfig {
    bool equalize = false;
    CoherenceParams coherence{};
    SpeckleParams speckle{};  ///< used only when the pipeline input is synthesized
    double log_floor = 1e-6;

    void validate() const {
        coherence.validate();
        speckle.validate();
        if (!(log_floor > 0.0)) throw std::invalid_argument("log floor must be > 0");
    }
};

/// Optional histogram equalization, log transform, coherence-enhancing
/// diffusion in the log domain, exponential back-transform.
inline ImageBuffer run_pipeline(const ImageBuffer& img, const PipelineConfig& cfg) {
    cfg.validate();
    const ImageBuffer input = cfg.equalize ? histogram_equalize(img) : img;
    return exp_transform(coherence_denoise(log_transform(input, cfg.log_floor), cfg.coherence));
}

}  // namespace despeckle
