"""Digital in-line holography toolkit: simulation, untrained-GAN
reconstruction, classical baselines and image metrics.

The heavy lifting lives in the compiled `_holo` extension; this package
re-exports its operations.
"""

import os

# OpenBLAS picks its kernels at load time; on hosts it cannot identify it
# falls back to slow generic ones. The extension pins a sane core type for
# AVX2 machines unless the user already chose.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")

from ._holo import (  # noqa: E402
    DimensionError,
    HoloConfigError,
    HoloParamError,
    add_noise,
    back_propagate,
    backprop_only,
    form_hologram,
    gerchberg_saxton,
    propagate,
    psnr,
    reconstruct,
    ssim,
    synthesize_target,
)

__all__ = [
    "DimensionError",
    "HoloConfigError",
    "HoloParamError",
    "add_noise",
    "back_propagate",
    "backprop_only",
    "form_hologram",
    "gerchberg_saxton",
    "propagate",
    "psnr",
    "reconstruct",
    "ssim",
    "synthesize_target",
]
