"""CNN stage classifiers and the U-Net denoiser bank."""

from __future__ import annotations

from .bank import BANK_MANIFEST_VERSION, ModelBank
from .classifier import (
    DEFAULT_CONV_BLOCKS,
    Classification,
    CnnClassifier,
    CnnClassifierSpec,
    build_classifier,
    classify,
    classify_batch,
)
from .exceptions import InvalidFrameError, ModelBankError, ModelError, ModelLoadError, UnsupportedClassCountError
from .io import load_classifier, load_model, load_unet, save_model
from .preprocessing import batch_to_frames, fit_length, frames_to_batch, unit_power_scale
from .training import fit_classifier, fit_unet, unet_training_pairs
from .unet import UNet, UnetSpec, build_unet, recover_bits_from_denoised, unet_denoise, unet_denoise_batch
from .validators import SUPPORTED_CLASS_COUNTS

__all__ = [
    "BANK_MANIFEST_VERSION",
    "DEFAULT_CONV_BLOCKS",
    "SUPPORTED_CLASS_COUNTS",
    "Classification",
    "CnnClassifier",
    "CnnClassifierSpec",
    "InvalidFrameError",
    "ModelBank",
    "ModelBankError",
    "ModelError",
    "ModelLoadError",
    "UNet",
    "UnetSpec",
    "UnsupportedClassCountError",
    "batch_to_frames",
    "build_classifier",
    "build_unet",
    "classify",
    "classify_batch",
    "fit_classifier",
    "fit_length",
    "fit_unet",
    "frames_to_batch",
    "load_classifier",
    "load_model",
    "load_unet",
    "recover_bits_from_denoised",
    "save_model",
    "unet_denoise",
    "unet_denoise_batch",
    "unet_training_pairs",
    "unit_power_scale",
]
