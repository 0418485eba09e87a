"""Stage 4: the two mitigation methods the recommender chooses between."""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from ..dsp import IqFrame, PulseShape
from ..dsp.types import BitArray
from ..models import ModelBank, ModelBankError, recover_bits_from_denoised, unet_denoise_batch
from ..sic import SicConfig, sic_cancel
from .exceptions import PipelineConfigurationError

SIC = 0
SICUNET = 1
METHOD_NAMES: tuple[str, str] = ("SIC", "SICU-Net")


def sic_bits(mixture: IqFrame, sic_defaults: SicConfig, interferer_sps: int, sir_db: float) -> BitArray:
    return sic_cancel(mixture, sic_defaults.with_estimates(interferer_sps, sir_db)).soi_bits


def unet_bits(
    bank: ModelBank,
    mixtures: Sequence[IqFrame],
    interferer_sps: Sequence[int],
    soi_shape: PulseShape,
) -> list[BitArray]:
    """Denoise each mixture with the bank entry for its sps, batching frames that share an entry."""

    groups: dict[int, list[int]] = defaultdict(list)
    for index, sps in enumerate(interferer_sps):
        groups[int(sps)].append(index)
    results: list[BitArray | None] = [None] * len(mixtures)
    for sps, indices in sorted(groups.items()):
        try:
            model = bank.get(sps)
        except ModelBankError as exc:
            raise PipelineConfigurationError(str(exc)) from exc
        estimates = unet_denoise_batch(model, [mixtures[i] for i in indices])
        for index, estimate in zip(indices, estimates):
            results[index] = recover_bits_from_denoised(estimate, soi_shape)
    return results  # type: ignore[return-value]
